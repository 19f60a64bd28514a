// SPDX-License-Identifier: Apache-2.0
//
// polmimo - dual-polarized Ricean MIMO channel modelling and analysis
// Copyright (C) 2026 The polmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "polmimo/errors.hpp"
#include "polmimo/matrix_kit.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace polmimo;
using polmimo::testing::random_matrix;
using polmimo::testing::random_psd;

TEST_SUITE("matrix_kit")
{
    TEST_CASE("vec stacks columns and unvec inverts it")
    {
        ComplexMatrix a(2, 3);
        a << 1, 2, 3, 4, 5, 6;
        const ComplexVector v = vec(a);
        REQUIRE(v.size() == 6);
        CHECK(v(0) == Complex(1));
        CHECK(v(1) == Complex(4));
        CHECK(v(2) == Complex(2));
        CHECK(unvec(v, 2, 3) == a);
        CHECK_THROWS_AS(unvec(v, 4, 2), std::invalid_argument);
    }

    TEST_CASE("commutation matrix maps vec(A) to vec(A^T)")
    {
        Engine rng(11);
        for (auto [m, n] : {std::pair<Index, Index>{1, 1}, {2, 3}, {4, 4}, {3, 5}})
        {
            const ComplexMatrix a = random_matrix(m, n, rng);
            const ComplexMatrix k = commutation_matrix(m, n);
            CHECK((k * vec(a) - vec(a.transpose())).norm() == doctest::Approx(0.0));
            // Permutation: K^T K = I and K_{m,n}^T = K_{n,m}.
            CHECK((k.transpose() * k - ComplexMatrix::Identity(m * n, m * n)).norm() == 0.0);
            CHECK((k.transpose() - commutation_matrix(n, m)).norm() == 0.0);
        }
        CHECK_THROWS_AS(commutation_matrix(0, 2), std::invalid_argument);
    }

    TEST_CASE("kron product matches the entrywise definition and commutes via K")
    {
        Engine rng(12);
        const ComplexMatrix a = random_matrix(2, 3, rng);
        const ComplexMatrix b = random_matrix(4, 2, rng);
        const ComplexMatrix k = kron_product(a, b);
        REQUIRE(k.rows() == 8);
        REQUIRE(k.cols() == 6);
        for (Index i = 0; i < 2; ++i)
            for (Index j = 0; j < 3; ++j)
                for (Index p = 0; p < 4; ++p)
                    for (Index q = 0; q < 2; ++q)
                        CHECK(std::abs(k(i * 4 + p, j * 2 + q) - a(i, j) * b(p, q)) < 1e-14);
        // K_{p,m} (A kron B) K_{n,q} = B kron A for A m x n, B p x q.
        const ComplexMatrix lhs = commutation_matrix(4, 2) * k * commutation_matrix(3, 2);
        CHECK(relative_frobenius(lhs, kron_product(b, a)) < 1e-14);
        // vec(A X B) = (B^T kron A) vec(X)
        const ComplexMatrix x = random_matrix(3, 4, rng);
        const ComplexMatrix c = random_matrix(4, 2, rng);
        CHECK((vec(a * x * c) - kron_product(c.transpose(), a) * vec(x)).norm() < 1e-12);
    }

    TEST_CASE("hadamard product rejects shape mismatch")
    {
        ComplexMatrix a = ComplexMatrix::Constant(2, 2, Complex(2, 1));
        CHECK(hadamard_product(a, a)(1, 0) == Complex(2, 1) * Complex(2, 1));
        CHECK_THROWS_AS(hadamard_product(a, ComplexMatrix::Ones(2, 3)), std::invalid_argument);
    }

    TEST_CASE("hermitian_eig reconstructs, sorts and fixes phases")
    {
        Engine rng(13);
        for (int trial = 0; trial < 20; ++trial)
        {
            const ComplexMatrix g = random_matrix(5, 5, rng);
            const ComplexMatrix a = hermitian_part(g);
            const HermitianEig e = hermitian_eig(a);
            for (Index k = 0; k + 1 < 5; ++k)
                CHECK(e.eigenvalues(k) >= e.eigenvalues(k + 1));
            for (Index k = 0; k < 5; ++k)
            {
                const ComplexVector v = e.eigenvectors.col(k);
                CHECK((a * v - e.eigenvalues(k) * v).norm() < 1e-10);
                Index arg = 0;
                v.cwiseAbs().maxCoeff(&arg);
                CHECK(std::abs(v(arg).imag()) < 1e-12);
                CHECK(v(arg).real() > 0.0);
            }
            const ComplexMatrix back = e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() *
                                       e.eigenvectors.adjoint();
            CHECK(relative_frobenius(back, a) < 1e-12);
        }
    }

    TEST_CASE("hermitian_eig is deterministic on repeated eigenvalues")
    {
        const HermitianEig e = hermitian_eig(ComplexMatrix::Identity(3, 3));
        CHECK((e.eigenvectors - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
        ComplexMatrix d = ComplexMatrix::Zero(3, 3);
        d(2, 2) = 1.0;
        d(1, 1) = 1.0;
        const HermitianEig f = hermitian_eig(d);
        CHECK(std::abs(f.eigenvectors(1, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(f.eigenvectors(2, 1)) == doctest::Approx(1.0));
    }

    TEST_CASE("hermitian_eig rejects non-Hermitian and non-square input")
    {
        ComplexMatrix a(2, 2);
        a << 1, 2, 0, 1;
        CHECK_THROWS_AS(hermitian_eig(a), std::invalid_argument);
        CHECK_THROWS_AS(hermitian_eig(ComplexMatrix::Ones(2, 3)), std::invalid_argument);
    }

    TEST_CASE("psd_sqrt squares back and rejects indefinite input")
    {
        Engine rng(14);
        const ComplexMatrix a = random_psd(4, 2, rng);
        const ComplexMatrix s = psd_sqrt(a);
        CHECK(relative_frobenius(s * s, a) < 1e-10);
        CHECK((s - s.adjoint()).norm() < 1e-14);
        CHECK(hermitian_eig(s).eigenvalues.minCoeff() >= 0.0);

        ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
        bad(1, 1) = -0.5;
        CHECK_THROWS_AS(psd_sqrt(bad), NotPsdError);

        ComplexMatrix tiny = ComplexMatrix::Identity(2, 2);
        tiny(1, 1) = -1e-13;
        CHECK(std::abs(psd_sqrt(tiny)(1, 1)) == 0.0);
    }

    TEST_CASE("numerical_rank")
    {
        Engine rng(15);
        CHECK(numerical_rank(ComplexMatrix::Zero(3, 3), 1e-10) == 0);
        CHECK(numerical_rank(random_psd(6, 2, rng), 1e-10) == 2);
        CHECK(numerical_rank(random_psd(6, 6, rng), 1e-10) == 6);
    }

    TEST_CASE("clamp_negative_eigenvalues only removes tiny negatives")
    {
        ComplexMatrix a = ComplexMatrix::Zero(3, 3);
        a(0, 0) = 2.0;
        a(1, 1) = -1e-14;
        a(2, 2) = -1.0;
        const RealVector ev = hermitian_eig(clamp_negative_eigenvalues(a, 1e-12)).eigenvalues;
        CHECK(ev(0) == doctest::Approx(2.0));
        CHECK(ev(1) == 0.0);
        CHECK(ev(2) == doctest::Approx(-1.0));
    }
}
