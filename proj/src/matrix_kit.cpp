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
#include "polmimo/matrix_kit.hpp"

#include "polmimo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace polmimo
{

ComplexVector vec(const ComplexMatrix &a)
{
    return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

ComplexMatrix unvec(const ComplexVector &v, Index rows, Index cols)
{
    if (rows < 0 || cols < 0 || rows * cols != v.size())
        throw std::invalid_argument("unvec: length " + std::to_string(v.size()) + " does not match " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix commutation_matrix(Index m, Index n)
{
    if (m < 1 || n < 1)
        throw std::invalid_argument("commutation_matrix: dimensions must be positive");
    ComplexMatrix k = ComplexMatrix::Zero(m * n, m * n);
    // A(i,j) sits at i + j*m in vec(A) and at j + i*n in vec(A^T).
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            k(j + i * n, i + j * m) = 1.0;
    return k;
}

ComplexMatrix kron_product(const ComplexMatrix &a, const ComplexMatrix &b)
{
    const Index br = b.rows(), bc = b.cols();
    ComplexMatrix out(a.rows() * br, a.cols() * bc);
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    return out;
}

ComplexMatrix hadamard_product(const ComplexMatrix &a, const ComplexMatrix &b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("hadamard_product: shape mismatch");
    return a.cwiseProduct(b);
}

ComplexMatrix hermitian_part(const ComplexMatrix &a)
{
    return 0.5 * (a + a.adjoint());
}

double relative_frobenius(const ComplexMatrix &a, const ComplexMatrix &b)
{
    const double diff = (a - b).norm();
    const double ref = b.norm();
    return ref > 0.0 ? diff / ref : diff;
}

namespace
{

// Descending lexicographic order on absolute entries, with a small tolerance so that
// entries equal up to rounding compare equal.
bool abs_lex_greater(const ComplexVector &x, const ComplexVector &y)
{
    for (Index i = 0; i < x.size(); ++i)
    {
        const double ax = std::abs(x(i)), ay = std::abs(y(i));
        if (std::abs(ax - ay) > 1e-12 * std::max({1.0, ax, ay}))
            return ax > ay;
    }
    return false;
}

void fix_phase(Eigen::Ref<ComplexVector> v)
{
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < v.size(); ++i)
    {
        const double m = std::abs(v(i));
        if (m > best_abs * (1.0 + 1e-12))
        {
            best_abs = m;
            best = i;
        }
    }
    if (best_abs > 0.0)
        v *= std::conj(v(best)) / best_abs;
}

} // namespace

HermitianEig hermitian_eig(const ComplexMatrix &a)
{
    if (a.rows() != a.cols())
        throw std::invalid_argument("hermitian_eig: matrix is not square");
    const double scale = a.norm();
    if ((a - a.adjoint()).norm() > 1e-10 * scale)
        throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");

    const Index n = a.rows();
    HermitianEig out;
    if (n == 0)
        return out;

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_eig: eigensolver did not converge");

    // Eigen returns ascending order.
    RealVector values = solver.eigenvalues().reverse();
    ComplexMatrix vectors = solver.eigenvectors().rowwise().reverse();
    for (Index k = 0; k < n; ++k)
        fix_phase(vectors.col(k));

    const double tie_tol = 1e-12 * std::max(std::abs(values(0)), std::abs(values(n - 1)));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    Index start = 0;
    while (start < n)
    {
        Index stop = start + 1;
        while (stop < n && std::abs(values(stop) - values(start)) <= tie_tol)
            ++stop;
        if (stop - start > 1)
            std::stable_sort(order.begin() + start, order.begin() + stop, [&](Index x, Index y)
                             { return abs_lex_greater(vectors.col(x), vectors.col(y)); });
        start = stop;
    }

    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Index k = 0; k < n; ++k)
    {
        out.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
        out.eigenvectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

ComplexMatrix psd_sqrt(const ComplexMatrix &a)
{
    const HermitianEig eig = hermitian_eig(a);
    if (eig.eigenvalues.size() == 0)
        return ComplexMatrix(0, 0);
    const double trace = a.diagonal().real().sum();
    const double min_eig = eig.eigenvalues.minCoeff();
    if (min_eig < -1e-10 * std::max(trace, 0.0))
        throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(min_eig) +
                          " is significantly negative (trace " + std::to_string(trace) + ")");
    const RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return hermitian_part(eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint());
}

Index numerical_rank(const ComplexMatrix &a, double rel_tol)
{
    const HermitianEig eig = hermitian_eig(a);
    if (eig.eigenvalues.size() == 0)
        return 0;
    const double largest = eig.eigenvalues(0);
    if (!(largest > 0.0))
        return 0;
    return (eig.eigenvalues.array() > rel_tol * largest).count();
}

ComplexMatrix clamp_negative_eigenvalues(const ComplexMatrix &a, double floor)
{
    const HermitianEig eig = hermitian_eig(a);
    if (eig.eigenvalues.size() == 0 || eig.eigenvalues.minCoeff() >= 0.0)
        return hermitian_part(a);
    RealVector values = eig.eigenvalues;
    for (Index k = 0; k < values.size(); ++k)
        if (values(k) < 0.0 && values(k) >= -floor)
            values(k) = 0.0;
    return hermitian_part(eig.eigenvectors * values.asDiagonal() * eig.eigenvectors.adjoint());
}

} // namespace polmimo
