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
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace polmimo
{

using Complex = std::complex<double>;
using Index = Eigen::Index;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted non-increasing and column k of `eigenvectors` pairs with
/// eigenvalue k. The output is deterministic: each eigenvector is phase-fixed so its
/// largest-magnitude entry is real and non-negative, and eigenvectors of equal
/// eigenvalues are ordered by descending lexicographic comparison of their absolute
/// entries.
struct HermitianEig
{
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Column-wise stacking. Eigen storage is column-major, so this is a reshape.
ComplexVector vec(const ComplexMatrix &a);

/// Inverse of vec(): unvec(vec(A), rows, cols) == A exactly.
ComplexMatrix unvec(const ComplexVector &v, Index rows, Index cols);

/// The mn x mn permutation K with K vec(A) = vec(A^T) for every m x n matrix A.
ComplexMatrix commutation_matrix(Index m, Index n);

ComplexMatrix kron_product(const ComplexMatrix &a, const ComplexMatrix &b);

ComplexMatrix hadamard_product(const ComplexMatrix &a, const ComplexMatrix &b);

/// (A + A^H) / 2
ComplexMatrix hermitian_part(const ComplexMatrix &a);

/// ||a - b||_F / ||b||_F; falls back to ||a - b||_F when b is zero.
double relative_frobenius(const ComplexMatrix &a, const ComplexMatrix &b);

/// Throws std::invalid_argument for non-square input or when
/// ||A - A^H||_F > 1e-10 ||A||_F. The decomposition runs on hermitian_part(a).
HermitianEig hermitian_eig(const ComplexMatrix &a);

/// Unique Hermitian PSD square root. Eigenvalues down to -1e-10 tr(a) are treated as
/// zero; anything more negative raises NotPsdError.
ComplexMatrix psd_sqrt(const ComplexMatrix &a);

/// Number of eigenvalues strictly above rel_tol times the largest one. Zero matrix -> 0.
Index numerical_rank(const ComplexMatrix &a, double rel_tol);

/// Projects tiny negative eigenvalues (above -floor) to zero; leaves the rest untouched.
ComplexMatrix clamp_negative_eigenvalues(const ComplexMatrix &a, double floor);

} // namespace polmimo
