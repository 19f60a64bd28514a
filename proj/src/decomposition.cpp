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
#include "polmimo/decomposition.hpp"

#include "polmimo/errors.hpp"
#include "polmimo/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polmimo
{

ComplexMatrix dominant_square(const SecondOrderStats &stats)
{
    const Index n = stats.r.rows();
    if (stats.r.cols() != n || stats.t.rows() != n || stats.t.cols() != n)
        throw std::invalid_argument("dominant_square: R and T must be square of equal size");
    return hermitian_part(stats.r * stats.r.trace() + stats.r * stats.r - stats.t);
}

namespace
{

// Largest admissible weight along u that keeps `rest - c u u^H` PSD, capped at `cap`.
double admissible_weight(const ComplexMatrix &rest, const ComplexVector &u, double cap)
{
    if (!(cap > 0.0))
        return 0.0;
    const HermitianEig eig = hermitian_eig(rest);
    const double trace = std::max(rest.diagonal().real().sum(), 0.0);
    if (trace <= 0.0)
        return 0.0;
    const double singular_tol = 1e-12 * trace;
    const RealVector &lam = eig.eigenvalues;
    const ComplexMatrix &v = eig.eigenvectors;
    const ComplexVector coords = v.adjoint() * u;

    if (lam.minCoeff() > singular_tol)
    {
        double quad = 0.0;
        for (Index i = 0; i < lam.size(); ++i)
            quad += std::norm(coords(i)) / lam(i);
        return std::min(cap, 1.0 / quad);
    }

    // Singular: a pseudo-inverse is valid only when u lies in the range space.
    double outside = 0.0, quad = 0.0;
    for (Index i = 0; i < lam.size(); ++i)
    {
        if (lam(i) > singular_tol)
            quad += std::norm(coords(i)) / lam(i);
        else
            outside += std::norm(coords(i));
    }
    if (std::sqrt(outside) > 1e-8 || !(quad > 0.0))
        return 0.0;
    return std::min(cap, 1.0 / quad);
}

} // namespace

DecompositionResult decompose(const SecondOrderStats &stats, Index n_dp, LayoutMode mode)
{
    if (mode == LayoutMode::SP)
        n_dp = 1;
    else if (n_dp < 1 || n_dp > 4)
        throw std::invalid_argument("decompose: n_dp must lie in 1..4 for DP, got " + std::to_string(n_dp));
    const Index n = stats.r.rows();
    if (stats.r.cols() != n || n < 1)
        throw std::invalid_argument("decompose: R must be square and non-empty");
    n_dp = std::min(n_dp, n);

    const HermitianEig sq = hermitian_eig(dominant_square(stats));
    DecompositionResult out;
    out.n_dp = n_dp;
    out.coefficients = RealVector::Zero(n_dp);
    out.raw_eigenvalues.resize(n_dp);
    out.eigenvectors.reserve(static_cast<std::size_t>(n_dp));

    const ComplexMatrix r = hermitian_part(stats.r);
    ComplexMatrix rest = r;
    for (Index k = 0; k < n_dp; ++k)
    {
        const double mu = sq.eigenvalues(k);
        out.raw_eigenvalues(k) = mu >= 0.0 ? std::sqrt(mu) : -std::sqrt(-mu);
        const ComplexVector u = sq.eigenvectors.col(k);
        const double c = admissible_weight(rest, u, std::sqrt(std::max(mu, 0.0)));
        out.coefficients(k) = c;
        out.eigenvectors.push_back(u);
        rest -= c * (u * u.adjoint());
        rest = hermitian_part(rest);
    }

    out.r_bar = ComplexMatrix::Zero(n, n);
    for (Index k = 0; k < n_dp; ++k)
        out.r_bar += out.coefficients(k) * (out.eigenvectors[static_cast<std::size_t>(k)] *
                                             out.eigenvectors[static_cast<std::size_t>(k)].adjoint());
    out.r_bar = hermitian_part(out.r_bar);
    const double floor = 1e-12 * std::max(r.diagonal().real().sum(), 0.0);
    out.r_tilde = clamp_negative_eigenvalues(r - out.r_bar, floor);
    return out;
}

PairKFactors decomposition_kfactors(const DecompositionResult &result, const PolarizationLayout &layout)
{
    return kfactors_from_split(result.r_bar, result.r_tilde, layout);
}

SnapshotSet regenerate(const DecompositionResult &result, const PolarizationLayout &layout, Index count,
                       std::uint64_t seed)
{
    const Index n = layout.n_links();
    if (result.r_tilde.rows() != n || result.r_bar.rows() != n)
        throw std::invalid_argument("regenerate: decomposition does not match the layout");
    if (count < 0)
        throw std::invalid_argument("regenerate: count must be non-negative");
    if (static_cast<Index>(result.eigenvectors.size()) != result.coefficients.size())
        throw std::invalid_argument("regenerate: coefficient and eigenvector counts differ");

    const ComplexMatrix root = psd_sqrt(result.r_tilde);
    std::vector<ComplexVector> dominant;
    for (std::size_t k = 0; k < result.eigenvectors.size(); ++k)
        dominant.push_back(std::sqrt(std::max(result.coefficients(static_cast<Index>(k)), 0.0)) *
                           result.eigenvectors[k]);

    SnapshotSet out{layout, count, 1, {}};
    out.snapshots.reserve(static_cast<std::size_t>(count));
    const double component_sd = std::sqrt(0.5);
    ComplexVector g(n), h(n);
    for (Index t = 0; t < count; ++t)
    {
        Engine engine = make_engine(seed, {static_cast<std::uint64_t>(t), 0});
        std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
        std::normal_distribution<double> normal(0.0, component_sd);
        h.setZero();
        for (const ComplexVector &d : dominant)
            h += d * std::polar(1.0, phase(engine));
        for (Index i = 0; i < n; ++i)
        {
            const double re = normal(engine);
            const double im = normal(engine);
            g(i) = Complex(re, im);
        }
        h.noalias() += root * g;
        out.snapshots.push_back(unvec(h, layout.n_rx(), layout.n_tx()));
    }
    return out;
}

} // namespace polmimo
