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
#include "polmimo/mi_engine.hpp"

#include "polmimo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polmimo
{

std::string_view policy_name(PowerPolicy p)
{
    switch (p)
    {
    case PowerPolicy::Waterfill:
        return "waterfill";
    case PowerPolicy::Equal:
        return "equal";
    case PowerPolicy::SingleStream:
        return "single";
    case PowerPolicy::Fixed:
        return "fixed";
    }
    return "?";
}

PowerPolicy parse_policy(std::string_view name)
{
    if (name == "waterfill")
        return PowerPolicy::Waterfill;
    if (name == "equal")
        return PowerPolicy::Equal;
    if (name == "single" || name == "single_stream")
        return PowerPolicy::SingleStream;
    if (name == "fixed")
        return PowerPolicy::Fixed;
    throw std::invalid_argument("unknown power policy '" + std::string(name) + "'");
}

namespace
{

constexpr double kLog2e = std::numbers::log2e;

void check_rho(double rho)
{
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("SNR must be finite and non-negative");
}

RealVector waterfill(const RealVector &lambda, Index eligible, double rho)
{
    RealVector p = RealVector::Zero(lambda.size());
    if (rho == 0.0)
    {
        p.head(eligible).setConstant(1.0 / static_cast<double>(eligible));
        return p;
    }
    for (Index m = eligible; m >= 1; --m)
    {
        double inv_sum = 0.0;
        for (Index k = 0; k < m; ++k)
            inv_sum += 1.0 / (rho * lambda(k));
        const double mu = (1.0 + inv_sum) / static_cast<double>(m);
        if (mu - 1.0 / (rho * lambda(m - 1)) > 0.0 || m == 1)
        {
            for (Index k = 0; k < m; ++k)
                p(k) = mu - 1.0 / (rho * lambda(k));
            break;
        }
    }
    return p;
}

// log2 det(I + a) for Hermitian PSD a, via its eigenvalues.
double log2det_identity_plus(const ComplexMatrix &a)
{
    const RealVector ev = hermitian_eig(hermitian_part(a)).eigenvalues;
    double s = 0.0;
    for (Index k = 0; k < ev.size(); ++k)
        s += std::log1p(std::max(ev(k), 0.0));
    return s * kLog2e;
}

void check_design(const InputDesign &design, Index n_tx)
{
    if (design.q.rows() != n_tx || design.q.cols() != n_tx)
        throw std::invalid_argument("input covariance does not match N_TX = " + std::to_string(n_tx));
}

} // namespace

InputDesign design_input(const ComplexMatrix &r_tx, double rho, PowerPolicy policy, Index n_streams,
                         const RealVector &fixed_powers)
{
    check_rho(rho);
    const Index n = r_tx.rows();
    if (r_tx.cols() != n || n < 1)
        throw std::invalid_argument("design_input: R_TX must be square and non-empty");
    const HermitianEig eig = hermitian_eig(r_tx.conjugate());
    const double top = eig.eigenvalues(0);
    if (!(top > 0.0))
        throw DegenerateInputError("design_input: transmit correlation is zero");
    if (eig.eigenvalues.minCoeff() < -1e-10 * std::max(r_tx.trace().real(), 0.0))
        throw NotPsdError("design_input: transmit correlation is not positive semidefinite");

    InputDesign d;
    d.policy = policy;
    d.eigenbasis = eig.eigenvectors;
    d.lambda_tx = eig.eigenvalues.cwiseMax(0.0);

    Index eligible = (d.lambda_tx.array() > 1e-12 * top).count();
    switch (policy)
    {
    case PowerPolicy::Waterfill:
        if (n_streams > 0)
            eligible = std::min(eligible, n_streams);
        d.powers = waterfill(d.lambda_tx, eligible, rho);
        break;
    case PowerPolicy::Equal:
        if (n_streams < 1 || n_streams > n)
            throw std::invalid_argument("design_input: equal policy needs 1 <= n_streams <= N_TX");
        d.powers = RealVector::Zero(n);
        d.powers.head(n_streams).setConstant(1.0 / static_cast<double>(n_streams));
        break;
    case PowerPolicy::SingleStream:
        d.powers = RealVector::Zero(n);
        d.powers(0) = 1.0;
        break;
    case PowerPolicy::Fixed:
        if (fixed_powers.size() != n || (fixed_powers.array() < 0.0).any() ||
            std::abs(fixed_powers.sum() - 1.0) > 1e-10)
            throw std::invalid_argument("design_input: fixed powers must be N_TX non-negative values summing to 1");
        d.powers = fixed_powers;
        break;
    }
    d.n_streams = (d.powers.array() > 0.0).count();
    d.q = hermitian_part(d.eigenbasis * d.powers.cast<Complex>().asDiagonal() * d.eigenbasis.adjoint());
    return d;
}

MiEstimate mi_exact(const SnapshotSet &snapshots, const InputDesign &design, double rho, bool tx_side)
{
    check_rho(rho);
    snapshots.validate();
    check_design(design, snapshots.layout.n_tx());
    const std::size_t count = snapshots.size();
    if (count == 0)
        throw std::invalid_argument("mi_exact: empty snapshot set");

    const Index n_rx = snapshots.layout.n_rx(), n_tx = snapshots.layout.n_tx();
    const ComplexMatrix q_root = psd_sqrt(design.q);
    double sum = 0.0, sum_sq = 0.0;
    ComplexMatrix w;
    for (const ComplexMatrix &h : snapshots.snapshots)
    {
        // The RX-sided argument I + rho H Q H^H is Hermitian PD; the TX-sided
        // I + rho H^H H Q is not Hermitian, so it is symmetrized as
        // I + rho Q^{1/2} H^H H Q^{1/2}, which has the same determinant.
        if (tx_side)
        {
            const ComplexMatrix hq = h * q_root;
            w = ComplexMatrix::Identity(n_tx, n_tx) + rho * (hq.adjoint() * hq);
        }
        else
            w = ComplexMatrix::Identity(n_rx, n_rx) + rho * (h * design.q * h.adjoint());
        Eigen::LLT<ComplexMatrix> llt(hermitian_part(w));
        if (llt.info() != Eigen::Success)
            throw NumericalError("mi_exact: determinant argument is not positive definite");
        double v = 0.0;
        const auto &l = llt.matrixLLT();
        for (Index k = 0; k < l.rows(); ++k)
            v += 2.0 * std::log(l(k, k).real());
        v *= kLog2e;
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(count);
    MiEstimate out;
    out.bits = sum / n;
    const double var = count > 1 ? std::max(sum_sq / n - out.bits * out.bits, 0.0) * n / (n - 1.0) : 0.0;
    out.std_error = std::sqrt(var / n);
    if (!std::isfinite(out.bits))
        throw NumericalError("mi_exact: non-finite result");
    return out;
}

double mi_jensen(const ComplexMatrix &r_tx, const InputDesign &design, double rho)
{
    check_rho(rho);
    check_design(design, r_tx.rows());
    const ComplexMatrix q_root = psd_sqrt(design.q);
    return log2det_identity_plus(rho * (q_root * r_tx.conjugate() * q_root));
}

FourthMomentZ z_empirical(const SnapshotSet &snapshots, const ComplexMatrix &r_tx)
{
    snapshots.validate();
    const Index n_tx = snapshots.layout.n_tx();
    if (r_tx.rows() != n_tx || r_tx.cols() != n_tx)
        throw std::invalid_argument("z_empirical: R_TX does not match the layout");
    if (snapshots.size() == 0)
        throw std::invalid_argument("z_empirical: empty snapshot set");
    const ComplexMatrix centre = r_tx.conjugate();
    ComplexMatrix z = ComplexMatrix::Zero(n_tx * n_tx, n_tx * n_tx);
    for (const ComplexMatrix &h : snapshots.snapshots)
    {
        const ComplexVector d = vec(h.adjoint() * h - centre);
        z.noalias() += d * d.adjoint();
    }
    return {hermitian_part(z / static_cast<double>(snapshots.size()))};
}

FourthMomentZ z_model(const ComplexMatrix &r_bar, const ComplexMatrix &r_tilde, Index n_tx, Index n_rx)
{
    const Index n = n_tx * n_rx;
    if (n_tx < 1 || n_rx < 1 || r_bar.rows() != n || r_bar.cols() != n || r_tilde.rows() != n ||
        r_tilde.cols() != n)
        throw std::invalid_argument("z_model: matrices must be (N_TX N_RX) square");

    // Y: N_TX x N_RX grid of blocks I_{N_TX} kron X_{k,l}, each N_TX^2 x N_TX N_RX, with
    // [X_{k,l}]_{p,q} = [R_tilde]_{k N_RX + l, p N_RX + q} (0-based).
    const Index br = n_tx * n_tx, bc = n_tx * n_rx;
    ComplexMatrix y = ComplexMatrix::Zero(n_tx * br, n_rx * bc);
    ComplexMatrix x(n_tx, n_rx);
    const ComplexMatrix eye = ComplexMatrix::Identity(n_tx, n_tx);
    for (Index k = 0; k < n_tx; ++k)
        for (Index l = 0; l < n_rx; ++l)
        {
            for (Index p = 0; p < n_tx; ++p)
                for (Index q = 0; q < n_rx; ++q)
                    x(p, q) = r_tilde(k * n_rx + l, p * n_rx + q);
            y.block(k * br, l * bc, br, bc) = kron_product(eye, x);
        }

    // (I_{N_TX} kron Y) vec(A) applies Y to consecutive chunks of vec(A).
    auto apply = [&](const ComplexMatrix &yy, const ComplexVector &v)
    {
        const Index in = yy.cols(), outn = yy.rows();
        ComplexVector r(n_tx * outn);
        for (Index c = 0; c < n_tx; ++c)
            r.segment(c * outn, outn) = yy * v.segment(c * in, in);
        return r;
    };
    const ComplexMatrix r = r_bar + r_tilde;
    const ComplexVector first = apply(y, vec(r));
    const ComplexVector second_raw = apply(y.conjugate(), vec(r_bar.conjugate()));
    // (K kron K) vec(B) = vec(K B K^T).
    const ComplexMatrix k = commutation_matrix(n_tx, n_tx);
    const ComplexMatrix b = unvec(second_raw, br, br);
    const ComplexMatrix z = unvec(first, br, br) + k * b * k.transpose();
    return {hermitian_part(z)};
}

double mi_approx(double rho, const InputDesign &design, const ComplexMatrix &r_tx, const FourthMomentZ &z)
{
    check_rho(rho);
    const Index n = r_tx.rows();
    check_design(design, n);
    if (z.z.rows() != n * n || z.z.cols() != n * n)
        throw std::invalid_argument("mi_approx: Z must be N_TX^2 square");
    const double jensen = mi_jensen(r_tx, design, rho);
    if (rho == 0.0)
        return jensen;
    const ComplexMatrix a = ComplexMatrix::Identity(n, n) + rho * r_tx.conjugate() * design.q;
    const ComplexMatrix m = design.q * a.partialPivLu().inverse();
    const Complex tr = (z.z * kron_product(m.transpose(), m)).trace();
    return jensen - kLog2e * rho * rho / 2.0 * tr.real();
}

double lower_bound_penalty(const InputDesign &design, const FourthMomentZ &z, Index n_streams)
{
    const Index n = design.eigenbasis.rows();
    if (z.z.rows() != n * n || z.z.cols() != n * n)
        throw std::invalid_argument("lower_bound_penalty: Z must be N_TX^2 square");
    if (n_streams < 1 || n_streams > n)
        throw std::invalid_argument("lower_bound_penalty: n_streams must lie in 1..N_TX");
    for (Index k = 0; k < n_streams; ++k)
        if (!(design.lambda_tx(k) > 0.0))
            throw std::invalid_argument("lower_bound_penalty: active stream " + std::to_string(k + 1) +
                                        " has a zero transmit eigenvalue");
    const ComplexMatrix &u = design.eigenbasis;
    const ComplexMatrix rot = kron_product(u.transpose(), u.adjoint()) * z.z * kron_product(u.conjugate(), u);
    double w = 0.0;
    for (Index k = 0; k < n_streams; ++k)
        for (Index l = 0; l < n_streams; ++l)
            w += rot(k * n + l, k * n + l).real() / (2.0 * design.lambda_tx(k) * design.lambda_tx(l));
    return w;
}

double mi_lower_bound(double rho, const InputDesign &design, const ComplexMatrix &r_tx, const FourthMomentZ &z,
                      Index n_streams)
{
    const double w = lower_bound_penalty(design, z, n_streams);
    return mi_jensen(r_tx, design, rho) - kLog2e * w;
}

} // namespace polmimo
