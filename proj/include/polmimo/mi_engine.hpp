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

#include "polmimo/channel_model.hpp"

#include <string_view>
#include <vector>

namespace polmimo
{

enum class PowerPolicy
{
    Waterfill,
    Equal,
    SingleStream,
    Fixed
};

std::string_view policy_name(PowerPolicy p);
PowerPolicy parse_policy(std::string_view name);

/// Transmit covariance Q = U diag(powers) U^H with U the eigenvectors of conj(R_TX).
struct InputDesign
{
    ComplexMatrix q;
    Index n_streams = 0;
    PowerPolicy policy = PowerPolicy::Waterfill;
    ComplexMatrix eigenbasis; ///< U_TX, columns ordered by descending lambda_tx
    RealVector powers;        ///< lambda_Q per column of eigenbasis
    RealVector lambda_tx;     ///< eigenvalues of conj(R_TX), descending
};

/// n_streams caps the number of water-filled directions when positive and sets the
/// stream count for the equal policy. `fixed_powers` is read only by PowerPolicy::Fixed
/// and must be non-negative with unit sum. Throws DegenerateInputError for R_TX = 0.
InputDesign design_input(const ComplexMatrix &r_tx, double rho, PowerPolicy policy, Index n_streams,
                         const RealVector &fixed_powers = {});

/// Mean and standard error, in bits.
struct MiEstimate
{
    double bits = 0.0;
    double std_error = 0.0;
};

/// Sample mean of log2 det(I + rho H Q H^H). With tx_side the N_TX-sided form
/// log2 det(I + rho H^H H Q) is evaluated instead; both agree to rounding.
MiEstimate mi_exact(const SnapshotSet &snapshots, const InputDesign &design, double rho, bool tx_side = false);

/// log2 det(I + rho conj(R_TX) Q)
double mi_jensen(const ComplexMatrix &r_tx, const InputDesign &design, double rho);

/// E{vec(H^H H - conj(R_TX)) vec(.)^H}, the N_TX^2 x N_TX^2 fourth-moment matrix.
struct FourthMomentZ
{
    ComplexMatrix z;
};

FourthMomentZ z_empirical(const SnapshotSet &snapshots, const ComplexMatrix &r_tx);

/// Z from the dominant/scatter split, valid when dominant power is co-polarized only.
FourthMomentZ z_model(const ComplexMatrix &r_bar, const ComplexMatrix &r_tilde, Index n_tx, Index n_rx);

/// Second-order expansion of the MI around the Jensen term.
double mi_approx(double rho, const InputDesign &design, const ComplexMatrix &r_tx, const FourthMomentZ &z);

/// Correction w of the high-SNR lower bound over the first n_streams eigen-directions
/// of the design; in nats.
double lower_bound_penalty(const InputDesign &design, const FourthMomentZ &z, Index n_streams);

/// mi_jensen - log2(e) w. Throws std::invalid_argument if an active stream has a zero
/// transmit eigenvalue.
double mi_lower_bound(double rho, const InputDesign &design, const ComplexMatrix &r_tx, const FourthMomentZ &z,
                      Index n_streams);

} // namespace polmimo
