#pragma once

#include <string>

#include <Eigen/Dense>

#include "trimode/model.hpp"
#include "trimode/params.hpp"

namespace trimode {

// Weak auxiliary probe beam coupled to the Bogoliubov mode. In the adiabatic
// regime (probe detuned to delta_p_tilde = Omega, with Omega much faster than
// kappa_p and the probe coupling) the atomic quadratures are imprinted on the
// probe output, up to a fixed 90-degree phase-space rotation and vacuum noise.
struct ProbeParams {
    double kappa_p = 0;        // probe cavity decay, rad/s
    double zeta_p = 0;         // probe-Bogoliubov coupling, 1/s
    double eta_p = 0;          // probe pump strength, 1/s
    double delta_p_tilde = 0;  // effective probe detuning, rad/s
    double tau_m = 3e-3;       // detected temporal-mode duration, s (gain normalization)
};

// validity checks behind the adiabatic output map; each "much greater" is
// tested as a ratio >= 10, each "much less" as a ratio <= 0.1
struct ProbeFlags {
    bool detuning_matched;   // delta_p_tilde = Omega (relative 1e-9)
    bool fast_atom_vs_decay; // Omega >= 10 kappa_p
    bool fast_atom_vs_drive; // Omega >= 10 zeta_p*alpha_p
    bool weak_vs_atom;       // zeta_p <= 0.1 Omega
    bool weak_vs_coupling;   // zeta_p <= 0.1 zeta
    bool weak_vs_pump;       // alpha_p <= 0.1 alpha_s
    bool adiabatic_ok;       // first three
    bool all_ok;             // all six
};

// steady probe intensity |alpha_p|^2 = eta_p^2/(delta_p_tilde^2 + kappa_p^2)
double probe_steady(const ProbeParams& p);

ProbeFlags probe_flags(const ProbeParams& p, const SystemParams& sys);

// single detected temporal mode: output quadratures =
// gain * R * (atom quadratures) + independent vacuum, R = 90-degree rotation
struct ReadoutMap {
    double gain = 0;  // dimensionless: zeta_p*alpha_p*sqrt(tau_m/kappa_p)
};

ReadoutMap make_readout_map(const ProbeParams& p);

// measured covariance of (cavity C, probe output), 4x4: the atom block maps to
// gain^2 R V_AA R^T + (1/2) I, the C-A cross block scales by gain
Eigen::Matrix4d apply_readout_map(const Matrix6& V, const ReadoutMap& map);

struct InferenceResult {
    double e_inferred = 0;  // log-negativity of the reconstructed (C, A) state
    bool physical = true;   // reconstruction passes the symplectic physicality check
    double nu_min = 0;      // smallest symplectic eigenvalue of the reconstruction
};

// exact linear inversion of the readout map followed by the entanglement
// computation; a non-physical reconstruction is reported through the flags
// (calibration-error diagnostic), never silently accepted
InferenceResult infer_ac_entanglement(const Eigen::Matrix4d& measured, const ReadoutMap& map);

// defaults satisfying every validity flag at the given operating point:
// kappa_p = Omega/20, delta_p_tilde = Omega, zeta_p = 0.08 zeta,
// eta_p sized for alpha_p = 0.05 alpha_s
ProbeParams default_probe_for(const SystemParams& sys);

// finite-sample path: empirical second moments from a simulator record file,
// pushed through the forward map and inverted
InferenceResult infer_from_records(const std::string& record_path, const ReadoutMap& map);

} // namespace trimode
