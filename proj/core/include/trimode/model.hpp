#pragma once

#include <Eigen/Dense>

#include "trimode/params.hpp"

namespace trimode {

// quadrature ordering throughout: (dx, dy, dq, dp, dQ, dP)
// index pairs: cavity C = (0,1), mirror M = (2,3), atoms A = (4,5)
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

// drift matrix K of the linearized Langevin system d(phi)/dt = K phi + noise
Matrix6 drift_matrix(const SystemParams& p, const SteadyState& s);
Matrix6 drift_matrix(const SystemParams& p);  // computes the steady state itself

// diffusion matrix D = diag(kappa, kappa, 0, gamma*(2*n_bar+1), 0, 0)
Matrix6 diffusion_matrix(const SystemParams& p);

struct StabilityReport {
    bool stable;     // true iff every eigenvalue real part < 0 (Hurwitz)
    double margin;   // -max Re(lambda); positive when stable, ~0 when marginal
    double max_re;   // max Re(lambda) as computed
};

// Hurwitz test with a scale-aware tolerance: eigenvalues with
// |Re| <= 1e-12*max(1, ||K||_inf) count as marginal, not stable.
StabilityReport stability(const Matrix6& K);

} // namespace trimode
