#include "trimode/model.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace trimode {

Matrix6 drift_matrix(const SystemParams& p, const SteadyState& s) {
    const DerivedRates r = derive_rates(p);
    // both bilinear couplings enter in the symmetric dimensionless form
    // sqrt(2)*coupling*alpha_s (mirror with +, atoms with - on the x row)
    const double g_m = std::sqrt(2.0) * p.chi * s.alpha_s;
    const double g_a = std::sqrt(2.0) * p.zeta * s.alpha_s;

    Matrix6 K = Matrix6::Zero();
    K(0, 0) = -r.kappa;
    K(0, 1) = p.detuning;
    K(1, 0) = -p.detuning;
    K(1, 1) = -r.kappa;
    K(1, 2) = g_m;
    K(1, 4) = -g_a;
    K(2, 3) = p.omega_m;
    K(3, 0) = g_m;
    K(3, 2) = -p.omega_m;
    K(3, 3) = -r.gamma;
    K(4, 5) = p.Omega;
    K(5, 0) = -g_a;
    K(5, 4) = -p.Omega;
    return K;
}

Matrix6 drift_matrix(const SystemParams& p) {
    return drift_matrix(p, steady_state(p));
}

Matrix6 diffusion_matrix(const SystemParams& p) {
    const DerivedRates r = derive_rates(p);
    Matrix6 D = Matrix6::Zero();
    D(0, 0) = r.kappa;
    D(1, 1) = r.kappa;
    D(3, 3) = r.gamma * (2.0 * r.n_bar + 1.0);
    return D;
}

StabilityReport stability(const Matrix6& K) {
    if (!K.allFinite()) {
        throw std::invalid_argument("drift matrix has non-finite entries");
    }
    Eigen::EigenSolver<Matrix6> es(K, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eigensolver failed to converge on the drift matrix");
    }
    const double max_re = es.eigenvalues().real().maxCoeff();
    // scale-aware dead band: an undamped mode sits numerically at Re ~ 0 and
    // must not be declared stable by round-off luck
    const double tol = 1e-12 * std::max(1.0, K.cwiseAbs().rowwise().sum().maxCoeff());
    StabilityReport rep;
    rep.max_re = max_re;
    rep.margin = -max_re;
    rep.stable = max_re < -tol;
    return rep;
}

} // namespace trimode
