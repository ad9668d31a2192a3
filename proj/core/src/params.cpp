#include "trimode/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "trimode/constants.hpp"

namespace trimode {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(field) + " must be strictly positive and finite");
    }
}

void require_non_negative(double v, const char* field) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(field) + " must be non-negative and finite");
    }
}

} // namespace

void validate(const SystemParams& p) {
    require_positive(p.omega_m, "omega_m");
    require_positive(p.Omega, "Omega");
    require_positive(p.mass, "mass");
    require_positive(p.quality, "quality");
    require_positive(p.finesse, "finesse");
    require_positive(p.cavity_length, "cavity_length");
    require_non_negative(p.pump_power, "pump_power");
    require_positive(p.laser_wavelength, "laser_wavelength");
    require_positive(p.temperature, "temperature");
    if (!std::isfinite(p.detuning)) {
        throw std::invalid_argument("detuning must be finite");
    }
    require_non_negative(p.chi, "chi");
    require_non_negative(p.zeta, "zeta");
}

DerivedRates derive_rates(const SystemParams& p) {
    validate(p);
    DerivedRates r;
    r.kappa = pi * c_light / (2.0 * p.cavity_length * p.finesse);
    r.gamma = p.omega_m / p.quality;
    const double omega_l = two_pi * c_light / p.laser_wavelength;
    r.eta = std::sqrt(2.0 * r.kappa * p.pump_power / (hbar * omega_l));
    // Bose factor; expm1 keeps the deep-quantum limit (hbar*omega >> kT) exact
    r.n_bar = 1.0 / std::expm1(hbar * p.omega_m / (k_boltzmann * p.temperature));
    return r;
}

SteadyState steady_state(const SystemParams& p) {
    const DerivedRates r = derive_rates(p);
    SteadyState s;
    s.alpha_s_sq = r.eta * r.eta / (p.detuning * p.detuning + r.kappa * r.kappa);
    s.alpha_s = std::sqrt(s.alpha_s_sq);  // global phase fixed: real positive amplitude
    s.q_s_scaled = std::sqrt(2.0) * p.chi * s.alpha_s_sq / p.omega_m;
    s.Q_s = -p.zeta * s.alpha_s_sq / p.Omega;
    return s;
}

bool back_action_small(const SystemParams& p) {
    const DerivedRates r = derive_rates(p);
    const SteadyState s = steady_state(p);
    const double drive = std::sqrt(2.0) * std::max(p.chi, p.zeta) * s.alpha_s;
    return drive <= 0.5 * r.kappa;
}

std::vector<std::string> parameter_warnings(const SystemParams& p) {
    std::vector<std::string> warnings;
    const DerivedRates r = derive_rates(p);
    const SteadyState s = steady_state(p);

    const double chi_drive = std::sqrt(2.0) * p.chi * s.alpha_s;
    const double zeta_drive = std::sqrt(2.0) * p.zeta * s.alpha_s;
    if (std::max(chi_drive, zeta_drive) > 0.5 * r.kappa) {
        std::ostringstream os;
        os << "back-action not small: sqrt(2)*coupling*alpha_s = "
           << std::max(chi_drive, zeta_drive) << " rad/s exceeds kappa/2 = "
           << 0.5 * r.kappa << " rad/s; the linearized model is unreliable here";
        warnings.push_back(os.str());
    }
    return warnings;
}

} // namespace trimode
