#pragma once

#include <string>
#include <vector>

#include "trimode/constants.hpp"

namespace trimode {

// Physical inputs of the three-mode model: a driven cavity (C) coupled to a
// mechanical mirror (M) by radiation pressure and to an atomic Bogoliubov
// mode (A) by the cavity lattice potential. All frequencies in rad/s.
//
// Defaults give the standard working point used throughout the tests and
// presets: omega_m = Omega = 2pi*3 MHz, detuning = 2*omega_m, chi = zeta =
// 100/s, 50 mW pump, finesse 1e4, 1 mm cavity, 50 ng mirror, T = 10 uK.
struct SystemParams {
    double omega_m = two_pi * 3e6;         // mechanical angular frequency, rad/s
    double Omega = two_pi * 3e6;           // Bogoliubov-mode angular frequency, rad/s
    double mass = 50e-12;                  // effective mirror mass, kg
    double quality = 3e4;                  // mechanical quality factor (gamma = omega_m/quality)
    double finesse = 1e4;                  // cavity finesse
    double cavity_length = 1e-3;           // m
    double pump_power = 50e-3;             // W
    double laser_wavelength = 780e-9;      // m (sets omega_L)
    double detuning = two_pi * 6e6;        // effective cavity detuning Delta, rad/s
    double chi = 100.0;                    // scaled mirror-cavity coupling, 1/s
    double zeta = 100.0;                   // BEC-cavity coupling, 1/s
    double temperature = 10e-6;            // bath temperature, K
};

// rates derived from the raw inputs
struct DerivedRates {
    double kappa;  // cavity amplitude decay, rad/s: pi*c/(2*L*F)
    double gamma;  // mechanical damping, rad/s: omega_m/quality
    double eta;    // pump strength, 1/s: sqrt(2*kappa*P/(hbar*omega_L))
    double n_bar;  // thermal occupation of the mirror bath
};

// classical fixed point of the deterministic flow, dimensionless quadrature units
struct SteadyState {
    double alpha_s_sq;  // intracavity photon number |alpha_s|^2
    double alpha_s;     // field amplitude, chosen real positive
    double q_s_scaled;  // mirror displacement in zero-point units: sqrt(2)*chi*|alpha_s|^2/omega_m
    double Q_s;         // Bogoliubov displacement: -zeta*|alpha_s|^2/Omega
};

// throws std::invalid_argument naming the offending field
void validate(const SystemParams& p);

DerivedRates derive_rates(const SystemParams& p);
SteadyState steady_state(const SystemParams& p);

// the linearization assumes the coupling-induced back-action on the cavity is
// small; this is the quantitative form of that assumption
bool back_action_small(const SystemParams& p);

// human-readable advisories (back-action, resolved-sideband, ...); empty when
// the point sits comfortably inside the model's validity region
std::vector<std::string> parameter_warnings(const SystemParams& p);

} // namespace trimode
