#include <doctest.h>

#include <trimode/entanglement.hpp>
#include <trimode/langevin.hpp>
#include <trimode/lyapunov.hpp>
#include <trimode/model.hpp>
#include <trimode/params.hpp>
#include <trimode/probe.hpp>

#include <cmath>
#include <filesystem>
#include <stdexcept>

using namespace trimode;

namespace {

SystemParams base() { return SystemParams{}; }

Matrix6 default_covariance() {
    const SystemParams p{};
    return solve_lyapunov(drift_matrix(p), diffusion_matrix(p));
}

} // namespace

TEST_CASE("probe steady intensity") {
    ProbeParams p;
    p.kappa_p = 2e6;
    p.delta_p_tilde = 0.0;
    p.eta_p = 3e9;
    CHECK(probe_steady(p) == doctest::Approx(2.25e6).epsilon(1e-14));

    p.delta_p_tilde = 1.5e6;
    const double expect = 9e18 / (1.5e6 * 1.5e6 + 2e6 * 2e6);
    CHECK(probe_steady(p) == doctest::Approx(expect).epsilon(1e-14));

    p.eta_p = 0.0;
    CHECK(probe_steady(p) == 0.0);

    p.kappa_p = 0.0;
    CHECK_THROWS_AS(probe_steady(p), std::invalid_argument);
}

TEST_CASE("default probe satisfies every validity flag") {
    const auto sys = base();
    const auto probe = default_probe_for(sys);

    CHECK(probe.kappa_p == doctest::Approx(sys.Omega / 20.0).epsilon(1e-14));
    CHECK(probe.delta_p_tilde == doctest::Approx(sys.Omega).epsilon(1e-14));
    CHECK(probe.zeta_p == doctest::Approx(0.08 * sys.zeta).epsilon(1e-14));
    const double alpha_p = std::sqrt(probe_steady(probe));
    const double alpha_s = steady_state(sys).alpha_s;
    CHECK(alpha_p == doctest::Approx(0.05 * alpha_s).epsilon(1e-9));

    const auto flags = probe_flags(probe, sys);
    CHECK(flags.detuning_matched);
    CHECK(flags.fast_atom_vs_decay);
    CHECK(flags.fast_atom_vs_drive);
    CHECK(flags.weak_vs_atom);
    CHECK(flags.weak_vs_coupling);
    CHECK(flags.weak_vs_pump);
    CHECK(flags.adiabatic_ok);
    CHECK(flags.all_ok);
}

TEST_CASE("validity flags flip when their conditions are violated") {
    const auto sys = base();
    auto probe = default_probe_for(sys);

    auto p = probe;
    p.delta_p_tilde = 0.9 * sys.Omega;
    CHECK_FALSE(probe_flags(p, sys).detuning_matched);
    CHECK_FALSE(probe_flags(p, sys).all_ok);

    p = probe;
    p.kappa_p = sys.Omega / 5.0; // ratio 5 < 10
    CHECK_FALSE(probe_flags(p, sys).fast_atom_vs_decay);
    CHECK_FALSE(probe_flags(p, sys).adiabatic_ok);

    p = probe;
    p.zeta_p = 0.5 * sys.zeta; // > 0.1 zeta
    CHECK_FALSE(probe_flags(p, sys).weak_vs_coupling);

    p = probe;
    p.eta_p *= 10.0; // alpha_p > 0.1 alpha_s
    CHECK_FALSE(probe_flags(p, sys).weak_vs_pump);
}

TEST_CASE("readout gain formula") {
    ProbeParams p;
    p.kappa_p = 4e6;
    p.zeta_p = 8.0;
    p.eta_p = 1e10;
    p.delta_p_tilde = 3e6;
    p.tau_m = 2e-3;

    const double alpha_p = std::sqrt(probe_steady(p));
    const auto map = make_readout_map(p);
    CHECK(map.gain ==
          doctest::Approx(p.zeta_p * alpha_p * std::sqrt(p.tau_m / p.kappa_p))
              .epsilon(1e-14));

    p.tau_m = 0.0;
    CHECK_THROWS_AS(make_readout_map(p), std::invalid_argument);
}

TEST_CASE("forward map structure") {
    const Matrix6 V = default_covariance();

    ReadoutMap map;
    map.gain = 0.0;
    const Eigen::Matrix4d dark = apply_readout_map(V, map);
    // Zero gain: nothing but probe vacuum in the output block, no cross
    // correlations, and the bare cavity block untouched.
    CHECK((dark.topLeftCorner<2, 2>() -
           reduced_covariance(V, {Mode::C}))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((dark.bottomRightCorner<2, 2>() - 0.5 * Eigen::Matrix2d::Identity())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(dark.topRightCorner<2, 2>().cwiseAbs().maxCoeff() == 0.0);

    map.gain = 1.7;
    const Eigen::Matrix4d out = apply_readout_map(V, map);
    // The output block carries the rotated atom covariance plus vacuum.
    Eigen::Matrix2d R;
    R << 0.0, 1.0, -1.0, 0.0;
    const Eigen::Matrix2d vaa = V.bottomRightCorner<2, 2>();
    const Eigen::Matrix2d expect_bb =
        map.gain * map.gain * R * vaa * R.transpose() +
        0.5 * Eigen::Matrix2d::Identity();
    CHECK((out.bottomRightCorner<2, 2>() - expect_bb).cwiseAbs().maxCoeff() <=
          1e-14);
    const Eigen::Matrix2d cross = V.block<2, 2>(0, 4);
    CHECK((out.topRightCorner<2, 2>() - map.gain * cross * R.transpose())
              .cwiseAbs()
              .maxCoeff() <= 1e-14);

    // Measured state of a physical input is physical (vacuum noise added).
    CHECK(is_physical(out));
}

TEST_CASE("inference inverts the readout exactly") {
    const Matrix6 V = default_covariance();
    const double e_ac = log_negativity(V, Bipartition::AC);

    for (double gain : {0.3, 1.0, 1.6087, 4.0}) {
        CAPTURE(gain);
        ReadoutMap map{gain};
        const Eigen::Matrix4d measured = apply_readout_map(V, map);
        const auto inf = infer_ac_entanglement(measured, map);
        CHECK(inf.physical);
        CHECK(std::abs(inf.e_inferred - e_ac) <= 1e-12);
        CHECK(inf.nu_min >= 0.5 - 1e-9);
    }

    ReadoutMap zero{0.0};
    CHECK_THROWS_AS(
        infer_ac_entanglement(apply_readout_map(V, zero), zero),
        std::invalid_argument);
}

TEST_CASE("vacuum input infers no entanglement") {
    const Matrix6 vac = 0.5 * Matrix6::Identity();
    ReadoutMap map{1.3};
    const auto inf = infer_ac_entanglement(apply_readout_map(vac, map), map);
    CHECK(inf.physical);
    CHECK(inf.e_inferred == 0.0);
    CHECK(inf.nu_min == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gain mis-calibration is exposed, not absorbed") {
    const Matrix6 V = default_covariance();
    const double e_ac = log_negativity(V, Bipartition::AC);

    const auto probe = default_probe_for(base());
    const auto map = make_readout_map(probe);
    const Eigen::Matrix4d measured = apply_readout_map(V, map);

    // Invert with a gain 10% off the truth: the vacuum subtraction is then
    // wrong, and the result must differ visibly from the true value (here it
    // lands at roughly twice E_AC) and/or fail the physicality check.
    ReadoutMap wrong{map.gain * 1.1};
    const auto inf = infer_ac_entanglement(measured, wrong);
    const bool honest = !inf.physical ||
                        std::abs(inf.e_inferred - e_ac) > 0.5 * e_ac;
    CHECK(honest);

    ReadoutMap wrong_low{map.gain * 0.9};
    const auto inf2 = infer_ac_entanglement(measured, wrong_low);
    const bool honest2 = !inf2.physical ||
                         std::abs(inf2.e_inferred - e_ac) > 0.5 * e_ac;
    CHECK(honest2);
}

TEST_CASE("detected state is less entangled than the source") {
    // The probe output is the atom quadratures seen through loss and added
    // vacuum, so the measured (C, output) state can never beat the true
    // (C, A) entanglement, and more gain can only help.
    const Matrix6 V = default_covariance();
    const double e_ac = log_negativity(V, Bipartition::AC);

    double prev = -1.0;
    for (double gain : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        CAPTURE(gain);
        ReadoutMap map{gain};
        const double e_meas =
            log_negativity_two_mode(apply_readout_map(V, map));
        CHECK(e_meas < e_ac);
        CHECK(e_meas >= prev - 1e-12);
        prev = e_meas;
    }
}

TEST_CASE("inference from simulated records") {
    namespace fs = std::filesystem;
    const auto path =
        (fs::temp_directory_path() / "trimode_probe_records.bin").string();

    const auto p = base();
    const auto r = derive_rates(p);
    const double fastest =
        std::max({r.kappa, p.omega_m, p.Omega, std::abs(p.detuning)});

    SimConfig c;
    c.dt = 0.05 / fastest;
    c.burn_in_steps = 20000;
    c.sample_steps = 60000;
    c.n_trajectories = 100;
    c.rng_seed = 2026;
    c.record_stride = 200;
    c.record_path = path;

    (void)simulate(p, c);

    const auto probe = default_probe_for(p);
    const auto map = make_readout_map(probe);
    const auto inf = infer_from_records(path, map);
    fs::remove(path);

    // Small run: only a loose statistical agreement is expected, but the
    // reconstruction must be finite and within a factor-level band of the
    // true value rather than garbage.
    const double e_ac =
        log_negativity(default_covariance(), Bipartition::AC);
    CHECK(std::isfinite(inf.e_inferred));
    CHECK(inf.e_inferred > 0.0);
    CHECK(std::abs(inf.e_inferred - e_ac) <= 0.75 * e_ac);

    CHECK_THROWS_AS(infer_from_records(path, map), std::runtime_error);
}
