#include "trimode/probe.hpp"

#include <cmath>
#include <stdexcept>

#include "trimode/entanglement.hpp"
#include "trimode/langevin.hpp"

namespace trimode {

namespace {

// the -i in the adiabatic output relation is a fixed quarter-turn in phase
// space; the homodyne reconstruction undoes it
const Eigen::Matrix2d& quarter_turn() {
    static const Eigen::Matrix2d r = (Eigen::Matrix2d() << 0.0, 1.0, -1.0, 0.0).finished();
    return r;
}

} // namespace

double probe_steady(const ProbeParams& p) {
    if (!(p.kappa_p > 0.0)) {
        throw std::invalid_argument("kappa_p must be strictly positive");
    }
    return p.eta_p * p.eta_p / (p.delta_p_tilde * p.delta_p_tilde + p.kappa_p * p.kappa_p);
}

ProbeFlags probe_flags(const ProbeParams& p, const SystemParams& sys) {
    const double alpha_p = std::sqrt(probe_steady(p));
    const double alpha_s = steady_state(sys).alpha_s;

    ProbeFlags f;
    f.detuning_matched = std::abs(p.delta_p_tilde - sys.Omega) <= 1e-9 * sys.Omega;
    f.fast_atom_vs_decay = sys.Omega >= 10.0 * p.kappa_p;
    f.fast_atom_vs_drive = sys.Omega >= 10.0 * p.zeta_p * alpha_p;
    f.weak_vs_atom = p.zeta_p <= 0.1 * sys.Omega;
    f.weak_vs_coupling = p.zeta_p <= 0.1 * sys.zeta;
    f.weak_vs_pump = alpha_p <= 0.1 * alpha_s;
    f.adiabatic_ok = f.detuning_matched && f.fast_atom_vs_decay && f.fast_atom_vs_drive;
    f.all_ok = f.adiabatic_ok && f.weak_vs_atom && f.weak_vs_coupling && f.weak_vs_pump;
    return f;
}

ReadoutMap make_readout_map(const ProbeParams& p) {
    if (!(p.tau_m > 0.0)) {
        throw std::invalid_argument("tau_m must be strictly positive");
    }
    const double alpha_p = std::sqrt(probe_steady(p));
    ReadoutMap map;
    map.gain = p.zeta_p * alpha_p * std::sqrt(p.tau_m / p.kappa_p);
    return map;
}

Eigen::Matrix4d apply_readout_map(const Matrix6& V, const ReadoutMap& map) {
    if (!(map.gain >= 0.0)) {
        throw std::invalid_argument("readout gain must be non-negative");
    }
    const Eigen::Matrix2d& r = quarter_turn();
    const Eigen::Matrix2d v_cc = V.topLeftCorner<2, 2>();
    const Eigen::Matrix2d v_ca = V.block<2, 2>(0, 4);
    const Eigen::Matrix2d v_aa = V.block<2, 2>(4, 4);

    Eigen::Matrix4d out;
    out.topLeftCorner<2, 2>() = v_cc;
    out.bottomRightCorner<2, 2>() =
        map.gain * map.gain * r * v_aa * r.transpose() + 0.5 * Eigen::Matrix2d::Identity();
    out.topRightCorner<2, 2>() = map.gain * v_ca * r.transpose();
    out.bottomLeftCorner<2, 2>() = out.topRightCorner<2, 2>().transpose();
    return out;
}

InferenceResult infer_ac_entanglement(const Eigen::Matrix4d& measured, const ReadoutMap& map) {
    if (!(map.gain > 0.0)) {
        throw std::invalid_argument("inference needs a strictly positive calibrated gain");
    }
    const Eigen::Matrix2d& r = quarter_turn();
    const double g2 = map.gain * map.gain;

    // invert the linear map: strip the vacuum floor, unscale, unrotate
    const Eigen::Matrix2d probe_block =
        measured.bottomRightCorner<2, 2>() - 0.5 * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d v_aa = r.transpose() * (probe_block / g2) * r;
    const Eigen::Matrix2d v_ca = (measured.topRightCorner<2, 2>() / map.gain) * r;

    Eigen::Matrix4d v_rec;
    v_rec.topLeftCorner<2, 2>() = measured.topLeftCorner<2, 2>();
    v_rec.bottomRightCorner<2, 2>() = v_aa;
    v_rec.topRightCorner<2, 2>() = v_ca;
    v_rec.bottomLeftCorner<2, 2>() = v_ca.transpose();
    v_rec = (0.5 * (v_rec + v_rec.transpose())).eval();

    InferenceResult res;
    res.nu_min = two_mode_symplectic(v_rec)[0];
    res.physical = res.nu_min >= 0.5 - 1e-9;
    res.e_inferred = log_negativity_two_mode(v_rec);
    return res;
}

ProbeParams default_probe_for(const SystemParams& sys) {
    const SteadyState s = steady_state(sys);
    ProbeParams p;
    p.delta_p_tilde = sys.Omega;
    p.kappa_p = sys.Omega / 20.0;
    p.zeta_p = 0.08 * sys.zeta;
    // size the pump for alpha_p = 0.05 alpha_s
    p.eta_p = 0.05 * s.alpha_s *
              std::sqrt(p.delta_p_tilde * p.delta_p_tilde + p.kappa_p * p.kappa_p);
    p.tau_m = 3e-3;
    return p;
}

InferenceResult infer_from_records(const std::string& record_path, const ReadoutMap& map) {
    const RecordFile rec = read_records(record_path);
    if (rec.dim != 6) {
        throw std::invalid_argument("record file does not hold six-quadrature states");
    }
    const std::uint64_t n = rec.n_trajectories * rec.records_per_trajectory;
    if (n < 2) {
        throw std::invalid_argument("record file holds too few samples");
    }

    // empirical second moments of the recorded states (the stationary mean is
    // subtracted, as a measurement post-processing step would)
    Vector6 mean = Vector6::Zero();
    for (std::uint64_t k = 0; k < n; ++k) {
        mean += Eigen::Map<const Vector6>(rec.payload.data() + k * 6);
    }
    mean /= static_cast<double>(n);
    Matrix6 second = Matrix6::Zero();
    for (std::uint64_t k = 0; k < n; ++k) {
        const Vector6 v = Eigen::Map<const Vector6>(rec.payload.data() + k * 6) - mean;
        second.noalias() += v * v.transpose();
    }
    second /= static_cast<double>(n);

    const Eigen::Matrix4d measured = apply_readout_map(second, map);
    return infer_ac_entanglement(measured, map);
}

} // namespace trimode
