#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimode/model.hpp"

namespace trimode {

// Ensemble integration of the linear Langevin system; the independent,
// brute-force check on the Lyapunov solution.
struct SimConfig {
    double dt = 0.0;                   // step, s; must satisfy dt <= 0.05/max(kappa, omega_m, Omega, |Delta|)
    std::uint64_t burn_in_steps = 0;   // discarded before sampling
    std::uint64_t sample_steps = 0;    // averaged per trajectory
    int n_trajectories = 0;            // independent runs (>= 2; >= 100 for oracle use)
    std::uint64_t rng_seed = 0;        // master seed; per-trajectory streams derive from (seed, index)
    int n_threads = 0;                 // 0 = hardware concurrency
    std::uint64_t record_stride = 0;   // if > 0 with record_path set, dump every k-th sampled state
    std::string record_path;           // binary quadrature record file (see record format below)
};

struct TrajectoryStats {
    Vector6 mean = Vector6::Zero();            // ensemble average of the time-averaged state
    Matrix6 cov = Matrix6::Zero();             // ensemble average of time-averaged second moments
    Matrix6 std_error = Matrix6::Zero();       // SE of each cov entry from trajectory-to-trajectory scatter
    Vector6 mean_std_error = Vector6::Zero();  // SE of each mean entry
    std::uint64_t effective_samples = 0;       // independent units behind the errors (= n_trajectories)
};

// One-step propagator of the exact discrete-time solution of the linear SDE
// over dt: phi ->  phi_op * phi + noise_l * xi with xi ~ N(0, I).
// phi_op = exp(K dt); noise_l is a symmetric factor of
// Q(dt) = integral_0^dt exp(K s) D exp(K^T s) ds, computed via the block
// matrix exponential of [[-K, D], [0, K^T]] dt. The stationary covariance of
// this recursion is exactly the Lyapunov solution of (K, D) at any dt.
struct StepOperator {
    Matrix6 phi;      // deterministic one-step map
    Matrix6 noise_l;  // noise injection factor, noise_l * noise_l^T = Q(dt)
};

StepOperator discrete_step_operator(const Matrix6& K, const Matrix6& D, double dt);

// integrates the physical system; refuses unstable K (std::domain_error) and
// invalid configs (std::invalid_argument); mid-run divergence of the state
// norm aborts with std::runtime_error carrying a diagnostic
TrajectoryStats simulate(const SystemParams& p, const SimConfig& c);

// same engine for an arbitrary (K, D) pair (used by regularized test setups);
// dt_limit is computed from the spectral content of K alone
TrajectoryStats simulate_system(const Matrix6& K, const Matrix6& D, const SimConfig& c);

// per-entry z-scores of the empirical covariance against a reference V
struct DeviationReport {
    Matrix6 z = Matrix6::Zero();
    double max_abs_z = 0;
    bool pass = false;
};

DeviationReport compare(const TrajectoryStats& stats, const Matrix6& V, double z_threshold = 5.0);

// Binary quadrature record format (little-endian throughout):
//   magic "TMRC", u32 version, u32 dim, u64 n_trajectories,
//   u64 records_per_trajectory, f64 record_dt, then
//   n_trajectories * records_per_trajectory * dim f64 payload,
//   trajectory-major, each record one state vector.
struct RecordFile {
    std::uint32_t dim = 0;
    std::uint64_t n_trajectories = 0;
    std::uint64_t records_per_trajectory = 0;
    double record_dt = 0;
    std::vector<double> payload;  // n_traj * records_per_traj * dim values
};

RecordFile read_records(const std::string& path);

} // namespace trimode
