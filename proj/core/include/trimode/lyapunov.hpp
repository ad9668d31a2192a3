#pragma once

#include <string>

#include <Eigen/Dense>

#include "trimode/model.hpp"

namespace trimode {

// Solves K V + V K^T = -D for the stationary covariance V.
//
// K must be strictly Hurwitz; a marginal or unstable K throws
// std::domain_error("no stationary state"). The solve vectorizes the
// equation into an n^2 x n^2 Kronecker-sum system, runs one step of
// iterative refinement, and symmetrizes the result. The certified residual
// bound ||K V + V K^T + D||_F <= 1e-10 * max(1, ||D||_F) is checked; a
// violation throws std::runtime_error.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& K, const Eigen::MatrixXd& D);

// fixed-size convenience for the three-mode system
Matrix6 solve_lyapunov(const Matrix6& K, const Matrix6& D);

// ||K V + V K^T + D||_F
double lyapunov_residual(const Eigen::MatrixXd& K, const Eigen::MatrixXd& D,
                         const Eigen::MatrixXd& V);

// plain-text round trip used for oracle comparison and caching:
// first line "rows cols", then row-major entries at 17 significant digits
std::string matrix_to_text(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_text(const std::string& text);

} // namespace trimode
