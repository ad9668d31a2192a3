#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimode/model.hpp"

namespace trimode {

// single-mode labels in covariance order
enum class Mode { C = 0, M = 1, A = 2 };

// the six bipartitions of the three-mode state; pairwise labels act on the
// 4x4 reduction, one-vs-two labels on the full 6x6
enum class Bipartition { AC, MC, AM, A_MC, M_AC, C_AM };

std::string to_string(Mode m);
std::string to_string(Bipartition b);

// E <= 1e-9 counts as separable throughout (far above solver residual noise,
// far below physical values)
inline constexpr double entanglement_threshold = 1e-9;

// rows/columns of V for the selected modes, order preserved; throws on empty
Eigen::MatrixXd reduced_covariance(const Matrix6& V, const std::vector<Mode>& modes);

// momentum-sign flip (phase-space partial transpose) on the listed modes of a
// 2n x 2n covariance; mode indices count within the given matrix
Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& V, const std::vector<int>& modes);

// moduli of the eigenvalues of i*Omega_sym*V, collapsed to n values, ascending
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& V);

// two-mode closed form via symplectic invariants:
// nu^2 = (Dtilde +/- sqrt(Dtilde^2 - 4 det V))/2, Dtilde = det A + det B + 2 det C
std::array<double, 2> two_mode_symplectic(const Eigen::Matrix4d& V);

// every symplectic eigenvalue >= 1/2 - tol (vacuum variance 1/2 convention)
bool is_physical(const Eigen::MatrixXd& V, double tol = 1e-9);

// E = max(0, -ln(2 nu_min)) after transposing the label's single-mode side
double log_negativity(const Matrix6& V, Bipartition label);

// same measure for a standalone two-mode covariance (second mode transposed)
double log_negativity_two_mode(const Eigen::Matrix4d& V);

// one full-state analysis; field names match the JSON serialization
struct EntanglementReport {
    double e_ac = 0, e_mc = 0, e_am = 0;          // pairwise
    double e_a_mc = 0, e_m_ac = 0, e_c_am = 0;    // one-vs-two
    double g_tri_proxy = 0;
    std::string tripartite_class;
    double stability_margin = 0;
    bool stable = true;  // false => all E fields are NaN and serialize as null
};

// classification by the pattern of inseparable one-vs-two bipartitions
std::string classify_tripartite(double e_a_mc, double e_m_ac, double e_c_am);

// residual tripartite proxy: max(0, min over permutations (i|jk) of
// E_i|jk^2 - E_ij^2 - E_ik^2); zero whenever some one-vs-two cut is separable
double residual_tripartite(const EntanglementReport& r);

EntanglementReport analyze(const Matrix6& V, double stability_margin);

// JSON object with fixed keys e_ac, e_mc, e_am, e_a_mc, e_m_ac, e_c_am,
// g_tri_proxy, tripartite_class, stability_margin (nulls when not stable)
std::string report_to_json(const EntanglementReport& r);

} // namespace trimode
