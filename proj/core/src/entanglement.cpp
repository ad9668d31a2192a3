#include "trimode/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include <nlohmann/json.hpp>

namespace trimode {

std::string to_string(Mode m) {
    switch (m) {
        case Mode::C: return "C";
        case Mode::M: return "M";
        case Mode::A: return "A";
    }
    return "?";
}

std::string to_string(Bipartition b) {
    switch (b) {
        case Bipartition::AC: return "AC";
        case Bipartition::MC: return "MC";
        case Bipartition::AM: return "AM";
        case Bipartition::A_MC: return "A|MC";
        case Bipartition::M_AC: return "M|AC";
        case Bipartition::C_AM: return "C|AM";
    }
    return "?";
}

Eigen::MatrixXd reduced_covariance(const Matrix6& V, const std::vector<Mode>& modes) {
    if (modes.empty()) {
        throw std::invalid_argument("reduced_covariance: empty mode subset");
    }
    std::vector<int> idx;
    idx.reserve(2 * modes.size());
    for (Mode m : modes) {
        idx.push_back(2 * static_cast<int>(m));
        idx.push_back(2 * static_cast<int>(m) + 1);
    }
    Eigen::MatrixXd r(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = V(idx[i], idx[j]);
        }
    }
    return r;
}

Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& V, const std::vector<int>& modes) {
    const Eigen::Index n_modes = V.rows() / 2;
    Eigen::MatrixXd out = V;
    for (int m : modes) {
        if (m < 0 || m >= n_modes) {
            throw std::invalid_argument("partial_transpose: mode index out of range");
        }
        out.row(2 * m + 1) *= -1.0;
        out.col(2 * m + 1) *= -1.0;
    }
    return out;
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& V) {
    const Eigen::Index dim = V.rows();
    if (V.cols() != dim || dim % 2 != 0) {
        throw std::invalid_argument("symplectic_eigenvalues: need an even-dimensional square matrix");
    }
    if (!V.isApprox(V.transpose(), 1e-10)) {
        throw std::invalid_argument("symplectic_eigenvalues: matrix is not symmetric");
    }
    const Eigen::Index n = dim / 2;

    // Omega_sym * V has eigenvalues +/- i*nu_k; the moduli come in pairs
    Eigen::MatrixXd omega_v = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index m = 0; m < n; ++m) {
        omega_v.row(2 * m) = V.row(2 * m + 1);
        omega_v.row(2 * m + 1) = -V.row(2 * m);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(omega_v, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("symplectic_eigenvalues: eigensolver failed");
    }
    std::vector<double> mods(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
        mods[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()(i));
    }
    std::sort(mods.begin(), mods.end());
    std::vector<double> nus(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        nus[static_cast<std::size_t>(i)] = 0.5 * (mods[static_cast<std::size_t>(2 * i)] +
                                                  mods[static_cast<std::size_t>(2 * i + 1)]);
    }
    return nus;
}

std::array<double, 2> two_mode_symplectic(const Eigen::Matrix4d& V) {
    const Eigen::Matrix2d a = V.topLeftCorner<2, 2>();
    const Eigen::Matrix2d b = V.bottomRightCorner<2, 2>();
    const Eigen::Matrix2d c = V.topRightCorner<2, 2>();
    const double delta = a.determinant() + b.determinant() + 2.0 * c.determinant();
    const double det_v = V.determinant();
    const double disc = std::max(0.0, delta * delta - 4.0 * det_v);
    const double root = std::sqrt(disc);
    const double lo = std::sqrt(std::max(0.0, 0.5 * (delta - root)));
    const double hi = std::sqrt(std::max(0.0, 0.5 * (delta + root)));
    return {lo, hi};
}

bool is_physical(const Eigen::MatrixXd& V, double tol) {
    for (double nu : symplectic_eigenvalues(V)) {
        if (nu < 0.5 - tol) return false;
    }
    return true;
}

namespace {

double neg_from_nu(double nu_min) {
    return std::max(0.0, -std::log(2.0 * nu_min));
}

double pair_negativity(const Matrix6& V, Mode first, Mode second) {
    const Eigen::Matrix4d r = reduced_covariance(V, {first, second});
    const Eigen::Matrix4d pt = partial_transpose(r, {1});
    return neg_from_nu(two_mode_symplectic(pt)[0]);
}

double one_vs_two_negativity(const Matrix6& V, Mode single) {
    const Eigen::MatrixXd pt = partial_transpose(V, {static_cast<int>(single)});
    return neg_from_nu(symplectic_eigenvalues(pt).front());
}

} // namespace

double log_negativity_two_mode(const Eigen::Matrix4d& V) {
    const Eigen::Matrix4d pt = partial_transpose(V, {1});
    return neg_from_nu(two_mode_symplectic(pt)[0]);
}

double log_negativity(const Matrix6& V, Bipartition label) {
    switch (label) {
        case Bipartition::AC: return pair_negativity(V, Mode::C, Mode::A);
        case Bipartition::MC: return pair_negativity(V, Mode::C, Mode::M);
        case Bipartition::AM: return pair_negativity(V, Mode::M, Mode::A);
        case Bipartition::A_MC: return one_vs_two_negativity(V, Mode::A);
        case Bipartition::M_AC: return one_vs_two_negativity(V, Mode::M);
        case Bipartition::C_AM: return one_vs_two_negativity(V, Mode::C);
    }
    throw std::invalid_argument("log_negativity: unknown bipartition");
}

std::string classify_tripartite(double e_a_mc, double e_m_ac, double e_c_am) {
    const int inseparable = (e_a_mc > entanglement_threshold) +
                            (e_m_ac > entanglement_threshold) +
                            (e_c_am > entanglement_threshold);
    switch (inseparable) {
        case 3: return "fully-inseparable";
        case 2: return "two-mode-biseparable";
        case 1: return "one-mode-biseparable";
        default: return "fully-separable";
    }
}

double residual_tripartite(const EntanglementReport& r) {
    // focus mode minus its two pairwise couplings, squared measures; any
    // separable one-vs-two cut drives its term non-positive, so the clamp
    // enforces the monogamy-style zero automatically
    const double about_a = r.e_a_mc * r.e_a_mc - r.e_am * r.e_am - r.e_ac * r.e_ac;
    const double about_m = r.e_m_ac * r.e_m_ac - r.e_am * r.e_am - r.e_mc * r.e_mc;
    const double about_c = r.e_c_am * r.e_c_am - r.e_ac * r.e_ac - r.e_mc * r.e_mc;
    return std::max(0.0, std::min({about_a, about_m, about_c}));
}

EntanglementReport analyze(const Matrix6& V, double stability_margin) {
    EntanglementReport rep;
    rep.e_ac = log_negativity(V, Bipartition::AC);
    rep.e_mc = log_negativity(V, Bipartition::MC);
    rep.e_am = log_negativity(V, Bipartition::AM);
    rep.e_a_mc = log_negativity(V, Bipartition::A_MC);
    rep.e_m_ac = log_negativity(V, Bipartition::M_AC);
    rep.e_c_am = log_negativity(V, Bipartition::C_AM);
    rep.g_tri_proxy = residual_tripartite(rep);
    rep.tripartite_class = classify_tripartite(rep.e_a_mc, rep.e_m_ac, rep.e_c_am);
    rep.stability_margin = stability_margin;
    rep.stable = true;
    return rep;
}

std::string report_to_json(const EntanglementReport& r) {
    nlohmann::json j;
    auto put = [&](const char* key, double v) {
        if (std::isnan(v)) {
            j[key] = nullptr;
        } else {
            j[key] = v;
        }
    };
    put("e_ac", r.e_ac);
    put("e_mc", r.e_mc);
    put("e_am", r.e_am);
    put("e_a_mc", r.e_a_mc);
    put("e_m_ac", r.e_m_ac);
    put("e_c_am", r.e_c_am);
    put("g_tri_proxy", r.g_tri_proxy);
    if (r.tripartite_class.empty()) {
        j["tripartite_class"] = nullptr;
    } else {
        j["tripartite_class"] = r.tripartite_class;
    }
    j["stability_margin"] = r.stability_margin;
    j["stable"] = r.stable;
    return j.dump();
}

} // namespace trimode
