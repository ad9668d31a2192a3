#include "trimode/lyapunov.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace trimode {

namespace {

// vec(X) with column-major stacking, matching kron(I,K)+kron(K,I) below
Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index n) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
}

// A = I (x) K + K (x) I, so that A vec(V) = vec(K V + V K^T)
Eigen::MatrixXd kronecker_sum(const Eigen::MatrixXd& K) {
    const Eigen::Index n = K.rows();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        A.block(j * n, j * n, n, n) += K;  // I (x) K
        for (Eigen::Index i = 0; i < n; ++i) {
            A.block(j * n, i * n, n, n).diagonal().array() += K(j, i);  // K (x) I acts as K(j,i)*I blocks
        }
    }
    return A;
}

bool hurwitz(const Eigen::MatrixXd& K) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(K, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eigensolver failed on the drift matrix");
    }
    const double max_re = es.eigenvalues().real().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, K.cwiseAbs().rowwise().sum().maxCoeff());
    return max_re < -tol;
}

} // namespace

double lyapunov_residual(const Eigen::MatrixXd& K, const Eigen::MatrixXd& D,
                         const Eigen::MatrixXd& V) {
    return (K * V + V * K.transpose() + D).norm();
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& K, const Eigen::MatrixXd& D) {
    const Eigen::Index n = K.rows();
    if (K.cols() != n || D.rows() != n || D.cols() != n) {
        throw std::invalid_argument("lyapunov: K and D must be square and the same size");
    }
    if (!K.allFinite() || !D.allFinite()) {
        throw std::invalid_argument("lyapunov: non-finite entries");
    }
    if (!hurwitz(K)) {
        throw std::domain_error("no stationary state: drift matrix is not strictly Hurwitz");
    }

    const Eigen::MatrixXd A = kronecker_sum(K);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd x = lu.solve(vec(-D));

    // one pass of iterative refinement tightens the residual well below the
    // certification bound
    x += lu.solve(vec(-D) - A * x);

    Eigen::MatrixXd V = unvec(x, n);
    V = 0.5 * (V + V.transpose()).eval();  // remove round-off asymmetry

    const double bound = 1e-10 * std::max(1.0, D.norm());
    const double res = lyapunov_residual(K, D, V);
    if (!(res <= bound)) {
        std::ostringstream os;
        os << "lyapunov solve failed certification: residual " << res
           << " exceeds bound " << bound;
        throw std::runtime_error(os.str());
    }
    return V;
}

Matrix6 solve_lyapunov(const Matrix6& K, const Matrix6& D) {
    return solve_lyapunov(Eigen::MatrixXd(K), Eigen::MatrixXd(D));
}

std::string matrix_to_text(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os << m.rows() << " " << m.cols() << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            os << buf << (j + 1 == m.cols() ? "\n" : " ");
        }
    }
    return os.str();
}

Eigen::MatrixXd matrix_from_text(const std::string& text) {
    std::istringstream is(text);
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> rows >> cols) || rows <= 0 || cols <= 0) {
        throw std::invalid_argument("matrix text: bad header");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(is >> m(i, j))) {
                throw std::invalid_argument("matrix text: truncated data");
            }
        }
    }
    return m;
}

} // namespace trimode
