#include "bgwtilt/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace bgwtilt {

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

namespace {

double dense_spectral_radius(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
    double rho = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
    return rho;
}

} // namespace

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw NumericalError("spectral_radius: square matrix required");
    if (!m.allFinite()) throw NumericalError("spectral_radius: non-finite entries");
    const Eigen::Index n = m.rows();
    if (n == 0) return 0.0;
    if (n == 1) return std::abs(m(0, 0));
    if (m.isZero(0.0)) return 0.0;

    Eigen::MatrixXd shifted = m + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    double lambda = 0;
    for (int it = 0; it < 5000; ++it) {
        Eigen::VectorXd w = shifted * v;
        double norm = w.norm();
        if (norm == 0) return dense_spectral_radius(m);
        w /= norm;
        double next = w.dot(shifted * w);
        if (it > 2 && std::abs(next - lambda) <= 1e-14 * std::max(1.0, std::abs(next)) &&
            (w - v).norm() <= 1e-13) {
            double rho = next - 1.0;
            return rho < 0 ? 0.0 : rho;
        }
        lambda = next;
        v = w;
    }
    // reducible / defective cases land here
    return dense_spectral_radius(m);
}

std::vector<std::complex<double>> eigenvalue_multiset(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<std::complex<double>> vals(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) vals[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return vals;
}

Eigen::VectorXd perron_right_unit_eigenvector(const Eigen::MatrixXd& m, double rho_tol) {
    double rho = spectral_radius(m);
    if (std::abs(rho - 1.0) > rho_tol)
        throw NumericalError("perron eigenvector requested for non-critical matrix, rho = " +
                             std::to_string(rho));
    const Eigen::Index n = m.rows();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m - Eigen::MatrixXd::Identity(n, n),
                                          Eigen::ComputeFullV);
    Eigen::VectorXd r = svd.matrixV().col(n - 1);
    // Perron direction has one sign
    if (r.sum() < 0) r = -r;
    if (r.minCoeff() <= 0)
        throw NumericalError("perron eigenvector not positive; matrix irreducible?");
    return r / r(0);
}

} // namespace bgwtilt
