#include "bgwtilt/tilting.hpp"

#include "bgwtilt/spectral.hpp"

#include <cmath>

namespace bgwtilt {

DTilt tilt_from_b(const DModel& m, std::vector<double> b) {
    DTilt p;
    p.a.reserve(static_cast<std::size_t>(m.num_types));
    for (int i = 0; i < m.num_types; ++i) p.a.push_back(1.0 / eval_pgf(m, i, b));
    p.b = std::move(b);
    return p;
}

GoodTiltCertificate is_good_tilting(const DTilt& params, const Condition& cond) {
    GoodTiltCertificate cert;
    const auto K = params.a.size();
    cert.c.resize(K);
    for (std::size_t i = 0; i < K; ++i)
        cert.c[i] = std::log(params.a[i] * params.b[i]);

    const auto L = cond.gamma_rows.size();
    Eigen::MatrixXd Gt(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(L));
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t j = 0; j < K; ++j)
            Gt(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) =
                to_double(cond.gamma_rows[l][j]);
    Eigen::VectorXd c(static_cast<Eigen::Index>(K));
    for (std::size_t i = 0; i < K; ++i) c(static_cast<Eigen::Index>(i)) = cert.c[i];

    Eigen::VectorXd lambda = Gt.colPivHouseholderQr().solve(c);
    double res = (Gt * lambda - c).norm();
    cert.residual = res;
    cert.good = res <= 1e-9 * std::max(1.0, c.norm());
    cert.row_coefficients.assign(lambda.data(), lambda.data() + lambda.size());
    return cert;
}

std::vector<double> solve_beta_system_residual(const DModel& m, const Condition& cond,
                                               const std::vector<double>& b, double beta) {
    if (!cond.reduced) throw TiltError("reduced gamma required");
    const auto& gamma = *cond.reduced;
    std::vector<double> res(static_cast<std::size_t>(m.num_types));
    for (int i = 0; i < m.num_types; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        double ratio = eval_pgf(m, i, b) / b[iu];
        res[iu] = beta * std::pow(ratio, 1.0 / gamma[iu]) - 1.0;
    }
    return res;
}

double implied_beta(const DModel& m, const Condition& cond, const std::vector<double>& b) {
    int p = cond.pivot();
    return b[static_cast<std::size_t>(p)] / eval_pgf(m, p, b);
}

Eigen::MatrixXd tilted_m_prime(const DModel& m, const Condition& cond,
                               const std::vector<double>& b, double beta) {
    if (!cond.reduced) throw TiltError("reduced gamma required");
    const auto& gamma = *cond.reduced;
    const auto K = static_cast<Eigen::Index>(m.num_types);
    Eigen::MatrixXd mp(K, K);
    for (int i = 0; i < m.num_types; ++i) {
        auto grad = eval_pgf_gradient(m, i, b);
        double scale = std::pow(beta, static_cast<double>(gamma[static_cast<std::size_t>(i)]));
        for (int j = 0; j < m.num_types; ++j)
            mp(i, j) = scale * grad[static_cast<std::size_t>(j)];
    }
    return mp;
}

double tilted_mean_spectral_radius(const DModel& m, const Condition& cond,
                                   const std::vector<double>& b) {
    double beta = implied_beta(m, cond, b);
    auto res = solve_beta_system_residual(m, cond, b, beta);
    for (std::size_t i = 0; i < res.size(); ++i)
        if (std::abs(res[i]) > 1e-9)
            throw TiltError("point off the solution set: residual[" + std::to_string(i + 1) +
                            "] = " + std::to_string(res[i]));
    return spectral_radius(tilted_m_prime(m, cond, b, beta));
}

} // namespace bgwtilt
