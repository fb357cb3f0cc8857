#pragma once

#include "bgwtilt/condition.hpp"
#include "bgwtilt/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace bgwtilt {

struct TiltError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tilt coefficients: mu~(k) = a_i * prod_j b_j^{k_j} * mu(k). The a's are
/// forced by the b's through a_i = 1/phi^{(i)}(b). beta = exp(c_pivot) is
/// carried in the rank-1 reduced setting only.
template <class F>
struct TiltParams {
    std::vector<F> a;
    std::vector<F> b;
    std::optional<F> beta;
};

using DTilt = TiltParams<double>;

/// Normalised tilt parameters from the b-vector alone (polynomial family:
/// exact in the field).
template <class F>
TiltParams<F> tilt_from_b(const Model<F>& m, std::vector<F> b) {
    TiltParams<F> p;
    p.a.reserve(static_cast<std::size_t>(m.num_types));
    for (int i = 0; i < m.num_types; ++i) p.a.push_back(F(1) / eval_pgf_field(m, i, b));
    p.b = std::move(b);
    return p;
}

DTilt tilt_from_b(const DModel& m, std::vector<double> b);

/// Exponential tilting of a model. Polynomial masses are rescaled termwise;
/// exp_poly replaces f_i(x) by f_i(b o x) (recentering is implicit in the
/// family). The given a must satisfy a_i phi^{(i)}(b) = 1 within 1e-10 or the
/// tilt is rejected with the residuals.
template <class F>
Model<F> apply_tilt(const Model<F>& m, const TiltParams<F>& params) {
    if (static_cast<int>(params.a.size()) != m.num_types ||
        static_cast<int>(params.b.size()) != m.num_types)
        throw TiltError("tilt: parameter arity mismatch");
    for (const F& v : params.b)
        if (!(to_double(v) > 0)) throw TiltError("tilt: b must be positive");

    // normalisation residuals
    {
        DModel dm = to_double_model(m);
        std::vector<double> db(params.b.size());
        for (std::size_t j = 0; j < params.b.size(); ++j) db[j] = to_double(params.b[j]);
        std::string bad;
        for (int i = 0; i < m.num_types; ++i) {
            double res = to_double(params.a[static_cast<std::size_t>(i)]) * eval_pgf(dm, i, db) - 1.0;
            if (std::abs(res) > 1e-10)
                bad += (bad.empty() ? "" : ", ") + std::to_string(i + 1) + ": " +
                       std::to_string(res);
        }
        if (!bad.empty()) throw TiltError("tilt: normalisation violated (residuals " + bad + ")");
    }

    Model<F> out;
    out.num_types = m.num_types;
    for (int i = 0; i < m.num_types; ++i) {
        const auto& g = m.pgf[static_cast<std::size_t>(i)];
        Pgf<F> h;
        h.kind = g.kind;
        for (const auto& [k, c] : g.terms) {
            F factor(1);
            for (std::size_t j = 0; j < k.size(); ++j)
                if (k[j] > 0) factor = factor * ipow(params.b[j], k[j]);
            if (g.kind == PgfKind::polynomial)
                factor = factor * params.a[static_cast<std::size_t>(i)];
            h.terms.emplace_back(k, c * factor);
        }
        out.pgf.push_back(std::move(h));
    }
    for (int i = 0; i < static_cast<int>(m.ordered.size()); ++i) {
        std::vector<WordProb<F>> law;
        for (const auto& wp : m.ordered[static_cast<std::size_t>(i)]) {
            F factor = params.a[static_cast<std::size_t>(i)];
            for (int letter : wp.word) factor = factor * params.b[static_cast<std::size_t>(letter)];
            law.push_back({wp.word, wp.prob * factor});
        }
        out.ordered.push_back(std::move(law));
    }
    return out;
}

struct GoodTiltCertificate {
    bool good = false;
    double residual = 0;                  // distance of c to the row space of Gamma
    std::vector<double> c;                // c_i = log(a_i b_i)
    std::vector<double> row_coefficients; // c ~ Gamma^T lambda
};

/// Tests c = (log a_i b_i) in (Ker Gamma)^perp by least squares against the
/// rows of Gamma; threshold 1e-9 (relative to max(1, |c|)).
GoodTiltCertificate is_good_tilting(const DTilt& params, const Condition& cond);

/// Residuals of the reduced system: beta (phi^{(i)}(b)/b_i)^{1/gamma_i} - 1.
std::vector<double> solve_beta_system_residual(const DModel& m, const Condition& cond,
                                               const std::vector<double>& b, double beta);

/// beta implied by the pivot equation (gamma_pivot = 1).
double implied_beta(const DModel& m, const Condition& cond, const std::vector<double>& b);

/// M'_{i,j} = beta^{gamma_i} dphi^{(i)}/dx_j (b); similar to the tilted mean
/// matrix via P = diag(b).
Eigen::MatrixXd tilted_m_prime(const DModel& m, const Condition& cond,
                               const std::vector<double>& b, double beta);

/// Spectral radius of the tilted mean matrix at an on-curve point b.
/// Off-curve input (reduced-system residual above 1e-9) is rejected.
double tilted_mean_spectral_radius(const DModel& m, const Condition& cond,
                                   const std::vector<double>& b);

} // namespace bgwtilt
