#include "bgwtilt/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bgwtilt {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "undetermined";
    }
}

bool is_irreducible(const std::vector<std::vector<double>>& mean) {
    const std::size_t n = mean.size();
    if (n == 0) return false;
    auto reach = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                double w = transpose ? mean[v][u] : mean[u][v];
                if (w > 0 && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach(false) && reach(true);
}

namespace {

Verdict leaves_check(const DModel& m, AssumptionCheck& out) {
    MultiIndex zero(static_cast<std::size_t>(m.num_types), 0u);
    for (int i = 0; i < m.num_types; ++i) {
        if (m.pgf[static_cast<std::size_t>(i)].kind == PgfKind::exp_poly) continue; // mass at 0 always positive
        if (projection_mass(m, i, zero) <= 0) {
            out.detail = "type " + std::to_string(i + 1) + " never childless";
            return Verdict::fail;
        }
    }
    return Verdict::pass;
}

bool nondegenerate_check(const DModel& m) {
    for (int i = 0; i < m.num_types; ++i) {
        const auto& g = m.pgf[static_cast<std::size_t>(i)];
        if (g.kind == PgfKind::exp_poly) return true; // mass at the zero vector
        for (const auto& [k, c] : g.terms)
            if (c > 0 && weight_of(k) != 1) return true;
    }
    return false;
}

// A.3 margin: b_i * dphi/db_i - phi at a point.
double escape_margin(const DModel& m, int i, const std::vector<double>& b) {
    double phi = eval_pgf(m, i, b);
    double d = eval_pgf_gradient(m, i, b)[static_cast<std::size_t>(i)];
    return b[static_cast<std::size_t>(i)] * d - phi;
}

bool has_pure_power_term(const Pgf<double>& g, int i) {
    for (const auto& [k, c] : g.terms) {
        if (c <= 0) continue;
        bool pure = k[static_cast<std::size_t>(i)] >= 1;
        for (std::size_t j = 0; j < k.size() && pure; ++j)
            if (static_cast<int>(j) != i && k[j] > 0) pure = false;
        if (pure) return true;
    }
    return false;
}

unsigned max_total_degree(const Pgf<double>& g) {
    unsigned d = 0;
    for (const auto& [k, c] : g.terms)
        if (c > 0) d = std::max(d, static_cast<unsigned>(weight_of(k)));
    return d;
}

void escape_check(const DModel& m, const EscapeCheckOptions& opts, AssumptionCheck& out) {
    const int K = m.num_types;

    // Exact sufficient condition: every type has a pure positive power of its
    // own variable in f_i (exp_poly family).
    if (m.kind() == PgfKind::exp_poly) {
        bool all = true;
        for (int i = 0; i < K && all; ++i)
            all = has_pure_power_term(m.pgf[static_cast<std::size_t>(i)], i);
        if (all) {
            out.verdict = Verdict::pass;
            out.detail = "exp_poly with f_i(0,..,b_i,..,0) -> inf for every type";
            return;
        }
    }

    // Monotype polynomials are decidable from the top coefficient.
    if (K == 1 && m.kind() == PgfKind::polynomial) {
        unsigned deg = max_total_degree(m.pgf[0]);
        if (deg >= 2) {
            out.verdict = Verdict::pass;
            out.detail = "monotype, degree >= 2";
        } else {
            out.verdict = Verdict::fail;
            out.detail = "monotype, degree <= 1: b phi' - phi < 0 for all large b";
            out.witness_point = {opts.grid_bound};
        }
        return;
    }

    // Heuristic grid: violation must persist at the top of the b_i range to be
    // called a failure; an all-clear grid cannot certify the uniform
    // quantifier, so it stays undetermined.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::vector<double> cross_levels{0.0, 0.25, 1.0, 4.0, 64.0, 1024.0};
    for (int i = 0; i < K; ++i) {
        std::vector<std::vector<double>> crosses;
        if (K == 1) {
            crosses.push_back({});
        } else {
            for (int s = 0; s < opts.cross_samples; ++s) {
                std::vector<double> c(static_cast<std::size_t>(K - 1));
                for (auto& v : c)
                    v = cross_levels[rng() % cross_levels.size()];
                crosses.push_back(std::move(c));
            }
        }
        int top_quarter = std::max(1, opts.grid_points / 4);
        for (const auto& cross : crosses) {
            int consecutive_bad = 0;
            std::vector<double> bad_point;
            for (int t = 0; t < opts.grid_points; ++t) {
                double bi = std::pow(opts.grid_bound, static_cast<double>(t) /
                                                          (opts.grid_points - 1));
                std::vector<double> b(static_cast<std::size_t>(K));
                int ci = 0;
                for (int j = 0; j < K; ++j)
                    b[static_cast<std::size_t>(j)] =
                        (j == i) ? bi : cross[static_cast<std::size_t>(ci++)];
                double margin;
                try {
                    margin = escape_margin(m, i, b);
                } catch (const EvalOverflow&) {
                    consecutive_bad = 0;
                    continue;
                }
                if (margin < 0) {
                    ++consecutive_bad;
                    bad_point = b;
                } else {
                    consecutive_bad = 0;
                }
            }
            if (consecutive_bad >= top_quarter) {
                out.verdict = Verdict::fail;
                out.detail = "margin b_i dphi/db_i - phi negative up to the grid bound, type " +
                             std::to_string(i + 1);
                out.witness_point = bad_point;
                return;
            }
        }
    }
    out.verdict = Verdict::undetermined;
    out.detail = "no persistent violation found; uniform quantifier not certified by sampling";
}

} // namespace

AssumptionReport check_assumptions(const DModel& model, const Condition& cond,
                                   const EscapeCheckOptions& opts) {
    AssumptionReport rep;

    // Both parametric families are entire by construction.
    rep.entire.verdict = Verdict::pass;
    rep.entire.detail = model.kind() == PgfKind::exp_poly ? "exp of polynomial"
                                                          : "polynomial";

    rep.leaves.verdict = leaves_check(model, rep.leaves);

    escape_check(model, opts, rep.escape);

    BVerdict b = check_condition_b(cond);
    rep.condition_b.verdict = b.state == BVerdict::State::pass ? Verdict::pass
                              : b.state == BVerdict::State::fail ? Verdict::fail
                                                                 : Verdict::undetermined;
    rep.condition_b.detail = b.detail;
    if (b.gamma) rep.reduced_gamma = *b.gamma;

    rep.nondegenerate = nondegenerate_check(model);
    rep.irreducible = is_irreducible(mean_matrix(model));
    return rep;
}

} // namespace bgwtilt
