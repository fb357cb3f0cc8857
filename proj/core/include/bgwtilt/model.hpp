#pragma once

#include "bgwtilt/quad.hpp"
#include "bgwtilt/rational.hpp"
#include "bgwtilt/word.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgwtilt {

/// Raised when a generating-function value leaves the representable range.
struct EvalOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PgfKind {
    polynomial, // phi(x) = sum_k mu(k) x^k, finite support
    exp_poly    // phi(x) = exp(f(x) - f(1)), f polynomial with nonneg coefficients
};

template <class F>
struct WordProb {
    Word word;
    F prob;
};

/// One per-type generating function. For `polynomial` the terms are the
/// projection masses mu(k) themselves; for `exp_poly` they are the monomials
/// of f (the implicit normalisation exp(-f(1)+...) is never stored).
template <class F>
struct Pgf {
    PgfKind kind = PgfKind::polynomial;
    std::vector<std::pair<MultiIndex, F>> terms; // sorted lexicographically by index
};

/// A K-type offspring model: per-type generating functions, and optionally a
/// per-type ordered law (required by samplers and enumeration; derivable from
/// the projection via canonical_ordering for finite-support models).
template <class F>
struct Model {
    int num_types = 0;
    std::vector<Pgf<F>> pgf;                       // size K
    std::vector<std::vector<WordProb<F>>> ordered; // size K or empty

    bool has_ordered() const { return !ordered.empty(); }
    PgfKind kind() const { return pgf.empty() ? PgfKind::polynomial : pgf.front().kind; }
};

using RModel = Model<Rational>;
using DModel = Model<double>;
using QModel = Model<Quad>;

template <class F>
F ipow(F base, unsigned long long e) {
    F r(1);
    while (e) {
        if (e & 1u) r = r * base;
        base = base * base;
        e >>= 1u;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Construction

/// Sums an ordered per-type law into its projection (order-forgetting map).
template <class F>
std::vector<std::pair<MultiIndex, F>> project(const std::vector<WordProb<F>>& law, int num_types) {
    std::map<MultiIndex, F> acc;
    for (const auto& wp : law) {
        MultiIndex k = project_word(wp.word, num_types);
        auto it = acc.find(k);
        if (it == acc.end())
            acc.emplace(std::move(k), wp.prob);
        else
            it->second = it->second + wp.prob;
    }
    return {acc.begin(), acc.end()};
}

/// The ordered law that splits each projection mass uniformly over the
/// distinct orderings of its multiset.
template <class F>
std::vector<WordProb<F>> canonical_ordering(const std::vector<std::pair<MultiIndex, F>>& proj) {
    std::vector<WordProb<F>> out;
    for (const auto& [k, p] : proj) {
        std::vector<Word> words = distinct_orderings(k);
        F share = p / F(static_cast<int>(words.size()));
        for (auto& w : words) out.push_back({std::move(w), share});
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return WordLess{}(a.word, b.word); });
    return out;
}

template <class F>
Model<F> model_from_ordered(int num_types, std::vector<std::vector<WordProb<F>>> laws) {
    Model<F> m;
    m.num_types = num_types;
    m.ordered = std::move(laws);
    for (auto& law : m.ordered) {
        std::sort(law.begin(), law.end(),
                  [](const auto& a, const auto& b) { return WordLess{}(a.word, b.word); });
        Pgf<F> g;
        g.kind = PgfKind::polynomial;
        g.terms = project(law, num_types);
        m.pgf.push_back(std::move(g));
    }
    return m;
}

template <class F>
Model<F> model_from_projection(int num_types,
                               std::vector<std::vector<std::pair<MultiIndex, F>>> projections,
                               bool materialize_ordered = true) {
    Model<F> m;
    m.num_types = num_types;
    for (auto& proj : projections) {
        std::sort(proj.begin(), proj.end());
        if (materialize_ordered) m.ordered.push_back(canonical_ordering(proj));
        Pgf<F> g;
        g.kind = PgfKind::polynomial;
        g.terms = std::move(proj);
        m.pgf.push_back(std::move(g));
    }
    return m;
}

template <class F>
Model<F> model_from_exp_poly(int num_types,
                             std::vector<std::vector<std::pair<MultiIndex, F>>> polys) {
    Model<F> m;
    m.num_types = num_types;
    for (auto& poly : polys) {
        std::sort(poly.begin(), poly.end());
        Pgf<F> g;
        g.kind = PgfKind::exp_poly;
        g.terms = std::move(poly);
        m.pgf.push_back(std::move(g));
    }
    return m;
}

/// Checks mass normalisation, coefficient signs and (when both representations
/// are present) ordered/projection consistency. Throws ModelError. Exact
/// fields must match exactly; double within 1e-9.
template <class F>
void validate_model(const Model<F>& m) {
    if (m.num_types <= 0) throw ModelError("model: num_types must be >= 1");
    if (static_cast<int>(m.pgf.size()) != m.num_types)
        throw ModelError("model: one generating function per type required");
    if (m.has_ordered() && static_cast<int>(m.ordered.size()) != m.num_types)
        throw ModelError("model: ordered law must cover every type");
    for (int i = 0; i < m.num_types; ++i) {
        const auto& g = m.pgf[static_cast<std::size_t>(i)];
        for (const auto& [k, c] : g.terms) {
            if (static_cast<int>(k.size()) != m.num_types)
                throw ModelError("model: multi-index arity mismatch");
            if (to_double(c) < 0)
                throw ModelError("model: negative coefficient for type " + std::to_string(i + 1));
        }
        if (g.kind == PgfKind::polynomial) {
            F mass(0);
            for (const auto& [k, c] : g.terms) mass = mass + c;
            if (std::abs(to_double(mass - F(1))) > 1e-9)
                throw ModelError("model: projection of type " + std::to_string(i + 1) +
                                 " does not sum to 1");
        }
        if (m.has_ordered()) {
            if (g.kind == PgfKind::exp_poly)
                throw ModelError("model: ordered law incompatible with exp_poly family");
            F mass(0);
            for (const auto& wp : m.ordered[static_cast<std::size_t>(i)]) mass = mass + wp.prob;
            if (std::abs(to_double(mass - F(1))) > 1e-9)
                throw ModelError("model: ordered law of type " + std::to_string(i + 1) +
                                 " does not sum to 1");
            auto proj = project(m.ordered[static_cast<std::size_t>(i)], m.num_types);
            if (proj.size() != g.terms.size())
                throw ModelError("model: ordered law inconsistent with projection");
            for (std::size_t t = 0; t < proj.size(); ++t) {
                if (proj[t].first != g.terms[t].first ||
                    std::abs(to_double(proj[t].second - g.terms[t].second)) > 1e-9)
                    throw ModelError("model: ordered law inconsistent with projection");
            }
        }
    }
}

template <class F2, class F1>
Model<F2> convert_model(const Model<F1>& m, const std::function<F2(const F1&)>& conv) {
    Model<F2> out;
    out.num_types = m.num_types;
    for (const auto& g : m.pgf) {
        Pgf<F2> h;
        h.kind = g.kind;
        for (const auto& [k, c] : g.terms) h.terms.emplace_back(k, conv(c));
        out.pgf.push_back(std::move(h));
    }
    for (const auto& law : m.ordered) {
        std::vector<WordProb<F2>> l2;
        for (const auto& wp : law) l2.push_back({wp.word, conv(wp.prob)});
        out.ordered.push_back(std::move(l2));
    }
    return out;
}

template <class F>
DModel to_double_model(const Model<F>& m) {
    return convert_model<double, F>(m, [](const F& v) { return to_double(v); });
}

QModel to_quad_model(const RModel& m, long long d);

// ---------------------------------------------------------------------------
// Evaluation

/// phi^{(i)}(x) in closed form. Entire in x (negative coordinates allowed);
/// values outside double range raise EvalOverflow.
double eval_pgf(const DModel& m, int type, std::span<const double> x);

/// Exact gradient of phi^{(i)} at x.
std::vector<double> eval_pgf_gradient(const DModel& m, int type, std::span<const double> x);

/// Exact field evaluation; polynomial kind only.
template <class F>
F eval_pgf_field(const Model<F>& m, int type, const std::vector<F>& x) {
    const Pgf<F>& g = m.pgf.at(static_cast<std::size_t>(type));
    if (g.kind != PgfKind::polynomial)
        throw ModelError("eval_pgf_field: exact evaluation requires the polynomial family");
    F acc(0);
    for (const auto& [k, c] : g.terms) {
        F term = c;
        for (std::size_t j = 0; j < k.size(); ++j)
            if (k[j] > 0) term = term * ipow(x[j], k[j]);
        acc = acc + term;
    }
    return acc;
}

/// Projection mass mu^{(i)}(k). Exact for polynomial; compound-Poisson sum for
/// exp_poly (double).
double projection_mass(const DModel& m, int type, const MultiIndex& k);

/// Mean matrix entries m[i][j] = d phi^{(i)} / d x_j at (1,...,1), row-major.
std::vector<std::vector<double>> mean_matrix(const DModel& m);

template <class F>
std::vector<std::vector<double>> mean_matrix(const Model<F>& m) {
    return mean_matrix(to_double_model(m));
}

} // namespace bgwtilt
