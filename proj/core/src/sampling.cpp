#include "bgwtilt/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace bgwtilt {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    splitmix64(s);
    return splitmix64(s);
}

unsigned Rng::poisson(double lambda) {
    if (lambda <= 0) return 0;
    unsigned total = 0;
    // split large rates; Knuth multiplication below is exact but slow otherwise
    while (lambda > 20.0) {
        // Poisson(20) blocks
        double l = std::exp(-20.0), p = 1.0;
        unsigned k = 0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        total += k - 1;
        lambda -= 20.0;
    }
    double l = std::exp(-lambda), p = 1.0;
    unsigned k = 0;
    do {
        ++k;
        p *= uniform();
    } while (p > l);
    return total + k - 1;
}

OffspringSampler::OffspringSampler(const DModel& model) : model_(model) {
    const int K = model_.num_types;
    finite_ = model_.kind() == PgfKind::polynomial;
    if (finite_) {
        std::vector<std::vector<WordProb<double>>> laws;
        if (model_.has_ordered()) {
            laws = model_.ordered;
        } else {
            for (int i = 0; i < K; ++i)
                laws.push_back(canonical_ordering(model_.pgf[static_cast<std::size_t>(i)].terms));
        }
        for (auto& law : laws) {
            std::vector<Word> ws;
            std::vector<double> cum;
            double acc = 0;
            for (auto& wp : law) {
                if (wp.prob <= 0) continue;
                acc += wp.prob;
                ws.push_back(wp.word);
                cum.push_back(acc);
            }
            if (ws.empty() || std::abs(acc - 1.0) > 1e-8)
                throw ModelError("sampler: ordered law not normalised");
            // guard the top of the table against roundoff
            cum.back() = 1.0;
            words_.push_back(std::move(ws));
            cumulative_.push_back(std::move(cum));
        }
    } else {
        for (int i = 0; i < K; ++i) {
            std::vector<std::pair<MultiIndex, double>> monos;
            for (const auto& [a, c] : model_.pgf[static_cast<std::size_t>(i)].terms)
                if (weight_of(a) > 0 && c > 0) monos.emplace_back(a, c);
            monomials_.push_back(std::move(monos));
        }
    }
}

Word OffspringSampler::sample(int type, Rng& rng) const {
    const auto tu = static_cast<std::size_t>(type);
    if (finite_) {
        double u = rng.uniform();
        const auto& cum = cumulative_[tu];
        std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (idx >= cum.size()) idx = cum.size() - 1;
        return words_[tu][idx];
    }
    Word w;
    for (const auto& [a, c] : monomials_[tu]) {
        unsigned n = rng.poisson(c);
        for (std::size_t j = 0; j < a.size(); ++j)
            for (unsigned rep = 0; rep < a[j] * n; ++rep) w.push_back(static_cast<int>(j));
    }
    // uniform shuffle = uniform ordering measure over the multiset
    for (std::size_t i = w.size(); i > 1; --i)
        std::swap(w[i - 1], w[rng.below(i)]);
    return w;
}

namespace {

struct GrowNode {
    int parent;
    int type;
};

// Breadth-first growth shared by the plain and conditioned samplers. The
// condition hook returns false to abort the attempt (overshoot).
template <class Hook>
BgwOutcome grow(const OffspringSampler& sampler, int root_type, Rng& rng, long long size_cap,
                Hook&& on_node) {
    BgwOutcome out;
    std::vector<GrowNode> raw;
    raw.push_back({-1, root_type});
    if (!on_node(root_type)) return out;
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        Word w = sampler.sample(raw[static_cast<std::size_t>(u)].type, rng);
        for (int letter : w) {
            if (static_cast<long long>(raw.size()) >= size_cap) {
                out.nodes_generated = static_cast<long long>(raw.size());
                return out; // overflow
            }
            raw.push_back({u, letter});
            if (!on_node(letter)) {
                out.nodes_generated = static_cast<long long>(raw.size());
                return out; // condition overshoot
            }
            queue.push_back(static_cast<int>(raw.size()) - 1);
        }
    }
    // convert the BFS arena to a preorder TypedTree
    const int K = sampler.model().num_types;
    std::vector<std::vector<int>> kids(raw.size());
    for (std::size_t i = 1; i < raw.size(); ++i)
        kids[static_cast<std::size_t>(raw[i].parent)].push_back(static_cast<int>(i));
    TypedTree t;
    t.type_counts.assign(static_cast<std::size_t>(K), 0);
    std::vector<std::pair<int, int>> stack{{0, -1}};
    while (!stack.empty()) {
        auto [src, parent_dst] = stack.back();
        stack.pop_back();
        int dst = static_cast<int>(t.nodes.size());
        t.nodes.push_back({parent_dst, raw[static_cast<std::size_t>(src)].type, {}});
        ++t.type_counts[static_cast<std::size_t>(raw[static_cast<std::size_t>(src)].type)];
        if (parent_dst >= 0) t.nodes[static_cast<std::size_t>(parent_dst)].children.push_back(dst);
        const auto& ch = kids[static_cast<std::size_t>(src)];
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back({*it, dst});
    }
    out.nodes_generated = static_cast<long long>(t.nodes.size());
    out.tree = std::move(t);
    return out;
}

} // namespace

BgwOutcome sample_bgw(const OffspringSampler& sampler, int root_type, Rng& rng,
                      long long size_cap) {
    return grow(sampler, root_type, rng, size_cap, [](int) { return true; });
}

bool scale_condition(const Condition& cond, const std::vector<Rational>& g, IntCondition& out) {
    out.rows.clear();
    out.rhs.clear();
    if (cond.gamma_rows.size() != g.size()) throw std::invalid_argument("condition arity mismatch");
    for (std::size_t l = 0; l < cond.gamma_rows.size(); ++l) {
        Integer lcm_den = denominator(g[l]);
        for (const auto& v : cond.gamma_rows[l])
            lcm_den = boost::multiprecision::lcm(lcm_den, denominator(v));
        std::vector<long long> row;
        for (const auto& v : cond.gamma_rows[l])
            row.push_back(static_cast<long long>(
                (numerator(v) * (lcm_den / denominator(v))).convert_to<long long>()));
        Integer rhs_i = numerator(g[l]) * (lcm_den / denominator(g[l]));
        out.rows.push_back(std::move(row));
        out.rhs.push_back(rhs_i.convert_to<long long>());
    }
    return true;
}

std::optional<TypedTree> sample_conditioned(const OffspringSampler& sampler, int root_type,
                                            const Condition& cond, const std::vector<Rational>& g,
                                            Rng& rng, const ConditionedSampleOptions& opts,
                                            RejectionStats* stats) {
    IntCondition ic;
    scale_condition(cond, g, ic);
    const std::size_t L = ic.rows.size();
    bool nonneg = true;
    for (const auto& row : ic.rows)
        for (long long v : row) nonneg &= v >= 0;

    RejectionStats local;
    RejectionStats& st = stats ? *stats : local;
    std::vector<long long> acc(L);
    for (long long attempt = 0; attempt < opts.max_attempts; ++attempt) {
        ++st.attempts;
        std::fill(acc.begin(), acc.end(), 0);
        bool overshoot = false;
        auto hook = [&](int type) {
            for (std::size_t l = 0; l < L; ++l) {
                acc[l] += ic.rows[l][static_cast<std::size_t>(type)];
                if (nonneg && acc[l] > ic.rhs[l]) {
                    overshoot = true;
                    return false;
                }
            }
            return true;
        };
        BgwOutcome o = grow(sampler, root_type, rng, opts.size_cap, hook);
        if (!o.tree) {
            if (overshoot) ++st.aborted_overweight;
            continue;
        }
        if (acc == ic.rhs) {
            ++st.accepted;
            return std::move(o.tree);
        }
    }
    return std::nullopt;
}

} // namespace bgwtilt
