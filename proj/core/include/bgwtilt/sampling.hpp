#pragma once

#include "bgwtilt/condition.hpp"
#include "bgwtilt/model.hpp"
#include "bgwtilt/tree.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace bgwtilt {

std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent stream seed (experiment fan-out).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

/// Explicit random source; no global state anywhere in the library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t bits() { return eng_(); }
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    std::uint64_t below(std::uint64_t n) { return eng_() % n; }
    unsigned poisson(double lambda);

  private:
    std::mt19937_64 eng_;
};

/// Per-type offspring word sampler. Finite-support models sample the ordered
/// law directly (canonical ordering when only a projection is given);
/// exp_poly models draw one Poisson count per monomial of f and shuffle the
/// resulting multiset (uniform over orderings, matching canonical_ordering).
class OffspringSampler {
  public:
    explicit OffspringSampler(const DModel& model);

    Word sample(int type, Rng& rng) const;
    const DModel& model() const { return model_; }

  private:
    DModel model_;
    // finite path
    std::vector<std::vector<Word>> words_;
    std::vector<std::vector<double>> cumulative_;
    // exp_poly path
    std::vector<std::vector<std::pair<MultiIndex, double>>> monomials_;
    bool finite_ = true;
};

struct BgwOutcome {
    std::optional<TypedTree> tree; // empty on overflow
    long long nodes_generated = 0;
};

/// Breadth-first generation; stops with an empty outcome once the node count
/// would exceed size_cap (a normal outcome for supercritical laws).
BgwOutcome sample_bgw(const OffspringSampler& sampler, int root_type, Rng& rng,
                      long long size_cap);

/// Integer-scaled conditioning rows (lcm of denominators cleared). Returns
/// false when the scaled right-hand side is not integral (condition then has
/// probability zero).
struct IntCondition {
    std::vector<std::vector<long long>> rows;
    std::vector<long long> rhs;
};
bool scale_condition(const Condition& cond, const std::vector<Rational>& g, IntCondition& out);

struct RejectionStats {
    long long attempts = 0;
    long long accepted = 0;
    long long aborted_overweight = 0; // early-aborted growths
};

struct ConditionedSampleOptions {
    long long max_attempts = 50'000'000;
    long long size_cap = 5'000'000;
};

/// Rejection sampling of the conditioned tree: repeated BGW growth, early
/// abort as soon as a nonnegative condition row overshoots. The caller is
/// responsible for conditioning with positive probability (and will normally
/// pass an already-criticalized model).
std::optional<TypedTree> sample_conditioned(const OffspringSampler& sampler, int root_type,
                                            const Condition& cond, const std::vector<Rational>& g,
                                            Rng& rng, const ConditionedSampleOptions& opts = {},
                                            RejectionStats* stats = nullptr);

} // namespace bgwtilt
