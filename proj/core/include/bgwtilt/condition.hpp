#pragma once

#include "bgwtilt/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bgwtilt {

/// Linear conditioning Gamma * N(T) = g. `reduced` is the weight vector
/// gamma in (N*)^K spanning (Ker Gamma)^perp in the rank-1 reduction; it must
/// carry a 1 at some coordinate (the pivot).
struct Condition {
    std::vector<std::vector<Rational>> gamma_rows; // L x K
    std::optional<std::vector<unsigned>> reduced;
    std::optional<std::vector<Rational>> rhs;

    int num_types() const {
        return gamma_rows.empty() ? (reduced ? static_cast<int>(reduced->size()) : 0)
                                  : static_cast<int>(gamma_rows.front().size());
    }

    static Condition from_reduced(std::vector<unsigned> gamma);

    /// First coordinate with gamma_i == 1. Throws when no reduction is known.
    int pivot() const;
};

/// Exact rank over Q by fraction-free Gaussian elimination.
int rational_rank(std::vector<std::vector<Rational>> rows);

/// True iff v lies in the row space of `rows` (exact).
bool in_row_space(const std::vector<std::vector<Rational>>& rows, const std::vector<Rational>& v);

struct BVerdict {
    enum class State { pass, fail, undetermined } state = State::undetermined;
    std::optional<std::vector<unsigned>> gamma; // witness when pass
    std::string detail;
};

/// Condition B: some gamma in (Ker Gamma)^perp with positive integer entries
/// and an entry equal to 1. Decided exactly for rank 1 and full rank; checks
/// a caller-supplied reduction when present.
BVerdict check_condition_b(const Condition& cond);

} // namespace bgwtilt
