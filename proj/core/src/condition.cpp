#include "bgwtilt/condition.hpp"

#include <numeric>
#include <stdexcept>

namespace bgwtilt {

Condition Condition::from_reduced(std::vector<unsigned> gamma) {
    Condition c;
    std::vector<Rational> row;
    row.reserve(gamma.size());
    for (unsigned g : gamma) row.emplace_back(g);
    c.gamma_rows.push_back(std::move(row));
    c.reduced = std::move(gamma);
    return c;
}

int Condition::pivot() const {
    if (!reduced) throw std::logic_error("condition: no rank-1 reduction available");
    for (std::size_t i = 0; i < reduced->size(); ++i)
        if ((*reduced)[i] == 1) return static_cast<int>(i);
    throw std::logic_error("condition: reduced gamma has no coordinate equal to 1");
}

namespace {

// Reduced row echelon form in place; returns rank.
int rref(std::vector<std::vector<Rational>>& rows) {
    if (rows.empty()) return 0;
    const std::size_t ncols = rows.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[r]);
        Rational lead = rows[r][c];
        for (auto& v : rows[r]) v /= lead;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            Rational f = rows[i][c];
            for (std::size_t j = 0; j < ncols; ++j) rows[i][j] -= f * rows[r][j];
        }
        ++r;
    }
    return static_cast<int>(r);
}

} // namespace

int rational_rank(std::vector<std::vector<Rational>> rows) { return rref(rows); }

bool in_row_space(const std::vector<std::vector<Rational>>& rows, const std::vector<Rational>& v) {
    auto stacked = rows;
    int base = rref(stacked);
    stacked = rows;
    stacked.push_back(v);
    return rref(stacked) == base;
}

BVerdict check_condition_b(const Condition& cond) {
    BVerdict out;
    const int K = cond.num_types();
    if (K == 0) {
        out.state = BVerdict::State::fail;
        out.detail = "empty condition";
        return out;
    }

    if (cond.reduced) {
        const auto& g = *cond.reduced;
        bool has_one = false;
        for (unsigned v : g) {
            if (v == 0) {
                out.state = BVerdict::State::fail;
                out.detail = "reduced gamma has a zero entry";
                return out;
            }
            has_one |= v == 1;
        }
        if (!has_one) {
            out.state = BVerdict::State::fail;
            out.detail = "reduced gamma has no entry equal to 1";
            return out;
        }
        if (!cond.gamma_rows.empty()) {
            std::vector<Rational> v;
            v.reserve(g.size());
            for (unsigned x : g) v.emplace_back(x);
            if (!in_row_space(cond.gamma_rows, v)) {
                out.state = BVerdict::State::fail;
                out.detail = "reduced gamma not in the row space of Gamma";
                return out;
            }
        }
        out.state = BVerdict::State::pass;
        out.gamma = g;
        return out;
    }

    int rank = rational_rank(cond.gamma_rows);
    if (rank == K) {
        // row space is all of R^K
        out.state = BVerdict::State::pass;
        out.gamma = std::vector<unsigned>(static_cast<std::size_t>(K), 1u);
        out.detail = "full rank; gamma = (1,...,1)";
        return out;
    }
    if (rank == 1) {
        // primitive integer generator of the ray
        const std::vector<Rational>* row = nullptr;
        for (const auto& r : cond.gamma_rows) {
            for (const auto& v : r)
                if (v != 0) {
                    row = &r;
                    break;
                }
            if (row) break;
        }
        if (!row) {
            out.state = BVerdict::State::fail;
            out.detail = "Gamma is zero";
            return out;
        }
        Integer lcm_den = 1;
        for (const auto& v : *row) lcm_den = boost::multiprecision::lcm(lcm_den, denominator(v));
        std::vector<Integer> ints;
        ints.reserve(row->size());
        for (const auto& v : *row) ints.push_back(numerator(v) * (lcm_den / denominator(v)));
        Integer g = 0;
        for (const auto& v : ints) g = boost::multiprecision::gcd(g, v);
        bool all_pos = true, all_neg = true, has_unit = false;
        for (auto& v : ints) {
            v /= g;
            all_pos &= v > 0;
            all_neg &= v < 0;
        }
        if (all_neg)
            for (auto& v : ints) v = -v;
        else if (!all_pos) {
            out.state = BVerdict::State::fail;
            out.detail = "ray generator has mixed signs; no gamma in (N*)^K";
            return out;
        }
        for (const auto& v : ints) has_unit |= v == 1;
        if (!has_unit) {
            out.state = BVerdict::State::fail;
            out.detail = "primitive generator has no entry 1";
            return out;
        }
        std::vector<unsigned> gamma;
        gamma.reserve(ints.size());
        for (const auto& v : ints) gamma.push_back(v.convert_to<unsigned>());
        out.state = BVerdict::State::pass;
        out.gamma = std::move(gamma);
        return out;
    }
    out.state = BVerdict::State::undetermined;
    out.detail = "rank " + std::to_string(rank) +
                 " in (1, K): integer feasibility not decided; supply a reduction";
    return out;
}

} // namespace bgwtilt
