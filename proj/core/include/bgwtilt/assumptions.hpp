#pragma once

#include "bgwtilt/condition.hpp"
#include "bgwtilt/model.hpp"

#include <string>
#include <vector>

namespace bgwtilt {

enum class Verdict { pass, fail, undetermined };

const char* verdict_name(Verdict v);

struct AssumptionCheck {
    Verdict verdict = Verdict::undetermined;
    std::string detail;               // witness description, if any
    std::vector<double> witness_point; // offending b, when applicable
};

struct AssumptionReport {
    AssumptionCheck entire;        // (A.1)
    AssumptionCheck leaves;        // (A.2)  zeta^{(j)}(empty) > 0
    AssumptionCheck escape;        // (A.3)  b_i dphi/db_i >= phi/b_i for b_i large
    AssumptionCheck condition_b;   // (B)
    bool nondegenerate = false;
    bool irreducible = false;
    std::vector<unsigned> reduced_gamma; // resolved weight vector when B passes

    /// Continuation runs when A.2 and B hold and A.3 did not fail (an
    /// undetermined A.3 proceeds with a warning; a failed one needs override).
    bool permits_continuation(bool override_escape = false) const {
        return leaves.verdict == Verdict::pass && condition_b.verdict == Verdict::pass &&
               (escape.verdict != Verdict::fail || override_escape);
    }
};

struct EscapeCheckOptions {
    double grid_bound = 1e6;   // largest probed b_i
    int grid_points = 18;      // geometric grid resolution per axis
    int cross_samples = 128;   // sampled configurations of the other coordinates
};

AssumptionReport check_assumptions(const DModel& model, const Condition& cond,
                                   const EscapeCheckOptions& opts = {});

template <class F>
AssumptionReport check_assumptions(const Model<F>& model, const Condition& cond,
                                   const EscapeCheckOptions& opts = {}) {
    return check_assumptions(to_double_model(model), cond, opts);
}

bool is_irreducible(const std::vector<std::vector<double>>& mean);

} // namespace bgwtilt
