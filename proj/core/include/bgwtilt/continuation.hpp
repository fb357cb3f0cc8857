#pragma once

#include "bgwtilt/assumptions.hpp"
#include "bgwtilt/condition.hpp"
#include "bgwtilt/model.hpp"
#include "bgwtilt/tilting.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bgwtilt {

/// One accepted point of the traced solution curve.
struct CurvePoint {
    std::vector<double> b;
    double beta = 0;
    double rho_tilde = 0;
    double arclength = 0;
    std::vector<double> jacobian_dets; // det I^{(i)} per chart i
    bool degenerate = false;
    std::vector<double> system_residuals; // reduced-system residuals at (b, beta)
};

struct TraceOptions {
    double seed_eps = 1e-3;
    double seed_eps_floor = 1e-6;
    double step_initial = 1e-3;
    double step_min = 1e-8;
    double step_max = 0.1;
    double domain_bound = 1e3;
    int max_steps = 20000;
    double rho_tol = 1e-9;
    bool stop_at_crossing = true;
    bool override_escape = false;  // trace even when A.3 failed
    bool skip_assumptions = false; // callers that already checked
    double degeneracy_rel_tol = 1e-10;
};

enum class StopReason { crossing, domain_exit, degenerate, step_limit, curve_lost };

const char* stop_reason_name(StopReason r);

struct TraceResult {
    std::vector<CurvePoint> points;
    StopReason reason = StopReason::step_limit;
    std::string message;
};

/// G_{i,j}(b) = b_j^{g_i} phi_i(b)^{g_j} - b_i^{g_j} phi_j(b)^{g_i}; entire, so
/// negative coordinates are fine.
double g_pair(const DModel& m, const Condition& cond, int i, int j, const std::vector<double>& b);

/// The reduced constraint map (G_{p,j}, j != p) with p the pivot coordinate.
std::vector<double> g_functions(const DModel& m, const Condition& cond,
                                const std::vector<double>& b);

/// Analytic Jacobian of g_functions, (K-1) x K.
Eigen::MatrixXd g_jacobian(const DModel& m, const Condition& cond, const std::vector<double>& b);

/// Chart diagnostics: H values, Jacobians I^{(i)} and their determinants.
/// Requires b strictly positive (fractional powers).
struct ChartDiagnostics {
    std::vector<std::vector<double>> h; // K x K, antisymmetric
    std::vector<Eigen::MatrixXd> jacobians;
    std::vector<double> dets;
    double det_scale = 1; // max_i ||I^{(i)}||_F^(K-1)
    bool degenerate(double rel_tol) const;
};

ChartDiagnostics h_functions_and_charts(const DModel& m, const Condition& cond,
                                        const std::vector<double>& b);

/// Taylor-seeded point near the origin: b_p = eps,
/// b_j = phi_p(0)^{-g_j} phi_j(0) eps^{g_j}, Newton-corrected onto G = 0 with
/// b_p held fixed. Throws NumericalError on divergence.
std::vector<double> seed_near_origin(const DModel& m, const Condition& cond, double eps);

/// Pseudo-arclength predictor-corrector along the connected solution curve
/// from the origin.
TraceResult trace_curve(const DModel& m, const Condition& cond, const TraceOptions& opts = {});

struct CriticalTilt {
    bool found = false;
    DTilt params;
    CurvePoint critical_point;
    TraceResult trace;
    double rho_defect = 0; // |rho~(b*) - 1|
    std::string message;
};

/// Locates the point of the curve with tilted spectral radius 1 and returns
/// the corresponding tilt. Not finding one inside the domain bound is a
/// reported outcome, not an exception.
CriticalTilt find_critical_tilting(const DModel& m, const Condition& cond,
                                   const TraceOptions& opts = {});

template <class F>
CriticalTilt find_critical_tilting(const Model<F>& m, const Condition& cond,
                                   const TraceOptions& opts = {}) {
    return find_critical_tilting(to_double_model(m), cond, opts);
}

/// Sign changes of rho~ - 1 along a trace (uniqueness diagnostics).
int count_rho_crossings(const TraceResult& trace);

} // namespace bgwtilt
