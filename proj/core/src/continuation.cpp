#include "bgwtilt/continuation.hpp"

#include "bgwtilt/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace bgwtilt {

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::crossing: return "crossing";
        case StopReason::domain_exit: return "domain_exit";
        case StopReason::degenerate: return "degenerate";
        case StopReason::step_limit: return "step_limit";
        default: return "curve_lost";
    }
}

namespace {

unsigned gamma_at(const Condition& cond, int i) {
    return (*cond.reduced)[static_cast<std::size_t>(i)];
}

} // namespace

double g_pair(const DModel& m, const Condition& cond, int i, int j, const std::vector<double>& b) {
    if (!cond.reduced) throw TiltError("reduced gamma required");
    unsigned gi = gamma_at(cond, i), gj = gamma_at(cond, j);
    double phi_i = eval_pgf(m, i, b), phi_j = eval_pgf(m, j, b);
    return ipow(b[static_cast<std::size_t>(j)], gi) * ipow(phi_i, gj) -
           ipow(b[static_cast<std::size_t>(i)], gj) * ipow(phi_j, gi);
}

std::vector<double> g_functions(const DModel& m, const Condition& cond,
                                const std::vector<double>& b) {
    const int K = m.num_types;
    const int p = cond.pivot();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(K - 1));
    for (int j = 0; j < K; ++j)
        if (j != p) out.push_back(g_pair(m, cond, p, j, b));
    return out;
}

Eigen::MatrixXd g_jacobian(const DModel& m, const Condition& cond, const std::vector<double>& b) {
    const int K = m.num_types;
    const int p = cond.pivot();
    const auto pu = static_cast<std::size_t>(p);
    Eigen::MatrixXd jac(K - 1, K);
    double phi_p = eval_pgf(m, p, b);
    auto grad_p = eval_pgf_gradient(m, p, b);
    int row = 0;
    for (int j = 0; j < K; ++j) {
        if (j == p) continue;
        const auto ju = static_cast<std::size_t>(j);
        unsigned gj = gamma_at(cond, j);
        double phi_j = eval_pgf(m, j, b);
        auto grad_j = eval_pgf_gradient(m, j, b);
        double phi_p_gj1 = ipow(phi_p, gj - 1);
        double bp_gj1 = ipow(b[pu], gj - 1);
        for (int mcol = 0; mcol < K; ++mcol) {
            const auto mu = static_cast<std::size_t>(mcol);
            double v = b[ju] * gj * phi_p_gj1 * grad_p[mu] - b[pu] * bp_gj1 * grad_j[mu];
            if (mcol == j) v += phi_p_gj1 * phi_p;
            if (mcol == p) v -= gj * bp_gj1 * phi_j;
            jac(row, mcol) = v;
        }
        ++row;
    }
    return jac;
}

bool ChartDiagnostics::degenerate(double rel_tol) const {
    double max_det = 0;
    for (double d : dets) max_det = std::max(max_det, std::abs(d));
    return max_det < rel_tol * det_scale;
}

ChartDiagnostics h_functions_and_charts(const DModel& m, const Condition& cond,
                                        const std::vector<double>& b) {
    if (!cond.reduced) throw TiltError("reduced gamma required");
    const int K = m.num_types;
    for (double v : b)
        if (!(v > 0)) throw NumericalError("charts require strictly positive coordinates");

    std::vector<double> delta(static_cast<std::size_t>(K));
    std::vector<double> phi(static_cast<std::size_t>(K));
    std::vector<std::vector<double>> grad(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        delta[iu] = 1.0 / gamma_at(cond, i);
        phi[iu] = eval_pgf(m, i, b);
        grad[iu] = eval_pgf_gradient(m, i, b);
    }
    auto phi_pow = [&](int i) { return std::pow(phi[static_cast<std::size_t>(i)], delta[static_cast<std::size_t>(i)]); };
    auto b_pow = [&](int i) { return std::pow(b[static_cast<std::size_t>(i)], delta[static_cast<std::size_t>(i)]); };
    // d/db_{j'} of phi_i^{delta_i}
    auto dphi_pow = [&](int i, int jp) {
        const auto iu = static_cast<std::size_t>(i);
        return delta[iu] * std::pow(phi[iu], delta[iu] - 1.0) * grad[iu][static_cast<std::size_t>(jp)];
    };

    ChartDiagnostics out;
    out.h.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(K), 0.0));
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            out.h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                b_pow(j) * phi_pow(i) - b_pow(i) * phi_pow(j);

    double max_scale = 0;
    for (int i = 0; i < K; ++i) {
        Eigen::MatrixXd I(K - 1, K - 1);
        int row = 0;
        for (int j = 0; j < K; ++j) {
            if (j == i) continue;
            const auto ju = static_cast<std::size_t>(j);
            int col = 0;
            for (int jp = 0; jp < K; ++jp) {
                if (jp == i) continue;
                double v = b_pow(j) * dphi_pow(i, jp) - b_pow(i) * dphi_pow(j, jp);
                if (jp == j)
                    v += delta[ju] * std::pow(b[ju], delta[ju] - 1.0) * phi_pow(i);
                I(row, col) = v;
                ++col;
            }
            ++row;
        }
        double det = K == 1 ? 1.0 : I.partialPivLu().determinant();
        out.jacobians.push_back(std::move(I));
        out.dets.push_back(det);
        double fro = K == 1 ? 1.0 : out.jacobians.back().norm();
        max_scale = std::max(max_scale, std::pow(fro, static_cast<double>(K - 1)));
    }
    out.det_scale = std::max(max_scale, 1e-300);
    return out;
}

namespace {

// Newton on G with coordinate `fixed` pinned; updates b in place.
bool newton_on_g_fixed_coord(const DModel& m, const Condition& cond, std::vector<double>& b,
                             int fixed, int max_iter = 60) {
    const int K = m.num_types;
    if (K == 1) return true;
    for (int it = 0; it < max_iter; ++it) {
        auto g = g_functions(m, cond, b);
        double norm = 0;
        for (double v : g) norm = std::max(norm, std::abs(v));
        if (norm <= 1e-13) return true;
        Eigen::MatrixXd jac = g_jacobian(m, cond, b);
        Eigen::MatrixXd jred(K - 1, K - 1);
        int col = 0;
        for (int j = 0; j < K; ++j) {
            if (j == fixed) continue;
            jred.col(col++) = jac.col(j);
        }
        Eigen::VectorXd rhs(K - 1);
        for (int r = 0; r < K - 1; ++r) rhs(r) = -g[static_cast<std::size_t>(r)];
        Eigen::VectorXd step = jred.partialPivLu().solve(rhs);
        if (!step.allFinite()) return false;
        col = 0;
        for (int j = 0; j < K; ++j) {
            if (j == fixed) continue;
            b[static_cast<std::size_t>(j)] += step(col++);
        }
        if (step.norm() > 1e6) return false;
    }
    auto g = g_functions(m, cond, b);
    double norm = 0;
    for (double v : g) norm = std::max(norm, std::abs(v));
    return norm <= 1e-12;
}

// Corrector: Newton on [G(x); n.(x - anchor)] = 0.
bool newton_on_g_hyperplane(const DModel& m, const Condition& cond, std::vector<double>& b,
                            const Eigen::VectorXd& n, const Eigen::VectorXd& anchor,
                            int& iters_used, int max_iter = 12) {
    const int K = m.num_types;
    for (int it = 0; it < max_iter; ++it) {
        auto g = g_functions(m, cond, b);
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(b.data(), K);
        double plane = n.dot(x - anchor);
        double gscale = 1e-30;
        for (double v : b) gscale = std::max(gscale, std::abs(v));
        double norm = std::abs(plane);
        for (double v : g) norm = std::max(norm, std::abs(v));
        if (norm <= 1e-13 * std::max(1.0, gscale)) {
            iters_used = it;
            return true;
        }
        Eigen::MatrixXd jac(K, K);
        if (K > 1) jac.topRows(K - 1) = g_jacobian(m, cond, b);
        jac.row(K - 1) = n.transpose();
        Eigen::VectorXd rhs(K);
        for (int r = 0; r < K - 1; ++r) rhs(r) = -g[static_cast<std::size_t>(r)];
        rhs(K - 1) = -plane;
        Eigen::VectorXd step = jac.partialPivLu().solve(rhs);
        if (!step.allFinite()) return false;
        for (int j = 0; j < K; ++j) b[static_cast<std::size_t>(j)] += step(j);
    }
    return false;
}

Eigen::VectorXd curve_tangent(const DModel& m, const Condition& cond,
                              const std::vector<double>& b, const Eigen::VectorXd* prev,
                              int pivot) {
    const int K = m.num_types;
    Eigen::VectorXd t(K);
    if (K == 1) {
        t(0) = 1.0;
    } else {
        Eigen::MatrixXd jac = g_jacobian(m, cond, b);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
        t = svd.matrixV().col(K - 1);
    }
    if (prev) {
        if (t.dot(*prev) < 0) t = -t;
    } else if (t(pivot) < 0) {
        t = -t;
    }
    return t;
}

} // namespace

std::vector<double> seed_near_origin(const DModel& m, const Condition& cond, double eps) {
    if (!cond.reduced) throw TiltError("reduced gamma required");
    if (!(eps > 0)) throw NumericalError("seed eps must be positive");
    const int K = m.num_types;
    const int p = cond.pivot();
    std::vector<double> zero(static_cast<std::size_t>(K), 0.0);
    double phi_p0 = eval_pgf(m, p, zero);
    if (!(phi_p0 > 0)) throw NumericalError("seed requires zeta(empty) > 0 at the pivot type");

    std::vector<double> b(static_cast<std::size_t>(K));
    b[static_cast<std::size_t>(p)] = eps;
    for (int j = 0; j < K; ++j) {
        if (j == p) continue;
        unsigned gj = gamma_at(cond, j);
        double phi_j0 = eval_pgf(m, j, zero);
        b[static_cast<std::size_t>(j)] =
            std::pow(phi_p0, -static_cast<double>(gj)) * phi_j0 * ipow(eps, gj);
    }
    if (!newton_on_g_fixed_coord(m, cond, b, p))
        throw NumericalError("seed correction diverged at eps = " + std::to_string(eps));
    for (double v : b)
        if (!(v > 0)) throw NumericalError("seed left the positive cone at eps = " + std::to_string(eps));
    return b;
}

namespace {

CurvePoint make_point(const DModel& m, const Condition& cond, const std::vector<double>& b,
                      double arclength, double degeneracy_rel_tol) {
    CurvePoint pt;
    pt.b = b;
    pt.beta = implied_beta(m, cond, b);
    pt.rho_tilde = spectral_radius(tilted_m_prime(m, cond, b, pt.beta));
    pt.arclength = arclength;
    auto charts = h_functions_and_charts(m, cond, b);
    pt.jacobian_dets = charts.dets;
    pt.degenerate = charts.degenerate(degeneracy_rel_tol);
    pt.system_residuals = solve_beta_system_residual(m, cond, b, pt.beta);
    return pt;
}

} // namespace

TraceResult trace_curve(const DModel& m, const Condition& cond, const TraceOptions& opts) {
    TraceResult res;
    if (!cond.reduced) {
        res.reason = StopReason::curve_lost;
        res.message = "no rank-1 reduction available";
        return res;
    }
    if (!opts.skip_assumptions) {
        auto rep = check_assumptions(m, cond);
        if (!rep.permits_continuation(opts.override_escape)) {
            res.reason = StopReason::curve_lost;
            res.message = std::string("assumptions do not permit tracing: A.2 ") +
                          verdict_name(rep.leaves.verdict) + ", A.3 " +
                          verdict_name(rep.escape.verdict) + ", B " +
                          verdict_name(rep.condition_b.verdict);
            return res;
        }
        if (rep.escape.verdict == Verdict::undetermined)
            res.message = "warning: A.3 undetermined (polynomial family heuristic); tracing anyway";
    }

    const int K = m.num_types;
    const int p = cond.pivot();

    // seed with geometric retry
    std::vector<double> b;
    double eps = opts.seed_eps;
    for (;;) {
        try {
            b = seed_near_origin(m, cond, eps);
            break;
        } catch (const NumericalError&) {
            eps /= 10.0;
            if (eps < opts.seed_eps_floor) {
                res.reason = StopReason::curve_lost;
                res.message = "seed correction failed down to eps floor";
                return res;
            }
        }
    }

    double arclength = 0;
    res.points.push_back(make_point(m, cond, b, arclength, opts.degeneracy_rel_tol));

    Eigen::VectorXd tangent = curve_tangent(m, cond, b, nullptr, p);
    double h = opts.step_initial;
    int easy_streak = 0;

    for (int step = 0; step < opts.max_steps; ++step) {
        const CurvePoint& prev = res.points.back();
        if (opts.stop_at_crossing && prev.rho_tilde >= 1.0) {
            res.reason = StopReason::crossing;
            return res;
        }
        if (prev.degenerate) {
            res.reason = StopReason::degenerate;
            res.message = "all chart Jacobians singular";
            return res;
        }
        double binf = *std::max_element(prev.b.begin(), prev.b.end());
        if (binf > opts.domain_bound) {
            res.reason = StopReason::domain_exit;
            return res;
        }

        bool accepted = false;
        std::vector<double> next;
        while (!accepted) {
            Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(prev.b.data(), K);
            Eigen::VectorXd anchor = x + h * tangent;
            next.assign(anchor.data(), anchor.data() + K);
            int iters = 0;
            bool ok = false;
            try {
                ok = newton_on_g_hyperplane(m, cond, next, tangent, anchor, iters);
            } catch (const EvalOverflow&) {
                ok = false;
            }
            if (ok)
                for (double v : next)
                    if (!(v > 0)) ok = false;
            if (ok) {
                Eigen::VectorXd nx = Eigen::Map<const Eigen::VectorXd>(next.data(), K);
                if ((nx - x).norm() > 3.0 * h + 1e-12) ok = false; // jumped charts
            }
            if (ok) {
                accepted = true;
                easy_streak = iters <= 4 ? easy_streak + 1 : 0;
                if (easy_streak >= 3) {
                    h = std::min(h * 1.3, opts.step_max);
                    easy_streak = 0;
                }
            } else if (h > opts.step_min) {
                h = std::max(h / 2.0, opts.step_min);
                easy_streak = 0;
            } else {
                // chart switch: hold the dominant tangent coordinate fixed
                int held = 0;
                tangent.cwiseAbs().maxCoeff(&held);
                next = prev.b;
                next[static_cast<std::size_t>(held)] += h * tangent(held);
                bool chart_ok = false;
                try {
                    chart_ok = newton_on_g_fixed_coord(m, cond, next, held);
                } catch (const EvalOverflow&) {
                    chart_ok = false;
                }
                if (chart_ok)
                    for (double v : next)
                        if (!(v > 0)) chart_ok = false;
                if (chart_ok) {
                    accepted = true;
                } else {
                    res.reason = StopReason::curve_lost;
                    res.message = "corrector stagnated at minimal step";
                    return res;
                }
            }
        }

        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(prev.b.data(), K);
        Eigen::VectorXd nx = Eigen::Map<const Eigen::VectorXd>(next.data(), K);
        arclength += (nx - x).norm();
        CurvePoint pt;
        try {
            pt = make_point(m, cond, next, arclength, opts.degeneracy_rel_tol);
        } catch (const EvalOverflow&) {
            res.reason = StopReason::domain_exit;
            res.message = "generating function overflow; treating as domain exit";
            return res;
        }
        res.points.push_back(std::move(pt));
        tangent = curve_tangent(m, cond, next, &tangent, p);
    }
    res.reason = StopReason::step_limit;
    res.message = "step limit reached";
    return res;
}

int count_rho_crossings(const TraceResult& trace) {
    int n = 0;
    for (std::size_t i = 1; i < trace.points.size(); ++i) {
        double a = trace.points[i - 1].rho_tilde - 1.0;
        double b = trace.points[i].rho_tilde - 1.0;
        if (a < 0 && b >= 0) ++n;
        if (a >= 0 && b < 0) ++n;
    }
    return n;
}

namespace {

double rho_at(const DModel& m, const Condition& cond, const std::vector<double>& b) {
    return spectral_radius(tilted_m_prime(m, cond, b, implied_beta(m, cond, b)));
}

// Correct the midpoint of a bracket back onto the curve; returns false when
// Newton fails or leaves the cone.
bool correct_midpoint(const DModel& m, const Condition& cond, const std::vector<double>& lo,
                      const std::vector<double>& hi, std::vector<double>& mid) {
    const int K = m.num_types;
    Eigen::VectorXd xlo = Eigen::Map<const Eigen::VectorXd>(lo.data(), K);
    Eigen::VectorXd xhi = Eigen::Map<const Eigen::VectorXd>(hi.data(), K);
    Eigen::VectorXd anchor = 0.5 * (xlo + xhi);
    Eigen::VectorXd dir = xhi - xlo;
    double len = dir.norm();
    if (len == 0) {
        mid = lo;
        return true;
    }
    dir /= len;
    mid.assign(anchor.data(), anchor.data() + K);
    int iters = 0;
    if (!newton_on_g_hyperplane(m, cond, mid, dir, anchor, iters, 30)) return false;
    for (double v : mid)
        if (!(v > 0)) return false;
    return true;
}

// Full-system polish: Newton on [G(b); rho~(b) - 1] with a finite-difference
// last row. Returns the refined point, or `start` when it does not improve.
std::vector<double> polish_critical(const DModel& m, const Condition& cond,
                                    std::vector<double> start) {
    const int K = m.num_types;
    std::vector<double> best = start;
    double best_defect = std::abs(rho_at(m, cond, best) - 1.0);
    std::vector<double> b = start;
    for (int it = 0; it < 25; ++it) {
        Eigen::VectorXd rhs(K);
        Eigen::MatrixXd jac(K, K);
        auto g = g_functions(m, cond, b);
        for (int r = 0; r < K - 1; ++r) rhs(r) = -g[static_cast<std::size_t>(r)];
        double rho = rho_at(m, cond, b);
        rhs(K - 1) = -(rho - 1.0);
        if (K > 1) jac.topRows(K - 1) = g_jacobian(m, cond, b);
        for (int j = 0; j < K; ++j) {
            double hstep = 1e-7 * std::max(1.0, std::abs(b[static_cast<std::size_t>(j)]));
            auto bp = b, bm = b;
            bp[static_cast<std::size_t>(j)] += hstep;
            bm[static_cast<std::size_t>(j)] -= hstep;
            jac(K - 1, j) = (rho_at(m, cond, bp) - rho_at(m, cond, bm)) / (2 * hstep);
        }
        Eigen::VectorXd step = jac.partialPivLu().solve(rhs);
        if (!step.allFinite()) break;
        for (int j = 0; j < K; ++j) b[static_cast<std::size_t>(j)] += step(j);
        bool in_cone = true;
        for (double v : b) in_cone &= v > 0;
        if (!in_cone) break;
        double defect = std::abs(rho_at(m, cond, b) - 1.0);
        if (defect < best_defect) {
            best = b;
            best_defect = defect;
        }
        if (defect < 1e-13 || step.norm() < 1e-15) break;
    }
    return best;
}

} // namespace

CriticalTilt find_critical_tilting(const DModel& m, const Condition& cond,
                                   const TraceOptions& opts) {
    CriticalTilt out;
    TraceOptions topts = opts;
    topts.stop_at_crossing = true;
    out.trace = trace_curve(m, cond, topts);
    const auto& pts = out.trace.points;

    // locate a bracket [rho < 1, rho >= 1] along the recorded trace
    std::ptrdiff_t hi_idx = -1;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].rho_tilde >= 1.0) {
            hi_idx = static_cast<std::ptrdiff_t>(i);
            break;
        }

    if (out.trace.reason == StopReason::degenerate && !pts.empty()) {
        const auto& last = pts.back();
        out.message = "degenerate point reached, rho~ = " + std::to_string(last.rho_tilde);
        if (last.rho_tilde < 1.0 - 1e-6) out.message += " (below 1: contradicts expectations)";
    }

    if (hi_idx <= 0) {
        if (out.trace.reason == StopReason::domain_exit)
            out.message = "no crossing found within domain bound (consistent with A.3 failure)";
        else if (out.message.empty())
            out.message = "no crossing found: " + std::string(stop_reason_name(out.trace.reason)) +
                          (out.trace.message.empty() ? "" : " (" + out.trace.message + ")");
        if (hi_idx == 0 && !pts.empty()) {
            // seed already at or above 1; cannot bracket from below
            out.message = "first curve point already has rho~ >= 1; no bracket";
        }
        return out;
    }

    std::vector<double> lo = pts[static_cast<std::size_t>(hi_idx - 1)].b;
    std::vector<double> hi = pts[static_cast<std::size_t>(hi_idx)].b;
    double rho_lo = pts[static_cast<std::size_t>(hi_idx - 1)].rho_tilde;

    std::vector<double> best = rho_lo >= 1.0 ? lo : hi;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd xlo = Eigen::Map<const Eigen::VectorXd>(lo.data(), m.num_types);
        Eigen::VectorXd xhi = Eigen::Map<const Eigen::VectorXd>(hi.data(), m.num_types);
        if ((xhi - xlo).norm() < 1e-15) break;
        std::vector<double> mid;
        if (!correct_midpoint(m, cond, lo, hi, mid)) break;
        double rho = rho_at(m, cond, mid);
        if (std::abs(rho - 1.0) <= opts.rho_tol) {
            best = mid;
            break;
        }
        if (rho < 1.0)
            lo = mid;
        else
            hi = mid;
        best = hi;
    }

    best = polish_critical(m, cond, best);

    out.found = true;
    out.params = tilt_from_b(m, best);
    out.params.beta = implied_beta(m, cond, best);
    out.critical_point = make_point(m, cond, best, 0.0, opts.degeneracy_rel_tol);
    out.rho_defect = std::abs(out.critical_point.rho_tilde - 1.0);
    if (out.message.empty()) out.message = "critical tilting located";
    return out;
}

} // namespace bgwtilt
