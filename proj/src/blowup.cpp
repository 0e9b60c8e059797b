#include "ch2/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace ch2 {

namespace {

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

double conserved_energy(double a0, double a1, double xi) {
    const double a023 = std::cbrt(a0) * std::cbrt(a0);
    return 0.5 * a1 * a1 - 1.5 * xi * a023;
}

// Touch-down time for xi < 0. With a = z^3 the energy integral becomes
// 3/beta * int z^2 / sqrt(zmax^2 - z^2) dz, beta = sqrt(-3 xi), and the sine
// substitution z = zmax sin(theta) removes the turning-point singularity:
// the arc time between theta_a and theta_b is (3 zmax^2 / beta) int sin^2.
double touchdown_negative_xi(double a0, double a1, double xi, double tol) {
    const double E = conserved_energy(a0, a1, xi);
    const double beta = std::sqrt(-3.0 * xi);
    const double zmax = std::sqrt(2.0 * E) / beta;
    const double z0 = std::cbrt(a0);
    const double scale = 3.0 * zmax * zmax / beta;
    auto arc = [&](double theta_a, double theta_b, double tol_part) {
        return scale *
               adaptive_simpson([](double th) { const double s = std::sin(th); return s * s; },
                                theta_a, theta_b, tol_part / scale);
    };
    const double half_pi = 0.5 * std::numbers::pi;
    const double theta0 =
        (a1 == 0.0) ? half_pi : std::asin(std::clamp(z0 / zmax, 0.0, 1.0));
    if (a1 <= 0.0) return arc(0.0, theta0, tol);
    // Upward launch: ride to the apex a_max = zmax^3, then fall all the way.
    return 2.0 * arc(0.0, half_pi, 0.5 * tol) - arc(0.0, theta0, 0.5 * tol);
}

// Touch-down time for xi > 0 with enough kinetic energy (E >= 0, a1 < 0):
// the descent is monotone and the z-form integrand is smooth.
double touchdown_positive_xi(double a0, double a1, double xi, double tol) {
    const double E = conserved_energy(a0, a1, xi);
    const double z0 = std::cbrt(a0);
    return adaptive_simpson(
        [&](double z) {
            if (z == 0.0) return 0.0;  // the E = 0 limit of the integrand
            return 3.0 * z * z / std::sqrt(2.0 * E + 3.0 * xi * z * z);
        },
        0.0, z0, tol);
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

const char* blowup_case_name(BlowupCase c) {
    switch (c) {
        case BlowupCase::XI_NEGATIVE_TOUCHDOWN: return "XI_NEGATIVE_TOUCHDOWN";
        case BlowupCase::XI_ZERO_LINEAR_BLOWUP: return "XI_ZERO_LINEAR_BLOWUP";
        case BlowupCase::XI_POSITIVE_KINETIC_TOUCHDOWN: return "XI_POSITIVE_KINETIC_TOUCHDOWN";
        case BlowupCase::GLOBAL: return "GLOBAL";
    }
    return "?";
}

const char* verdict_method_name(VerdictMethod m) {
    switch (m) {
        case VerdictMethod::ANALYTIC: return "ANALYTIC";
        case VerdictMethod::EVENT_DETECTED: return "EVENT_DETECTED";
        case VerdictMethod::QUADRATURE: return "QUADRATURE";
    }
    return "?";
}

double touchdown_time_quadrature(double a0, double a1, double xi, double tol) {
    if (!(a0 > 0.0)) throw Error(ErrorCode::NONPOSITIVE_SCALE, "a0 must be > 0");
    if (!(xi < 0.0)) throw Error(ErrorCode::NONNEGATIVE_XI, "touch-down quadrature requires xi < 0");
    return touchdown_negative_xi(a0, a1, xi, tol);
}

double touchdown_time_energy(double a0, double a1, double xi, double tol) {
    if (!(a0 > 0.0)) throw Error(ErrorCode::NONPOSITIVE_SCALE, "a0 must be > 0");
    if (xi < 0.0) return touchdown_negative_xi(a0, a1, xi, tol);
    if (xi == 0.0) {
        if (a1 < 0.0) return -a0 / a1;
        throw Error(ErrorCode::VALIDATION_ERROR, "xi = 0 with a1 >= 0 never touches down");
    }
    if (a1 < 0.0 && conserved_energy(a0, a1, xi) >= 0.0)
        return touchdown_positive_xi(a0, a1, xi, tol);
    throw Error(ErrorCode::VALIDATION_ERROR, "parameters are global; no finite touch-down time");
}

ClassificationVerdict classify(const FamilyParams& params) {
    params.validate();
    const double a0 = params.a0, a1 = params.a1, xi = params.xi;
    ClassificationVerdict v;
    if (xi < 0.0) {
        v.blowup_case = BlowupCase::XI_NEGATIVE_TOUCHDOWN;
        v.method = VerdictMethod::QUADRATURE;
        v.s_star = touchdown_time_quadrature(a0, a1, xi);
        v.detail = "xi < 0: the scale factor always reaches zero; time from the energy integral";
    } else if (xi == 0.0) {
        if (a1 < 0.0) {
            v.blowup_case = BlowupCase::XI_ZERO_LINEAR_BLOWUP;
            v.method = VerdictMethod::ANALYTIC;
            v.s_star = -a0 / a1;
            v.detail = "xi = 0: a(s) = a0 + a1 s is affine; s* = -a0/a1 exactly";
        } else {
            v.detail = "xi = 0 with a1 >= 0: a(s) is affine and nondecreasing";
        }
    } else {
        const double E = conserved_energy(a0, a1, xi);
        if (a1 < 0.0 && E >= 0.0) {
            v.blowup_case = BlowupCase::XI_POSITIVE_KINETIC_TOUCHDOWN;
            v.method = VerdictMethod::QUADRATURE;
            v.s_star = touchdown_time_energy(a0, a1, xi);
            v.detail = "xi > 0 but (1/2) a1^2 >= (3/2) xi a0^(2/3): the inward kinetic energy "
                       "carries a(s) to zero (speed sqrt(2E) at touch-down)";
        } else {
            v.detail = a1 < 0.0
                           ? "xi > 0 with E < 0: a(s) bounces at a_min = (-2E/(3 xi))^(3/2) > 0"
                           : "xi > 0 with a1 >= 0: a(s) is increasing";
        }
    }
    if (v.s_star) v.t_star = *v.s_star / 3.0;
    return v;
}

ClassificationVerdict detect_singularity(const FamilyParams& params, const DetectionOptions& opts) {
    params.validate();
    const double xi = params.xi;

    ode::IvpProblem problem;
    problem.dimension = 2;
    problem.t0 = 0.0;
    problem.t_end = opts.horizon_s;
    problem.y0 = {params.a0, params.a1};
    problem.rhs = [xi](double, const std::vector<double>& y, std::vector<double>& dydt) {
        dydt.resize(2);
        dydt[0] = y[1];
        dydt[1] = (y[0] > 0.0) ? xi / std::cbrt(y[0]) : std::numeric_limits<double>::quiet_NaN();
    };

    std::vector<ode::EventSpec> events;
    for (std::size_t k = 0; k < opts.eps_levels.size(); ++k) {
        const double eps = opts.eps_levels[k];
        ode::EventSpec ev;
        ev.event_fn = [eps](double, const std::vector<double>& y) { return y[0] - eps; };
        ev.direction = ode::EventDirection::FALLING;
        ev.terminal = (k + 1 == opts.eps_levels.size());
        ev.root_tol = opts.root_tol;
        events.push_back(std::move(ev));
    }

    const ode::Trajectory run = ode::integrate(problem, opts.integrator, events);

    // Crossing times per threshold, in descending-eps order.
    std::vector<std::pair<double, double>> hits;  // (eps, s)
    for (const auto& hit : run.event_hits)
        hits.emplace_back(opts.eps_levels[hit.event_index], hit.time);
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    ClassificationVerdict v;
    v.method = VerdictMethod::EVENT_DETECTED;

    const double a_last = run.states.back()[0];
    const double da_last = run.states.back()[1];
    // A touch-down is only claimed when the run actually stopped on the way
    // down; stale non-terminal crossings from a bounce that later escaped to
    // the horizon do not count.
    const bool stopped_descending =
        run.termination == ode::Termination::EVENT ||
        ((run.termination == ode::Termination::STEP_UNDERFLOW ||
          run.termination == ode::Termination::BLOWUP_GUARD) &&
         da_last < 0.0 && a_last < 0.5 * params.a0);

    double s_star = std::numeric_limits<double>::quiet_NaN();
    if (stopped_descending) {
        if (hits.size() >= 3) {
            // Fit s(eps) = s* - C eps^p from the last three thresholds
            // (ratio-10 spacing), then extrapolate to eps = 0.
            const double s_last = hits.back().second;
            const double d_last = s_last - hits[hits.size() - 2].second;
            const double d_prev = hits[hits.size() - 2].second - hits[hits.size() - 3].second;
            const double r = d_prev / d_last;
            s_star = (std::isfinite(r) && r > 1.0) ? s_last + d_last / (r - 1.0) : s_last;
        } else if (hits.size() == 2) {
            // Two thresholds at ratio 10: assume first-order approach to zero.
            s_star = hits.back().second +
                     (hits.back().second - hits.front().second) / 9.0;
        } else if (da_last < 0.0 && a_last > 0.0) {
            // Stopped before (or between) thresholds: linear extrapolation.
            s_star = run.t_back() - a_last / da_last;
        } else if (hits.size() == 1) {
            s_star = hits.front().second;
        }
    }

    if (std::isfinite(s_star)) {
        v.blowup_case = (xi < 0.0)   ? BlowupCase::XI_NEGATIVE_TOUCHDOWN
                        : (xi == 0.0) ? BlowupCase::XI_ZERO_LINEAR_BLOWUP
                                      : BlowupCase::XI_POSITIVE_KINETIC_TOUCHDOWN;
        v.s_star = s_star;
        v.t_star = s_star / 3.0;
        v.detail = "scale-factor thresholds crossed at a = {";
        for (std::size_t i = 0; i < hits.size(); ++i)
            v.detail += (i ? ", " : "") + format_double(hits[i].first);
        v.detail += "}; extrapolated to a = 0";

        if (opts.cross_check_direct) {
            // Corroborate t* = s*/3 by driving the Hubble rate into the guard.
            const DirectState init = emden_to_direct(params);
            ode::IvpProblem direct_problem;
            direct_problem.dimension = 2;
            direct_problem.t0 = 0.0;
            direct_problem.t_end = s_star / 3.0 * 1.5 + 1.0;
            direct_problem.y0 = {init.c, init.w};
            direct_problem.rhs = [](double, const std::vector<double>& y,
                                    std::vector<double>& dydt) {
                dydt.resize(2);
                dydt[0] = y[1] - 3.0 * y[0] * y[0];
                dydt[1] = -4.0 * y[1] * y[0];
            };
            ode::IntegratorConfig cfg = opts.integrator;
            cfg.h_max = std::max(cfg.h_max / 3.0, cfg.h_min);
            const ode::Trajectory direct_run = ode::integrate(direct_problem, cfg);
            if (direct_run.termination == ode::Termination::BLOWUP_GUARD ||
                direct_run.termination == ode::Termination::STEP_UNDERFLOW)
                v.detail += "; Hubble-rate guard tripped at t = " + format_double(direct_run.t_back());
        }
        return v;
    }

    v.blowup_case = BlowupCase::GLOBAL;
    v.detail = "NO_SINGULARITY_FOUND within horizon s = " + format_double(opts.horizon_s) +
               "; a(horizon) = " + format_double(a_last);
    return v;
}

double gradient_blowup_norm(const FamilyTrajectory& traj, double t) {
    if (!traj.in_range(t)) throw Error(ErrorCode::OUT_OF_RANGE, "time outside trajectory range");
    return std::abs(traj.state_at(t).c);
}

}  // namespace ch2
