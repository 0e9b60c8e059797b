#include "ch2/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ch2::ode {

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Dormand-Prince 4(5) tableau. The propagated solution is the 5th-order one;
// the embedded difference drives the error estimate. FSAL: k7 = f(t+h, y_new).
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0,
                 A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = B1 - 5179.0 / 57600.0, E3 = B3 - 7571.0 / 16695.0, E4 = B4 - 393.0 / 640.0,
                 E5 = B5 + 92097.0 / 339200.0, E6 = B6 - 187.0 / 2100.0, E7 = -1.0 / 40.0;
constexpr double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0;

void hermite(double t0, const std::vector<double>& y0, const std::vector<double>& f0, double t1,
             const std::vector<double>& y1, const std::vector<double>& f1, double t,
             std::vector<double>& out) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    out.resize(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i)
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

bool direction_ok(EventDirection dir, double g_lo, double g_hi) {
    if (dir == EventDirection::RISING) return g_lo < 0.0 && g_hi >= 0.0;
    if (dir == EventDirection::FALLING) return g_lo > 0.0 && g_hi <= 0.0;
    return sign_of(g_lo) != sign_of(g_hi);
}

struct StepWorkspace {
    std::vector<double> k2, k3, k4, k5, k6, k7, ytmp, ynew;

    void resize(std::size_t n) {
        for (auto* v : {&k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &ynew}) v->resize(n);
    }
};

}  // namespace

void IntegratorConfig::validate() const {
    if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max))
        throw Error(ErrorCode::VALIDATION_ERROR,
                    "step bounds must satisfy 0 < h_min <= h_init <= h_max");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw Error(ErrorCode::VALIDATION_ERROR, "rel_tol and abs_tol must be > 0");
    if (max_steps <= 0) throw Error(ErrorCode::VALIDATION_ERROR, "max_steps must be positive");
    if (!(blowup_guard > 0.0)) throw Error(ErrorCode::VALIDATION_ERROR, "blowup_guard must be > 0");
}

void IvpProblem::validate() const {
    if (dimension == 0 || dimension != y0.size())
        throw Error(ErrorCode::VALIDATION_ERROR, "dimension must equal length(y0) and be positive");
    if (!rhs) throw Error(ErrorCode::VALIDATION_ERROR, "rhs must be callable");
    if (!(t_end >= t0)) throw Error(ErrorCode::VALIDATION_ERROR, "t_end must be >= t0");
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::REACHED_T_END: return "REACHED_T_END";
        case Termination::EVENT: return "EVENT";
        case Termination::BLOWUP_GUARD: return "BLOWUP_GUARD";
        case Termination::STEP_UNDERFLOW: return "STEP_UNDERFLOW";
        case Termination::MAX_STEPS: return "MAX_STEPS";
    }
    return "?";
}

bool Trajectory::in_range(double t) const {
    return !times.empty() && t >= times.front() && t <= times.back();
}

void Trajectory::dense_eval(double t, std::vector<double>& out) const {
    if (!in_range(t)) throw Error(ErrorCode::OUT_OF_RANGE, "dense_eval time outside trajectory range");
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi == 0) {
        out = states.front();
        return;
    }
    if (hi < times.size() && times[hi] == t) {
        out = states[hi];
        return;
    }
    const std::size_t lo = hi - 1;
    hermite(times[lo], states[lo], derivs[lo], times[hi], states[hi], derivs[hi], t, out);
}

std::vector<double> Trajectory::state_at(double t) const {
    std::vector<double> out;
    dense_eval(t, out);
    return out;
}

double locate_event(double t_lo, const std::vector<double>& y_lo, double t_hi,
                    const std::vector<double>& y_hi, const EventSpec& event,
                    const std::function<void(double, std::vector<double>&)>& dense_eval) {
    double g_lo = event.event_fn(t_lo, y_lo);
    const double g_hi0 = event.event_fn(t_hi, y_hi);
    if (!direction_ok(event.direction, g_lo, g_hi0))
        throw Error(ErrorCode::NO_BRACKET, "endpoint signs do not bracket a crossing in the allowed direction");
    if (g_hi0 == 0.0) return t_hi;
    if (sign_of(g_lo) == 0 || sign_of(g_lo) == sign_of(g_hi0))
        throw Error(ErrorCode::NO_BRACKET, "event function does not change sign across the step");

    std::vector<double> mid_state;
    double lo = t_lo, hi = t_hi;
    while (hi - lo > event.root_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at roundoff resolution
        dense_eval(mid, mid_state);
        const double g_mid = event.event_fn(mid, mid_state);
        if (g_mid == 0.0) return mid;
        if (sign_of(g_mid) == sign_of(g_lo)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Trajectory integrate(const IvpProblem& problem, const IntegratorConfig& config,
                     const std::vector<EventSpec>& events) {
    problem.validate();
    config.validate();
    for (const EventSpec& ev : events) {
        if (!ev.event_fn) throw Error(ErrorCode::VALIDATION_ERROR, "event_fn must be callable");
        if (!(ev.root_tol > 0.0))
            throw Error(ErrorCode::VALIDATION_ERROR, "event root_tol must be > 0");
    }

    const std::size_t n = problem.dimension;
    StepWorkspace ws;
    ws.resize(n);

    Trajectory traj;
    double t = problem.t0;
    std::vector<double> y = problem.y0;

    std::vector<double> f(n);
    problem.rhs(t, y, f);
    if (f.size() != n)
        throw Error(ErrorCode::VALIDATION_ERROR, "rhs output length must equal the dimension");
    if (!all_finite(f) || !all_finite(y))
        throw Error(ErrorCode::NONFINITE_RHS, "right-hand side not finite at the initial point");

    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.derivs.push_back(f);

    std::vector<double> g_prev(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) g_prev[i] = events[i].event_fn(t, y);

    if (problem.t_end == problem.t0) return traj;

    const bool adaptive = config.method == Method::ADAPTIVE_EMBEDDED;
    double h_next = std::clamp(config.h_init, config.h_min, config.h_max);
    double err_old = 1e-4;  // PI controller memory

    // One Dormand-Prince trial from (t, y, f) with step h. Fills ws.ynew and
    // ws.k7; returns the scaled error norm (+inf on nonfinite stages).
    auto dopri_trial = [&](double hc) -> double {
        for (std::size_t i = 0; i < n; ++i) ws.ytmp[i] = y[i] + hc * A21 * f[i];
        problem.rhs(t + C2 * hc, ws.ytmp, ws.k2);
        for (std::size_t i = 0; i < n; ++i) ws.ytmp[i] = y[i] + hc * (A31 * f[i] + A32 * ws.k2[i]);
        problem.rhs(t + C3 * hc, ws.ytmp, ws.k3);
        for (std::size_t i = 0; i < n; ++i)
            ws.ytmp[i] = y[i] + hc * (A41 * f[i] + A42 * ws.k2[i] + A43 * ws.k3[i]);
        problem.rhs(t + C4 * hc, ws.ytmp, ws.k4);
        for (std::size_t i = 0; i < n; ++i)
            ws.ytmp[i] = y[i] + hc * (A51 * f[i] + A52 * ws.k2[i] + A53 * ws.k3[i] + A54 * ws.k4[i]);
        problem.rhs(t + C5 * hc, ws.ytmp, ws.k5);
        for (std::size_t i = 0; i < n; ++i)
            ws.ytmp[i] = y[i] + hc * (A61 * f[i] + A62 * ws.k2[i] + A63 * ws.k3[i] + A64 * ws.k4[i] +
                                      A65 * ws.k5[i]);
        problem.rhs(t + hc, ws.ytmp, ws.k6);
        for (std::size_t i = 0; i < n; ++i)
            ws.ynew[i] = y[i] + hc * (B1 * f[i] + B3 * ws.k3[i] + B4 * ws.k4[i] + B5 * ws.k5[i] +
                                      B6 * ws.k6[i]);
        problem.rhs(t + hc, ws.ynew, ws.k7);

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = hc * (E1 * f[i] + E3 * ws.k3[i] + E4 * ws.k4[i] + E5 * ws.k5[i] +
                                   E6 * ws.k6[i] + E7 * ws.k7[i]);
            const double sc =
                config.abs_tol + config.rel_tol * std::max(std::abs(y[i]), std::abs(ws.ynew[i]));
            sum += (e / sc) * (e / sc);
        }
        if (!all_finite(ws.ynew) || !all_finite(ws.k7) || !std::isfinite(sum))
            return std::numeric_limits<double>::infinity();
        return std::sqrt(sum / static_cast<double>(n));
    };

    auto rk4_trial = [&](double hc) -> bool {
        for (std::size_t i = 0; i < n; ++i) ws.ytmp[i] = y[i] + 0.5 * hc * f[i];
        problem.rhs(t + 0.5 * hc, ws.ytmp, ws.k2);
        for (std::size_t i = 0; i < n; ++i) ws.ytmp[i] = y[i] + 0.5 * hc * ws.k2[i];
        problem.rhs(t + 0.5 * hc, ws.ytmp, ws.k3);
        for (std::size_t i = 0; i < n; ++i) ws.ytmp[i] = y[i] + hc * ws.k3[i];
        problem.rhs(t + hc, ws.ytmp, ws.k4);
        for (std::size_t i = 0; i < n; ++i)
            ws.ynew[i] = y[i] + hc / 6.0 * (f[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
        problem.rhs(t + hc, ws.ynew, ws.k7);
        return all_finite(ws.ynew) && all_finite(ws.k7);
    };

    long steps = 0;
    while (t < problem.t_end) {
        if (++steps > config.max_steps) {
            traj.termination = Termination::MAX_STEPS;
            return traj;
        }
        const double h = std::min(h_next, problem.t_end - t);

        if (adaptive) {
            const double err = dopri_trial(h);
            if (err > 1.0) {
                if (h <= config.h_min * (1.0 + 1e-12)) {
                    traj.termination = Termination::STEP_UNDERFLOW;
                    return traj;
                }
                const double shrink =
                    std::isfinite(err) ? std::max(0.1, 0.9 / std::pow(err, 0.2)) : 0.1;
                h_next = std::max(h * shrink, config.h_min);
                continue;
            }
            // PI controller (order 5, beta = 0.04).
            const double fac11 = std::pow(std::max(err, 1e-32), 0.17);
            double fac = fac11 / std::pow(err_old, 0.04);
            fac = std::clamp(0.9 / fac, 0.2, 5.0);
            err_old = std::max(err, 1e-4);
            h_next = std::clamp(h * fac, config.h_min, config.h_max);
        } else {
            if (!rk4_trial(h)) {
                traj.termination = Termination::STEP_UNDERFLOW;
                return traj;
            }
        }

        const double t_new = (problem.t_end - t <= h) ? problem.t_end : t + h;

        // Event scan over the accepted step, on the step-local Hermite model.
        auto step_dense = [&](double tau, std::vector<double>& out) {
            hermite(t, y, f, t_new, ws.ynew, ws.k7, tau, out);
        };
        struct Crossing {
            std::size_t index;
            double time;
        };
        std::vector<Crossing> crossings;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const double g_new = events[i].event_fn(t_new, ws.ynew);
            if (g_prev[i] != 0.0 && direction_ok(events[i].direction, g_prev[i], g_new) &&
                sign_of(g_prev[i]) != sign_of(g_new)) {
                const double te = (g_new == 0.0)
                                      ? t_new
                                      : locate_event(t, y, t_new, ws.ynew, events[i], step_dense);
                crossings.push_back({i, te});
            }
            g_prev[i] = g_new;
        }
        std::sort(crossings.begin(), crossings.end(),
                  [](const Crossing& a, const Crossing& b) { return a.time < b.time; });
        bool terminated_by_event = false;
        for (const Crossing& c : crossings) {
            std::vector<double> ye;
            step_dense(c.time, ye);
            traj.event_hits.push_back({c.index, c.time, ye});
            if (events[c.index].terminal) {
                std::vector<double> fe(n);
                problem.rhs(c.time, ye, fe);
                traj.times.push_back(c.time);
                traj.states.push_back(ye);
                traj.derivs.push_back(std::move(fe));
                traj.termination = Termination::EVENT;
                traj.event_time = c.time;
                traj.event_state = std::move(ye);
                terminated_by_event = true;
                break;
            }
        }
        if (terminated_by_event) return traj;

        if (max_abs(ws.ynew) > config.blowup_guard) {
            traj.termination = Termination::BLOWUP_GUARD;
            return traj;
        }

        traj.times.push_back(t_new);
        traj.states.push_back(ws.ynew);
        traj.derivs.push_back(ws.k7);
        t = t_new;
        y = ws.ynew;
        f = ws.k7;
    }

    traj.termination = Termination::REACHED_T_END;
    return traj;
}

}  // namespace ch2::ode
