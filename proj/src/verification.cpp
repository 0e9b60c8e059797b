#include "ch2/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ch2 {

namespace {

constexpr double kFdFloor = 1e-11;  // below this the FD signal is roundoff

DensityProfile adjusted_profile(const FamilyTrajectory& traj, double t,
                                const ResidualOptions& opts) {
    DensityProfile p = profile_at(traj, t);
    p.q0 += opts.corrupt_q0;
    p.q1 += opts.corrupt_q1;
    p.q2 = opts.q2_factor * p.q2 + opts.corrupt_q2;
    return p;
}

struct PointContext {
    DensityProfile minus, center, plus;
    DensityProfile base;     // unadjusted profile at t; defines the interior
    DirectState state;       // at t
    DirectState state_minus; // at t_minus
    DirectState state_plus;  // at t_plus
    double t_minus = 0.0;    // clamped difference arms
    double t_plus = 0.0;
};

PointContext make_context(const FamilyTrajectory& traj, double t, const ResidualOptions& opts) {
    const double dt = opts.dt_fd;
    const double slack = 1e-12 * (1.0 + std::abs(t));  // roundoff at the window edge
    if (t - dt < traj.t_min() - slack || t + dt > traj.t_max() + slack)
        throw Error(ErrorCode::OUT_OF_RANGE, "t +- dt_fd leaves the trajectory range");
    PointContext ctx;
    ctx.t_minus = std::max(t - dt, traj.t_min());
    ctx.t_plus = std::min(t + dt, traj.t_max());
    ctx.minus = adjusted_profile(traj, ctx.t_minus, opts);
    ctx.center = adjusted_profile(traj, t, opts);
    ctx.plus = adjusted_profile(traj, ctx.t_plus, opts);
    ctx.base = profile_at(traj, t);
    ctx.state = traj.state_at(t);
    ctx.state_minus = traj.state_at(ctx.t_minus);
    ctx.state_plus = traj.state_at(ctx.t_plus);
    return ctx;
}

double point_mass_residual(const PointContext& ctx, double x) {
    const double span = ctx.t_plus - ctx.t_minus;
    const double dq0 = (ctx.plus.q0 - ctx.minus.q0) / span;
    const double dq1 = (ctx.plus.q1 - ctx.minus.q1) / span;
    const double dq2 = (ctx.plus.q2 - ctx.minus.q2) / span;
    const double u = ctx.state.c * x + ctx.state.b;
    const double rho_sq = ctx.center.rho_sq_raw(x);
    const double drho_sq_dx = ctx.center.q1 + 2.0 * ctx.center.q2 * x;
    return 0.5 * (dq0 + (dq1 + dq2 * x) * x) + 0.5 * u * drho_sq_dx + rho_sq * ctx.state.c;
}

double point_momentum_residual(const PointContext& ctx, double x, int sigma) {
    const double span = ctx.t_plus - ctx.t_minus;
    const double dc = (ctx.state_plus.c - ctx.state_minus.c) / span;
    const double db = (ctx.state_plus.b - ctx.state_minus.b) / span;
    const double u = ctx.state.c * x + ctx.state.b;
    const double drho_sq_dx = ctx.center.q1 + 2.0 * ctx.center.q2 * x;
    return dc * x + db + 3.0 * u * ctx.state.c + 0.5 * sigma * drho_sq_dx;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

struct SampleNorms {
    double mass_linf = 0.0, momentum_linf = 0.0;
    double mass_sq = 0.0, momentum_sq = 0.0;
    long interior = 0;
    long candidates = 0;
};

SampleNorms sample_residuals(const FamilyTrajectory& traj, const VerifyWindow& window, int nt,
                             int nx, const ResidualOptions& opts) {
    SampleNorms norms;
    const double t_lo = std::max(window.t0, traj.t_min() + opts.dt_fd);
    const double t_hi = std::min(window.t1, traj.t_max() - opts.dt_fd);
    if (!(t_hi >= t_lo))
        throw Error(ErrorCode::OUT_OF_RANGE, "verification window leaves no usable times");
    for (double t : linspace(t_lo, t_hi, nt)) {
        const PointContext ctx = make_context(traj, t, opts);
        for (double x : linspace(window.x_lo, window.x_hi, nx)) {
            ++norms.candidates;
            if (!interior_point(ctx.base, x, window.geometry, opts.delta_rel)) continue;
            ++norms.interior;
            const double rm = std::abs(point_mass_residual(ctx, x));
            const double rp = std::abs(point_momentum_residual(ctx, x, traj.params.sigma));
            norms.mass_linf = std::max(norms.mass_linf, rm);
            norms.momentum_linf = std::max(norms.momentum_linf, rp);
            norms.mass_sq += rm * rm;
            norms.momentum_sq += rp * rp;
        }
    }
    return norms;
}

}  // namespace

bool interior_point(const DensityProfile& p, double x, Geometry geometry, double delta_rel) {
    if (geometry == Geometry::RADIAL && !(x > 0.0)) return false;
    const double raw = p.rho_sq_raw(x);
    if (!(raw > 0.0)) return false;
    // Profile scale: vertex value for a downward parabola, otherwise the
    // larger of the centre value and the local value.
    double scale;
    if (p.q2 < 0.0) {
        scale = p.q0 - p.q1 * p.q1 / (4.0 * p.q2);
    } else {
        scale = std::max(p.q0, raw);
    }
    if (!(scale > 0.0) || raw < delta_rel * scale) return false;
    if (p.q2 != 0.0) {
        const double disc = p.q1 * p.q1 - 4.0 * p.q2 * p.q0;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double margin = 2.0 * std::abs(p.q1 / p.q2) * 1e-3;
            for (double r : {(-p.q1 + sq) / (2.0 * p.q2), (-p.q1 - sq) / (2.0 * p.q2)})
                if (std::abs(x - r) < margin) return false;
        }
    }
    return true;
}

double mass_residual(const FamilyTrajectory& traj, double x, double t, const ResidualOptions& opts) {
    const PointContext ctx = make_context(traj, t, opts);
    if (!interior_point(ctx.base, x, Geometry::LINE, opts.delta_rel))
        throw Error(ErrorCode::BOUNDARY_POINT, "(x, t) outside the delta-interior of the support");
    return point_mass_residual(ctx, x);
}

double momentum_residual(const FamilyTrajectory& traj, double x, double t,
                         const ResidualOptions& opts) {
    const PointContext ctx = make_context(traj, t, opts);
    if (!interior_point(ctx.base, x, Geometry::LINE, opts.delta_rel))
        throw Error(ErrorCode::BOUNDARY_POINT, "(x, t) outside the delta-interior of the support");
    return point_momentum_residual(ctx, x, traj.params.sigma);
}

ResidualReport verify_full(const FamilyTrajectory& traj, const VerifyWindow& window, double tol,
                           const ResidualOptions& opts) {
    int nt = window.n_time;
    int nx = window.n_x;
    SampleNorms norms;
    for (int attempt = 0; attempt < 5; ++attempt) {
        norms = sample_residuals(traj, window, nt, nx, opts);
        if (norms.interior >= window.min_interior) break;
        if (norms.interior == 0 && attempt == 4) break;
        nx = 2 * nx - 1;
        if (attempt >= 2) nt = 2 * nt - 1;
    }
    if (norms.interior == 0)
        throw Error(ErrorCode::EMPTY_INTERIOR, "support interior vanished over the whole window");

    ResidualReport report;
    report.mass_linf = norms.mass_linf;
    report.momentum_linf = norms.momentum_linf;
    report.mass_l2 = std::sqrt(norms.mass_sq / norms.interior);
    report.momentum_l2 = std::sqrt(norms.momentum_sq / norms.interior);
    report.dt_fd = opts.dt_fd;
    report.interior_fraction = static_cast<double>(norms.interior) / norms.candidates;
    report.interior_points = norms.interior;
    report.tolerance = tol;
    report.passed = norms.mass_linf <= tol && norms.momentum_linf <= tol;
    report.window = window;
    report.window.n_time = nt;
    report.window.n_x = nx;
    return report;
}

ResidualReport convergence_study(const FamilyTrajectory& traj, const VerifyWindow& window,
                                 const std::vector<double>& dt_sequence, double tol,
                                 const ResidualOptions& opts) {
    if (dt_sequence.size() < 3)
        throw Error(ErrorCode::VALIDATION_ERROR, "dt sequence must have at least 3 entries");
    for (std::size_t i = 1; i < dt_sequence.size(); ++i)
        if (!(dt_sequence[i] < dt_sequence[i - 1]))
            throw Error(ErrorCode::VALIDATION_ERROR, "dt sequence must be strictly decreasing");

    ResidualReport report;
    std::vector<double> log_dt, log_res;
    double floor_seen = std::numeric_limits<double>::infinity();
    for (double dt : dt_sequence) {
        ResidualOptions o = opts;
        o.dt_fd = dt;
        const ResidualReport r = verify_full(traj, window, tol, o);
        const double linf = std::max(r.mass_linf, r.momentum_linf);
        floor_seen = std::min(floor_seen, linf);
        if (linf > kFdFloor) {
            log_dt.push_back(std::log(dt));
            log_res.push_back(std::log(linf));
        }
        if (dt == dt_sequence.back()) report = r;
    }
    report.fd_floor = floor_seen;
    if (log_dt.size() >= 2) {
        // Least-squares slope of log residual vs log dt.
        const double n = static_cast<double>(log_dt.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < log_dt.size(); ++i) {
            sx += log_dt[i];
            sy += log_res[i];
            sxx += log_dt[i] * log_dt[i];
            sxy += log_dt[i] * log_res[i];
        }
        const double denom = n * sxx - sx * sx;
        if (denom != 0.0) report.convergence_order = (n * sxy - sx * sy) / denom;
    }
    return report;
}

const std::vector<GoldenSolution>& golden_solutions() {
    static const std::vector<GoldenSolution> golden = [] {
        std::vector<GoldenSolution> v;

        // Static member: u = 0, rho^2 = alpha_sq. Both equations vanish
        // term by term.
        {
            GoldenSolution g;
            g.name = "static";
            g.params = FamilyParams{1, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0};
            g.rho_sq = [](double, double) { return 1.0; };
            g.u = [](double, double) { return 0.0; };
            g.t_valid_lo = 0.0;
            g.t_valid_hi = 4.0;
            v.push_back(std::move(g));
        }

        // Pure b-drift: c = w = 0, b = t, R = 4 + t^2, so u = t and
        // rho^2 = 4 + t^2 - 2x. Mass: (1/2)(2t) + (t/2)(-2) = 0.
        // Momentum: 1 + 0 + (1/2)(-2) = 0.
        {
            GoldenSolution g;
            g.name = "b_drift";
            g.params = FamilyParams{1, 1.0, 0.0, 0.0, 0.0, 1.0, 4.0};
            g.rho_sq = [](double x, double t) { return 4.0 + t * t - 2.0 * x; };
            g.u = [](double, double t) { return t; };
            g.t_valid_lo = 0.0;
            g.t_valid_hi = 2.0;
            v.push_back(std::move(g));
        }

        // Contracting Hubble flow with xi = 0: c = -1/(1-3t), b = 0,
        // rho^2 = (1-3t)^(-2/3). Mass: (1/2)(rho^2)_t + rho^2 c = 0 since
        // (rho^2)_t = 2(1-3t)^(-5/3) = -2 c rho^2. Momentum: (c' + 3c^2) x = 0.
        {
            GoldenSolution g;
            g.name = "hubble_contraction";
            g.params = FamilyParams{1, 1.0, -1.0, 0.0, 0.0, 0.0, 1.0};
            g.rho_sq = [](double, double t) { return std::pow(1.0 - 3.0 * t, -2.0 / 3.0); };
            g.u = [](double x, double t) { return -x / (1.0 - 3.0 * t); };
            g.t_valid_lo = 0.0;
            g.t_valid_hi = 0.3;
            v.push_back(std::move(g));
        }
        return v;
    }();
    return golden;
}

}  // namespace ch2
