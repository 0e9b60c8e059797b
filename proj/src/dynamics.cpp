#include "ch2/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ch2 {

namespace {

double inv_cbrt(double a) { return 1.0 / std::cbrt(a); }

DirectState unpack_direct(const std::vector<double>& y) {
    return DirectState{y[0], y[1], y[2], y[3], y[4]};
}

EmdenState unpack_emden(const std::vector<double>& y) { return EmdenState{y[0], y[1]}; }

}  // namespace

void FamilyParams::validate() const {
    if (sigma != 1 && sigma != -1)
        throw Error(ErrorCode::VALIDATION_ERROR, "sigma must be 1 or -1");
    if (!(a0 > 0.0)) throw Error(ErrorCode::VALIDATION_ERROR, "a0 must be > 0 (a(0) = a0 > 0)");
    if (!(alpha_sq >= 0.0))
        throw Error(ErrorCode::VALIDATION_ERROR, "alpha_sq must be >= 0 (rho^2(0,0))");
    for (double v : {a0, a1, xi, b0, b1, alpha_sq})
        if (!std::isfinite(v)) throw Error(ErrorCode::VALIDATION_ERROR, "parameters must be finite");
}

DirectState direct_rhs(const DirectState& y, int sigma) {
    DirectState d;
    d.c = y.w - 3.0 * y.c * y.c;
    d.w = -4.0 * y.w * y.c;
    d.b = y.db;
    d.db = -6.0 * y.c * y.db - 4.0 * y.w * y.b;
    d.R = -2.0 * y.c * y.R + (2.0 / sigma) * y.b * (y.db + 3.0 * y.b * y.c);
    return d;
}

EmdenDeriv emden_rhs(const EmdenState& y, double xi) {
    if (!(y.a > 0.0))
        throw Error(ErrorCode::NONPOSITIVE_SCALE, "scale factor must be strictly positive");
    return EmdenDeriv{y.da, xi * inv_cbrt(y.a)};
}

double emden_energy(const EmdenState& y, double xi) {
    const double a23 = std::cbrt(y.a) * std::cbrt(y.a);
    return 0.5 * y.da * y.da - 1.5 * xi * a23;
}

DirectState emden_to_direct(const FamilyParams& params) {
    if (!(params.a0 > 0.0))
        throw Error(ErrorCode::NONPOSITIVE_SCALE, "a0 must be > 0 (a(0) = a0 > 0)");
    DirectState s;
    s.c = params.a1 / params.a0;
    s.w = 3.0 * params.xi / (params.a0 * std::cbrt(params.a0));
    s.b = params.b0;
    s.db = params.b1;
    s.R = params.alpha_sq;
    return s;
}

EmdenGauge direct_to_emden(double c0, double w0) { return EmdenGauge{1.0, c0, w0 / 3.0}; }

ode::IntegratorConfig default_family_config() {
    ode::IntegratorConfig cfg;
    cfg.method = ode::Method::ADAPTIVE_EMBEDDED;
    cfg.h_init = 1e-3;
    cfg.h_min = 1e-14;
    cfg.h_max = 5e-3;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-10;
    cfg.max_steps = 2'000'000;
    cfg.blowup_guard = 1e12;
    return cfg;
}

DirectState FamilyTrajectory::state_at(double t) const { return unpack_direct(direct.state_at(t)); }

EmdenState FamilyTrajectory::emden_state_at_s(double s) const {
    return unpack_emden(emden.state_at(s));
}

FamilyTrajectory integrate_family(const FamilyParams& params, double t_end,
                                  const ode::IntegratorConfig& config) {
    params.validate();
    if (!(t_end > 0.0)) throw Error(ErrorCode::VALIDATION_ERROR, "t_end must be > 0");

    FamilyTrajectory traj;
    traj.params = params;

    const DirectState init = emden_to_direct(params);
    const int sigma = params.sigma;

    ode::IvpProblem direct_problem;
    direct_problem.dimension = 5;
    direct_problem.t0 = 0.0;
    direct_problem.t_end = t_end;
    direct_problem.y0 = {init.c, init.w, init.b, init.db, init.R};
    direct_problem.rhs = [sigma](double, const std::vector<double>& y, std::vector<double>& dydt) {
        const DirectState d = direct_rhs(DirectState{y[0], y[1], y[2], y[3], y[4]}, sigma);
        dydt = {d.c, d.w, d.b, d.db, d.R};
    };
    traj.direct = ode::integrate(direct_problem, config);

    const double xi = params.xi;
    ode::IvpProblem emden_problem;
    emden_problem.dimension = 2;
    emden_problem.t0 = 0.0;
    emden_problem.t_end = 3.0 * t_end;
    emden_problem.y0 = {params.a0, params.a1};
    emden_problem.rhs = [xi](double, const std::vector<double>& y, std::vector<double>& dydt) {
        dydt.resize(2);
        dydt[0] = y[1];
        // Nonpositive scale yields NaN so the step controller rejects rather
        // than integrating through the singularity.
        dydt[1] = (y[0] > 0.0) ? xi * inv_cbrt(y[0]) : std::numeric_limits<double>::quiet_NaN();
    };
    ode::IntegratorConfig emden_cfg = config;  // step bounds rescale with s = 3t
    emden_cfg.h_init = config.h_init * 3.0;
    emden_cfg.h_min = config.h_min * 3.0;
    emden_cfg.h_max = config.h_max * 3.0;
    traj.emden = ode::integrate(emden_problem, emden_cfg);

    const double s_back = traj.emden.t_back();
    const double w0 = init.w;
    for (double t : traj.direct.times) {
        const double s = 3.0 * t;
        if (s > s_back) break;
        const DirectState d = unpack_direct(traj.direct.state_at(t));
        const EmdenState e = unpack_emden(traj.emden.state_at(s));
        traj.times.push_back(t);
        traj.direct_states.push_back(d);
        traj.emden_states.push_back(e);
        traj.energies.push_back(emden_energy(e, xi));

        // dw/dt = -4wc cannot change the sign of w.
        if (w0 != 0.0 && d.w * w0 < 0.0 && std::abs(d.w) > 1e-9 * std::abs(w0))
            throw std::logic_error("w sign preservation violated along trajectory");
    }
    if (traj.times.empty()) {
        // Degenerate alignment (scale factor stopped immediately); keep t = 0.
        traj.times.push_back(0.0);
        traj.direct_states.push_back(init);
        traj.emden_states.push_back(EmdenState{params.a0, params.a1});
        traj.energies.push_back(emden_energy(traj.emden_states.front(), xi));
    }
    return traj;
}

double rho0_closed_form(const FamilyTrajectory& traj, double t, double tol) {
    if (!traj.in_range(t)) throw Error(ErrorCode::OUT_OF_RANGE, "time outside trajectory range");
    if (t == 0.0) return traj.params.alpha_sq;

    const double sigma = traj.params.sigma;
    auto H = [&](double tau) { return 2.0 * traj.state_at(tau).c; };
    auto G = [&](double tau) {
        const DirectState s = traj.state_at(tau);
        return (2.0 / sigma) * s.b * (s.db + 3.0 * s.b * s.c);
    };

    // Cumulative Simpson for mu = exp(int 2c) and the outer integral of mu*G,
    // refined until the Richardson estimate meets tol.
    auto evaluate = [&](int n) {
        const double h = t / n;
        double I = 0.0;  // int_0^tau 2c
        double J = 0.0;  // int_0^tau mu G
        for (int j = 0; j < n; ++j) {
            const double t0 = j * h;
            const double tq = t0 + 0.25 * h;
            const double tm = t0 + 0.5 * h;
            const double t1 = t0 + h;
            const double f0 = H(t0), fq = H(tq), fm = H(tm), f1 = H(t1);
            const double I_mid = I + (h / 12.0) * (f0 + 4.0 * fq + fm);
            const double I_end = I + (h / 6.0) * (f0 + 4.0 * fm + f1);
            J += (h / 6.0) * (std::exp(I) * G(t0) + 4.0 * std::exp(I_mid) * G(tm) +
                              std::exp(I_end) * G(t1));
            I = I_end;
        }
        return std::pair<double, double>{I, J};
    };

    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = 64; n <= (1 << 20); n *= 2) {
        const auto [I, J] = evaluate(n);
        const double value = (J + traj.params.alpha_sq) / std::exp(I);
        if (std::isfinite(prev) && std::abs(value - prev) <= tol * std::max(1.0, std::abs(value)))
            return value + (value - prev) / 15.0;
        prev = value;
    }
    throw Error(ErrorCode::QUADRATURE_FAILURE, "integrating-factor quadrature did not converge");
}

double relative_energy_drift(const ode::Trajectory& emden_run, double xi) {
    const double e0 = emden_energy(EmdenState{emden_run.states.front()[0],
                                              emden_run.states.front()[1]}, xi);
    double drift = 0.0;
    for (const auto& y : emden_run.states) {
        const double e = emden_energy(EmdenState{y[0], y[1]}, xi);
        drift = std::max(drift, std::abs(e - e0));
    }
    return drift / std::max(1.0, std::abs(e0));
}

}  // namespace ch2
