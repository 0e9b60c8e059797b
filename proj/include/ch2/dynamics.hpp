#pragma once

#include <vector>

#include "ch2/ode.hpp"

namespace ch2 {

/// Seed data selecting one member of the linear-velocity solution family of
/// the 2-component Camassa-Holm system. The velocity ansatz is
/// u(x,t) = c(t) x + b(t) with c(t) = a'(s)/a(s) at stretched time s = 3t,
/// where the scale factor obeys a''(s) = xi * a(s)^(-1/3).
struct FamilyParams {
    int sigma = 1;          // gravity orientation constant, +1 or -1
    double a0 = 1.0;        // a(0) > 0
    double a1 = 0.0;        // a'(0), per unit s
    double xi = 0.0;        // scale-factor forcing constant
    double b0 = 0.0;        // b(0)
    double b1 = 0.0;        // db/dt at t = 0
    double alpha_sq = 1.0;  // rho^2(0,0) >= 0

    void validate() const;  // throws VALIDATION_ERROR naming the violated bound
};

/// Scale-factor state as a function of stretched time s.
struct EmdenState {
    double a = 1.0;
    double da = 0.0;  // da/ds
};

struct EmdenDeriv {
    double da = 0.0;
    double dda = 0.0;
};

/// Self-consistent first-order state evolved in physical time t.
/// w is the recurring bracket dc/dt + 3c^2; R is rho^2(0,t).
struct DirectState {
    double c = 0.0;
    double w = 0.0;
    double b = 0.0;
    double db = 0.0;
    double R = 0.0;
};

/// Scale-factor data (a0, a1, xi) in the gauge a0 = 1.
struct EmdenGauge {
    double a0 = 1.0;
    double a1 = 0.0;
    double xi = 0.0;
};

/// One integrated family member: the direct (c, w, b, db, R) run in t, the
/// scale-factor run in s, and per-sample aligned values at s = 3t together
/// with the conserved scale-factor energy E = (a')^2/2 - (3/2) xi a^(2/3).
struct FamilyTrajectory {
    FamilyParams params;
    ode::Trajectory direct;  // y = (c, w, b, db, R) over t
    ode::Trajectory emden;   // y = (a, da) over s = 3t

    std::vector<double> times;  // aligned physical times (direct accepted steps)
    std::vector<DirectState> direct_states;
    std::vector<EmdenState> emden_states;
    std::vector<double> energies;

    double t_min() const { return times.front(); }
    double t_max() const { return times.back(); }
    bool in_range(double t) const { return t >= t_min() && t <= t_max(); }

    DirectState state_at(double t) const;       // dense; throws OUT_OF_RANGE
    EmdenState emden_state_at_s(double s) const;
};

/// Derivative of the direct system:
///   dc/dt  = w - 3c^2
///   dw/dt  = -4wc
///   db/dt  = db,  d(db)/dt = -6c db - 4wb
///   dR/dt  = -2cR + (2/sigma) b (db + 3bc)
DirectState direct_rhs(const DirectState& y, int sigma);

/// Scale-factor derivative (da/ds, xi * a^(-1/3)); throws NONPOSITIVE_SCALE
/// for a <= 0.
EmdenDeriv emden_rhs(const EmdenState& y, double xi);

double emden_energy(const EmdenState& y, double xi);

/// Initial direct state implied by the scale-factor data:
/// c(0) = a1/a0, w(0) = 3 xi a0^(-4/3), plus (b0, b1, alpha_sq) verbatim.
DirectState emden_to_direct(const FamilyParams& params);

/// Inverse map with the gauge a0 = 1: (c0, w0) -> (1, c0, w0/3).
EmdenGauge direct_to_emden(double c0, double w0);

/// Integrator settings tuned for family runs: steps capped tightly enough
/// that cubic Hermite dense output stays accurate to ~1e-9 for the
/// finite-difference residual pipeline.
ode::IntegratorConfig default_family_config();

/// Integrate both parametrizations of one family member up to t_end (the
/// scale factor to s = 3 t_end) and align the samples. Either leg may stop
/// early with its integrator termination when the scale factor touches down
/// or the Hubble rate diverges.
FamilyTrajectory integrate_family(const FamilyParams& params, double t_end,
                                  const ode::IntegratorConfig& config = default_family_config());

/// rho^2(0,t) by the integrating-factor formula
///   R(t) = (int_0^t mu G dtau + alpha_sq) / mu(t),  mu = exp(int_0^t 2c),
/// evaluated by composite Simpson on dense trajectory samples with
/// Richardson refinement. Independent of the integrated R component.
double rho0_closed_form(const FamilyTrajectory& traj, double t, double tol = 1e-8);

/// Max relative drift of the conserved scale-factor energy over the accepted
/// steps of the s-run, normalized by max(1, |E(0)|).
double relative_energy_drift(const ode::Trajectory& emden_run, double xi);

}  // namespace ch2
