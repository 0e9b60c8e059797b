#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ch2/fields.hpp"

namespace ch2 {

/// Knobs for residual evaluation. q2_factor rescales the x^2 density
/// coefficient (used to discriminate between candidate conventions); the
/// corrupt_* terms inject constant-in-time coefficient perturbations for
/// sensitivity controls. delta_rel sets the support-interior margin.
struct ResidualOptions {
    double dt_fd = 1e-4;
    double q2_factor = 1.0;
    double corrupt_q0 = 0.0;
    double corrupt_q1 = 0.0;
    double corrupt_q2 = 0.0;
    double delta_rel = 1e-6;
};

/// Sampling region for verify_full / convergence_study.
struct VerifyWindow {
    double t0 = 0.0;
    double t1 = 1.0;
    double x_lo = -2.0;
    double x_hi = 2.0;
    Geometry geometry = Geometry::LINE;
    int n_time = 25;
    int n_x = 41;
    int min_interior = 200;
};

struct ResidualReport {
    double mass_linf = 0.0;
    double mass_l2 = 0.0;
    double momentum_linf = 0.0;
    double momentum_l2 = 0.0;
    double dt_fd = 0.0;
    double interior_fraction = 0.0;
    std::optional<double> convergence_order;
    std::optional<double> fd_floor;  // smallest L-inf seen in a refinement study
    bool passed = false;
    double tolerance = 0.0;
    VerifyWindow window;
    long interior_points = 0;
};

/// Exact closed-form member used for regression. The closed forms satisfy the
/// mass and momentum equations identically on the support interior.
struct GoldenSolution {
    std::string name;
    FamilyParams params;
    std::function<double(double x, double t)> rho_sq;
    std::function<double(double x, double t)> u;
    double t_valid_lo = 0.0;
    double t_valid_hi = 1.0;
};

const std::vector<GoldenSolution>& golden_solutions();

/// True when (x, t) lies in the delta-interior of the support at time t:
/// untruncated rho^2 at least delta_rel times the profile scale and clear of
/// the support roots by 2 |q1/q2| * 1e-3 when q2 != 0.
bool interior_point(const DensityProfile& profile, double x, Geometry geometry,
                    double delta_rel = 1e-6);

/// Mass-equation residual (1/2)(rho^2)_t + (u/2)(rho^2)_x + rho^2 c at (x, t)
/// with exact x-derivatives and central differences in t on the profile
/// coefficients. Throws BOUNDARY_POINT outside the delta-interior and
/// OUT_OF_RANGE when t +- dt_fd leaves the trajectory.
double mass_residual(const FamilyTrajectory& traj, double x, double t,
                     const ResidualOptions& opts = {});

/// Momentum-equation residual u_t + 3 u u_x + (sigma/2)(rho^2)_x at (x, t);
/// u_t by central differences on (c, b), the rest exact.
double momentum_residual(const FamilyTrajectory& traj, double x, double t,
                         const ResidualOptions& opts = {});

/// Samples an interior grid of at least window.min_interior points (refining
/// the candidate grid when the support is narrow), computes both residual
/// norms and passes iff both L-inf norms are <= tol.
ResidualReport verify_full(const FamilyTrajectory& traj, const VerifyWindow& window,
                           double tol = 1e-6, const ResidualOptions& opts = {});

/// Repeats verify_full sampling over a strictly decreasing dt sequence and
/// fits log(L-inf) against log(dt). The fitted order is reported only when at
/// least two residuals sit above the roundoff floor; exact members whose
/// coefficients are polynomial in t stay at the floor for every dt and report
/// no order.
ResidualReport convergence_study(const FamilyTrajectory& traj, const VerifyWindow& window,
                                 const std::vector<double>& dt_sequence, double tol = 1e-6,
                                 const ResidualOptions& opts = {});

}  // namespace ch2
