#pragma once

#include <optional>
#include <vector>

#include "ch2/dynamics.hpp"

namespace ch2 {

enum class Geometry { LINE, RADIAL };

/// Time-slice density coefficients: rho^2(x,t) = max{q0 + q1 x + q2 x^2, 0}
/// with q0 = R, q1 = -(2/sigma)(db + 3bc), q2 = -w/sigma.
struct DensityProfile {
    double t = 0.0;
    double q0 = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;

    double rho_sq_raw(double x) const { return q0 + (q1 + q2 * x) * x; }
    double rho_sq(double x) const {
        const double v = rho_sq_raw(x);
        return v > 0.0 ? v : 0.0;
    }
};

enum class SupportKind { ALL_LINE, HALF_LINE_LEFT, HALF_LINE_RIGHT, BOUNDED, EMPTY };

const char* support_kind_name(SupportKind k);

/// Region {x : q0 + q1 x + q2 x^2 > eps}. For q2 > 0 the region is the
/// complement of an interval (or everything); it is reported as ALL_LINE with
/// unbounded_warning set, since the density then grows without bound in x.
struct SupportInterval {
    SupportKind kind = SupportKind::ALL_LINE;
    std::optional<double> lo;
    std::optional<double> hi;
    bool unbounded_warning = false;
};

/// Evaluated space-time fields. rho_sq[i][j] and u[i][j] hold the values at
/// (x_points[i], t_points[j]); u(x,t) = c(t) x + b(t) exactly.
struct FieldGrid {
    std::vector<double> x_points;
    std::vector<double> t_points;
    std::vector<std::vector<double>> rho_sq;
    std::vector<std::vector<double>> u;
    Geometry geometry = Geometry::LINE;
    bool unbounded_support_warning = false;
};

DensityProfile profile_at(const FamilyTrajectory& traj, double t);

SupportInterval support_of(const DensityProfile& profile, double eps = 0.0);

FieldGrid evaluate_grid(const FamilyTrajectory& traj, const std::vector<double>& x_points,
                        const std::vector<double>& t_points, Geometry geometry = Geometry::LINE);

/// Self-similarity deviation for b == 0 members: compares the rescaled
/// profile rho(x,t) * a(3t)^(1/3) on common eta = x / a(3t)^(1/3) samples at
/// two times and returns the max absolute mismatch. With require_zero_b the
/// call refuses params that break the symmetry (NOT_SELF_SIMILAR_PARAMS);
/// disabling it allows sensitivity controls on perturbed members.
double self_similar_check(const FamilyTrajectory& traj, double t1, double t2,
                          const std::vector<double>& eta_samples, bool require_zero_b = true);

}  // namespace ch2
