#include "ch2/fields.hpp"

#include <cmath>

namespace ch2 {

const char* support_kind_name(SupportKind k) {
    switch (k) {
        case SupportKind::ALL_LINE: return "ALL_LINE";
        case SupportKind::HALF_LINE_LEFT: return "HALF_LINE_LEFT";
        case SupportKind::HALF_LINE_RIGHT: return "HALF_LINE_RIGHT";
        case SupportKind::BOUNDED: return "BOUNDED";
        case SupportKind::EMPTY: return "EMPTY";
    }
    return "?";
}

DensityProfile profile_at(const FamilyTrajectory& traj, double t) {
    if (!traj.in_range(t)) throw Error(ErrorCode::OUT_OF_RANGE, "time outside trajectory range");
    const DirectState s = traj.state_at(t);
    const double sigma = traj.params.sigma;
    DensityProfile p;
    p.t = t;
    p.q0 = s.R;
    p.q1 = -(2.0 / sigma) * (s.db + 3.0 * s.b * s.c);
    p.q2 = -s.w / sigma;
    return p;
}

SupportInterval support_of(const DensityProfile& profile, double eps) {
    const double a = profile.q2;
    const double b = profile.q1;
    const double c = profile.q0 - eps;
    SupportInterval out;
    if (a < 0.0) {
        const double disc = b * b - 4.0 * a * c;
        if (disc <= 0.0) {
            out.kind = SupportKind::EMPTY;
            return out;
        }
        const double sq = std::sqrt(disc);
        const double r1 = (-b + sq) / (2.0 * a);  // a < 0: r1 < r2
        const double r2 = (-b - sq) / (2.0 * a);
        out.kind = SupportKind::BOUNDED;
        out.lo = std::min(r1, r2);
        out.hi = std::max(r1, r2);
        return out;
    }
    if (a == 0.0) {
        if (b > 0.0) {
            out.kind = SupportKind::HALF_LINE_RIGHT;
            out.lo = -c / b;
        } else if (b < 0.0) {
            out.kind = SupportKind::HALF_LINE_LEFT;
            out.hi = -c / b;
        } else {
            out.kind = c > 0.0 ? SupportKind::ALL_LINE : SupportKind::EMPTY;
        }
        return out;
    }
    // Upward parabola: complement-of-interval support; flagged because the
    // density is unbounded at spatial infinity.
    out.kind = SupportKind::ALL_LINE;
    out.unbounded_warning = true;
    return out;
}

FieldGrid evaluate_grid(const FamilyTrajectory& traj, const std::vector<double>& x_points,
                        const std::vector<double>& t_points, Geometry geometry) {
    if (geometry == Geometry::RADIAL)
        for (double x : x_points)
            if (x < 0.0) throw Error(ErrorCode::NEGATIVE_RADIUS, "radial grid requires r >= 0");

    FieldGrid grid;
    grid.x_points = x_points;
    grid.t_points = t_points;
    grid.geometry = geometry;
    grid.rho_sq.assign(x_points.size(), std::vector<double>(t_points.size(), 0.0));
    grid.u.assign(x_points.size(), std::vector<double>(t_points.size(), 0.0));

    for (std::size_t j = 0; j < t_points.size(); ++j) {
        const double t = t_points[j];
        const DensityProfile p = profile_at(traj, t);
        if (p.q2 > 0.0) grid.unbounded_support_warning = true;
        const DirectState s = traj.state_at(t);
        for (std::size_t i = 0; i < x_points.size(); ++i) {
            grid.rho_sq[i][j] = p.rho_sq(x_points[i]);
            grid.u[i][j] = s.c * x_points[i] + s.b;
        }
    }
    return grid;
}

double self_similar_check(const FamilyTrajectory& traj, double t1, double t2,
                          const std::vector<double>& eta_samples, bool require_zero_b) {
    if (require_zero_b && (traj.params.b0 != 0.0 || traj.params.b1 != 0.0))
        throw Error(ErrorCode::NOT_SELF_SIMILAR_PARAMS,
                    "self-similar form requires b0 = b1 = 0");
    double deviation = 0.0;
    for (double eta : eta_samples) {
        double g[2];
        int k = 0;
        for (double t : {t1, t2}) {
            if (!traj.in_range(t))
                throw Error(ErrorCode::OUT_OF_RANGE, "time outside trajectory range");
            const EmdenState e = traj.emden_state_at_s(3.0 * t);
            const double a13 = std::cbrt(e.a);
            const DensityProfile p = profile_at(traj, t);
            g[k++] = std::sqrt(p.rho_sq(eta * a13)) * a13;
        }
        deviation = std::max(deviation, std::abs(g[0] - g[1]));
    }
    return deviation;
}

}  // namespace ch2
