#pragma once

#include <array>
#include <optional>
#include <string>

#include "ch2/dynamics.hpp"

namespace ch2 {

/// Outcome classes for one parameter point. The scale factor reaches zero in
/// finite stretched time when xi < 0 (always), when xi = 0 with a1 < 0 (the
/// affine case), and additionally when xi > 0 with a1 < 0 and enough kinetic
/// energy to defeat the repulsion: (1/2) a1^2 >= (3/2) xi a0^(2/3). Every
/// other point exists globally.
enum class BlowupCase {
    XI_NEGATIVE_TOUCHDOWN,
    XI_ZERO_LINEAR_BLOWUP,
    XI_POSITIVE_KINETIC_TOUCHDOWN,
    GLOBAL,
};

enum class VerdictMethod { ANALYTIC, EVENT_DETECTED, QUADRATURE };

const char* blowup_case_name(BlowupCase c);
const char* verdict_method_name(VerdictMethod m);

/// Blowup/global outcome. Singular times are reported on both clocks:
/// s_star in stretched time and t_star = s_star / 3 in physical time.
struct ClassificationVerdict {
    BlowupCase blowup_case = BlowupCase::GLOBAL;
    std::optional<double> s_star;
    std::optional<double> t_star;
    VerdictMethod method = VerdictMethod::ANALYTIC;
    std::string detail;
};

/// Classification from (a0, a1, xi) alone; (b0, b1, alpha_sq) never matter.
/// Touch-down times come from the conserved-energy quadrature; the affine
/// xi = 0 case is exact: s_star = -a0/a1.
ClassificationVerdict classify(const FamilyParams& params);

/// Touch-down time for xi < 0 from the energy integral
///   s* = int_0^{a0} da / sqrt(2E + 3 xi a^(2/3)),   E = a1^2/2 - (3/2) xi a0^(2/3),
/// plus the symmetric arc over the turning point when a1 > 0. The integrand
/// is regularised by a = z^3 followed by a sine substitution at the turning
/// point, then integrated by adaptive Simpson to abs tolerance tol.
/// Throws NONNEGATIVE_XI for xi >= 0.
double touchdown_time_quadrature(double a0, double a1, double xi, double tol = 1e-9);

/// Energy-integral touch-down time for every finite-time case: xi < 0 (any
/// a1), xi = 0 with a1 < 0, and xi > 0 with a1 < 0 and E >= 0. Throws
/// VALIDATION_ERROR when the parameters are global.
double touchdown_time_energy(double a0, double a1, double xi, double tol = 1e-9);

struct DetectionOptions {
    double horizon_s = 100.0;
    std::array<double, 3> eps_levels{1e-6, 1e-7, 1e-8};  // descending thresholds
    double root_tol = 1e-12;
    bool cross_check_direct = true;  // corroborate t* by a Hubble-rate guard run
    ode::IntegratorConfig integrator;  // in s units

    DetectionOptions() {
        integrator.h_init = 1e-3;
        integrator.h_max = 0.5;
        integrator.rel_tol = 1e-10;
        integrator.abs_tol = 1e-12;
    }
};

/// Numerical realisation of the classification: integrate the scale factor
/// in s with stopping thresholds a = eps and extrapolate the crossing times
/// to a = 0 by a fitted-exponent Richardson step (no local exponent is
/// assumed). Returns a GLOBAL verdict with a NO_SINGULARITY_FOUND detail when
/// nothing fires within the horizon.
ClassificationVerdict detect_singularity(const FamilyParams& params,
                                         const DetectionOptions& opts = {});

/// |c(t)| = |u_x(x, t)|, the spatially uniform velocity gradient whose
/// divergence signals blowup at every point.
double gradient_blowup_norm(const FamilyTrajectory& traj, double t);

}  // namespace ch2
