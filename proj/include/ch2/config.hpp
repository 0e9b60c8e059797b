#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ch2/dynamics.hpp"
#include "ch2/fields.hpp"

namespace ch2 {

struct GridSpec {
    double x_min = -2.0;
    double x_max = 2.0;
    int x_count = 41;
    int t_count = 11;
    Geometry geometry = Geometry::LINE;
};

struct VerifySpec {
    double tol = 1e-6;
    double dt_fd = 1e-4;
    std::optional<double> t0;  // defaults to dt_fd
    std::optional<double> t1;  // defaults to t_end - dt_fd
};

struct OutputSpec {
    std::string dir = ".";
    bool csv = true;
    bool json = false;
    bool gnuplot = false;
};

struct SweepAxis {
    std::string name;  // one of a0, a1, xi, b0, b1, alpha_sq, sigma
    std::vector<double> values;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;  // canonical parameter order, at most 3
    bool action_classify = true;
    bool action_verify = false;
    long cap = 100'000;

    long point_count() const;
};

/// One fully validated run description, assembled from the line-oriented
/// `key = value` config format plus `--set` overrides.
struct RunConfig {
    FamilyParams params;
    double t_end = 1.0;
    ode::IntegratorConfig integrator = default_family_config();
    GridSpec grid;
    VerifySpec verify;
    OutputSpec output;
    SweepSpec sweep;
};

/// Human-readable table of every config key with its default, printed by
/// `--help`.
std::string config_key_reference();

/// Parse the `key = value` text (# comments, blank lines allowed). Unknown
/// keys are PARSE_ERRORs with their line number; invalid values raise
/// VALIDATION_ERROR naming the violated bound.
RunConfig parse_config(const std::string& text);

/// Apply one `key=value` override (the --set mechanism); origin labels the
/// source in error messages.
void apply_override(RunConfig& config, const std::string& assignment, const std::string& origin);

/// Cross-field checks shared by parse_config and the CLI after overrides.
void validate_config(const RunConfig& config);

}  // namespace ch2
