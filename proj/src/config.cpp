#include "ch2/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace ch2 {

namespace {

std::string trim(const std::string& s) {
    const auto from = s.find_first_not_of(" \t\r\n");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r\n");
    return s.substr(from, to - from + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string run;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(run));
            run.clear();
        } else {
            run.push_back(c);
        }
    }
    out.push_back(trim(run));
    return out;
}

double parse_double(const std::string& value, const std::string& key, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
        throw Error(ErrorCode::PARSE_ERROR,
                    where + ": value for '" + key + "' is not a finite number: '" + value + "'");
    return v;
}

long parse_long(const std::string& value, const std::string& key, const std::string& where) {
    const double v = parse_double(value, key, where);
    if (v != std::floor(v))
        throw Error(ErrorCode::PARSE_ERROR, where + ": value for '" + key + "' must be an integer");
    return static_cast<long>(v);
}

const std::vector<std::string> kSweepParams = {"a0", "a1", "xi", "b0", "b1", "alpha_sq", "sigma"};

void set_sweep_axis(RunConfig& cfg, const std::string& param, const std::string& value,
                    const std::string& where) {
    SweepAxis axis;
    axis.name = param;
    for (const std::string& item : split(value, ',')) {
        if (item.empty())
            throw Error(ErrorCode::PARSE_ERROR, where + ": empty entry in sweep value list");
        const double v = parse_double(item, "sweep_" + param, where);
        if (param == "sigma" && v != 1.0 && v != -1.0)
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": sigma must be 1 or -1");
        if (param == "a0" && !(v > 0.0))
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": a0 must be > 0 (a(0) = a0 > 0)");
        if (param == "alpha_sq" && !(v >= 0.0))
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": alpha_sq must be >= 0");
        axis.values.push_back(v);
    }
    // Replace a previous axis for the same parameter, keep canonical order.
    auto& axes = cfg.sweep.axes;
    axes.erase(std::remove_if(axes.begin(), axes.end(),
                              [&](const SweepAxis& a) { return a.name == param; }),
               axes.end());
    axes.push_back(std::move(axis));
    std::sort(axes.begin(), axes.end(), [](const SweepAxis& a, const SweepAxis& b) {
        const auto ia = std::find(kSweepParams.begin(), kSweepParams.end(), a.name);
        const auto ib = std::find(kSweepParams.begin(), kSweepParams.end(), b.name);
        return ia < ib;
    });
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value,
             const std::string& where) {
    auto need_positive = [&](double v, const char* what) {
        if (!(v > 0.0))
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": " + what + " must be > 0");
        return v;
    };

    if (key == "sigma") {
        const long v = parse_long(value, key, where);
        if (v != 1 && v != -1)
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": sigma must be 1 or -1");
        cfg.params.sigma = static_cast<int>(v);
    } else if (key == "a0") {
        const double v = parse_double(value, key, where);
        if (!(v > 0.0))
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": a0 must be > 0 (a(0) = a0 > 0)");
        cfg.params.a0 = v;
    } else if (key == "a1") {
        cfg.params.a1 = parse_double(value, key, where);
    } else if (key == "xi") {
        cfg.params.xi = parse_double(value, key, where);
    } else if (key == "b0") {
        cfg.params.b0 = parse_double(value, key, where);
    } else if (key == "b1") {
        cfg.params.b1 = parse_double(value, key, where);
    } else if (key == "alpha_sq") {
        const double v = parse_double(value, key, where);
        if (!(v >= 0.0))
            throw Error(ErrorCode::VALIDATION_ERROR,
                        where + ": alpha_sq must be >= 0 (rho^2(0,0) = alpha^2)");
        cfg.params.alpha_sq = v;
    } else if (key == "t_end") {
        cfg.t_end = need_positive(parse_double(value, key, where), "t_end");
    } else if (key == "method") {
        if (value == "adaptive")
            cfg.integrator.method = ode::Method::ADAPTIVE_EMBEDDED;
        else if (value == "rk4")
            cfg.integrator.method = ode::Method::RK4_FIXED;
        else
            throw Error(ErrorCode::VALIDATION_ERROR,
                        where + ": method must be 'adaptive' or 'rk4'");
    } else if (key == "h_init") {
        cfg.integrator.h_init = need_positive(parse_double(value, key, where), "h_init");
    } else if (key == "h_min") {
        cfg.integrator.h_min = need_positive(parse_double(value, key, where), "h_min");
    } else if (key == "h_max") {
        cfg.integrator.h_max = need_positive(parse_double(value, key, where), "h_max");
    } else if (key == "rel_tol") {
        cfg.integrator.rel_tol = need_positive(parse_double(value, key, where), "rel_tol");
    } else if (key == "abs_tol") {
        cfg.integrator.abs_tol = need_positive(parse_double(value, key, where), "abs_tol");
    } else if (key == "max_steps") {
        const long v = parse_long(value, key, where);
        if (v <= 0) throw Error(ErrorCode::VALIDATION_ERROR, where + ": max_steps must be positive");
        cfg.integrator.max_steps = v;
    } else if (key == "blowup_guard") {
        cfg.integrator.blowup_guard = need_positive(parse_double(value, key, where), "blowup_guard");
    } else if (key == "x_min") {
        cfg.grid.x_min = parse_double(value, key, where);
    } else if (key == "x_max") {
        cfg.grid.x_max = parse_double(value, key, where);
    } else if (key == "x_count") {
        const long v = parse_long(value, key, where);
        if (v < 1) throw Error(ErrorCode::VALIDATION_ERROR, where + ": x_count must be >= 1");
        cfg.grid.x_count = static_cast<int>(v);
    } else if (key == "t_count") {
        const long v = parse_long(value, key, where);
        if (v < 1) throw Error(ErrorCode::VALIDATION_ERROR, where + ": t_count must be >= 1");
        cfg.grid.t_count = static_cast<int>(v);
    } else if (key == "geometry") {
        if (value == "line")
            cfg.grid.geometry = Geometry::LINE;
        else if (value == "radial")
            cfg.grid.geometry = Geometry::RADIAL;
        else
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": geometry must be 'line' or 'radial'");
    } else if (key == "verify_tol") {
        cfg.verify.tol = need_positive(parse_double(value, key, where), "verify_tol");
    } else if (key == "dt_fd") {
        cfg.verify.dt_fd = need_positive(parse_double(value, key, where), "dt_fd");
    } else if (key == "verify_t0") {
        cfg.verify.t0 = parse_double(value, key, where);
    } else if (key == "verify_t1") {
        cfg.verify.t1 = parse_double(value, key, where);
    } else if (key == "output_dir") {
        if (value.empty())
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": output_dir must not be empty");
        cfg.output.dir = value;
    } else if (key == "formats") {
        cfg.output.csv = cfg.output.json = cfg.output.gnuplot = false;
        for (const std::string& f : split(value, ',')) {
            if (f == "csv")
                cfg.output.csv = true;
            else if (f == "json")
                cfg.output.json = true;
            else if (f == "gnuplot")
                cfg.output.gnuplot = true;
            else
                throw Error(ErrorCode::VALIDATION_ERROR,
                            where + ": formats entries must be csv, json or gnuplot");
        }
    } else if (key == "sweep_action") {
        cfg.sweep.action_classify = cfg.sweep.action_verify = false;
        for (const std::string& a : split(value, ',')) {
            if (a == "classify")
                cfg.sweep.action_classify = true;
            else if (a == "verify")
                cfg.sweep.action_verify = true;
            else
                throw Error(ErrorCode::VALIDATION_ERROR,
                            where + ": sweep_action entries must be classify or verify");
        }
        if (!cfg.sweep.action_classify && !cfg.sweep.action_verify)
            throw Error(ErrorCode::VALIDATION_ERROR, where + ": sweep_action must not be empty");
    } else if (key == "sweep_cap") {
        const long v = parse_long(value, key, where);
        if (v <= 0) throw Error(ErrorCode::VALIDATION_ERROR, where + ": sweep_cap must be positive");
        cfg.sweep.cap = v;
    } else if (key.rfind("sweep_", 0) == 0) {
        const std::string param = key.substr(6);
        if (std::find(kSweepParams.begin(), kSweepParams.end(), param) == kSweepParams.end())
            throw Error(ErrorCode::PARSE_ERROR, where + ": unknown sweep axis '" + param + "'");
        set_sweep_axis(cfg, param, value, where);
    } else {
        throw Error(ErrorCode::PARSE_ERROR, where + ": unknown key '" + key + "'");
    }
}

}  // namespace

long SweepSpec::point_count() const {
    long n = 1;
    for (const auto& axis : axes) n *= static_cast<long>(axis.values.size());
    return n;
}

std::string config_key_reference() {
    return
        "Config keys (line-oriented 'key = value', '#' starts a comment):\n"
        "  sigma        gravity orientation, 1 or -1            [1]\n"
        "  a0           initial scale factor a(0) > 0           [1]\n"
        "  a1           initial scale-factor slope a'(0)        [0]\n"
        "  xi           scale-factor forcing constant           [0]\n"
        "  b0           initial velocity offset b(0)            [0]\n"
        "  b1           initial offset slope db/dt(0)           [0]\n"
        "  alpha_sq     central density rho^2(0,0) >= 0         [1]\n"
        "  t_end        integration horizon in t, > 0           [1]\n"
        "  method       integrator: adaptive | rk4              [adaptive]\n"
        "  h_init       initial step                            [1e-3]\n"
        "  h_min        smallest step before underflow          [1e-14]\n"
        "  h_max        largest step                            [5e-3]\n"
        "  rel_tol      relative tolerance                      [1e-10]\n"
        "  abs_tol      absolute tolerance                      [1e-10]\n"
        "  max_steps    step budget                             [2000000]\n"
        "  blowup_guard abort when any |component| exceeds it   [1e12]\n"
        "  x_min x_max  field grid x range                      [-2, 2]\n"
        "  x_count      field grid points in x, >= 1            [41]\n"
        "  t_count      field grid points in t, >= 1            [11]\n"
        "  geometry     line | radial (radial needs x >= 0)     [line]\n"
        "  verify_tol   residual pass tolerance                 [1e-6]\n"
        "  dt_fd        central-difference step for residuals   [1e-4]\n"
        "  verify_t0    residual window start                   [dt_fd]\n"
        "  verify_t1    residual window end                     [t_end - dt_fd]\n"
        "  output_dir   output directory (CH2_OUTPUT_DIR wins)  [.]\n"
        "  formats      subset of csv,json,gnuplot              [csv]\n"
        "  sweep_<p>    axis value list for p in {a0,a1,xi,b0,b1,alpha_sq,sigma}\n"
        "  sweep_action subset of classify,verify               [classify]\n"
        "  sweep_cap    max sweep points                        [100000]\n";
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string::npos)
            throw Error(ErrorCode::PARSE_ERROR, where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorCode::PARSE_ERROR, where + ": missing key");
        if (value.empty()) throw Error(ErrorCode::PARSE_ERROR, where + ": missing value");
        set_key(cfg, key, value, where);
    }
    validate_config(cfg);
    return cfg;
}

void apply_override(RunConfig& config, const std::string& assignment, const std::string& origin) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw Error(ErrorCode::PARSE_ERROR, origin + ": expected key=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty() || value.empty())
        throw Error(ErrorCode::PARSE_ERROR, origin + ": expected key=value, got '" + assignment + "'");
    set_key(config, key, value, origin);
}

void validate_config(const RunConfig& config) {
    config.params.validate();
    config.integrator.validate();
    if (!(config.t_end > 0.0)) throw Error(ErrorCode::VALIDATION_ERROR, "t_end must be > 0");
    if (!(config.grid.x_min <= config.grid.x_max))
        throw Error(ErrorCode::VALIDATION_ERROR, "x_min must be <= x_max");
    if (config.grid.geometry == Geometry::RADIAL && config.grid.x_min < 0.0)
        throw Error(ErrorCode::VALIDATION_ERROR, "radial geometry requires x_min >= 0");
    if (config.sweep.axes.size() > 3)
        throw Error(ErrorCode::VALIDATION_ERROR, "at most 3 sweep axes are supported");
    if (config.sweep.point_count() > config.sweep.cap)
        throw Error(ErrorCode::CAP_EXCEEDED, "sweep point count exceeds sweep_cap");
}

}  // namespace ch2
