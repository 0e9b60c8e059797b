#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "ch2/blowup.hpp"
#include "ch2/config.hpp"
#include "ch2/io.hpp"
#include "ch2/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(const ch2::Error& err) {
    switch (err.code()) {
        case ch2::ErrorCode::PARSE_ERROR:
        case ch2::ErrorCode::VALIDATION_ERROR:
        case ch2::ErrorCode::CAP_EXCEEDED:
            return 1;
        case ch2::ErrorCode::IO_ERROR:
            return 3;
        default:
            return 2;  // numerical failure
    }
}

ch2::RunConfig load_config(const std::string& config_path, const std::vector<std::string>& sets) {
    ch2::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ch2::Error(ch2::ErrorCode::IO_ERROR, "cannot read config '" + config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        cfg = ch2::parse_config(text.str());
    }
    for (std::size_t i = 0; i < sets.size(); ++i)
        ch2::apply_override(cfg, sets[i], "--set #" + std::to_string(i + 1));
    if (const char* dir = std::getenv("CH2_OUTPUT_DIR"); dir && *dir) cfg.output.dir = dir;
    ch2::validate_config(cfg);
    return cfg;
}

fs::path ensure_output_dir(const ch2::RunConfig& cfg) {
    fs::path dir(cfg.output.dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ch2::Error(ch2::ErrorCode::IO_ERROR, "output directory '" + cfg.output.dir + "' not usable");
    return dir;
}

void maybe_write_summary(const ch2::RunConfig& cfg, const json& payload) {
    if (!cfg.output.json) return;
    const fs::path path = ensure_output_dir(cfg) / "summary.json";
    ch2::io::write_text_file(path.string(), payload.dump(2) + "\n");
    std::cerr << "wrote " << path.string() << "\n";
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

ch2::VerifyWindow make_window(const ch2::RunConfig& cfg, const ch2::FamilyTrajectory& traj,
                              double dt_fd) {
    ch2::VerifyWindow w;
    w.t0 = cfg.verify.t0.value_or(traj.t_min() + dt_fd);
    w.t1 = cfg.verify.t1.value_or(traj.t_max() - dt_fd);
    w.x_lo = cfg.grid.x_min;
    w.x_hi = cfg.grid.x_max;
    w.geometry = cfg.grid.geometry;
    return w;
}

int cmd_classify(const ch2::RunConfig& cfg) {
    const ch2::ClassificationVerdict verdict = ch2::classify(cfg.params);
    const json j = ch2::io::verdict_to_json(verdict);
    std::cout << j.dump() << "\n";
    maybe_write_summary(cfg, j);
    return 0;
}

int cmd_integrate(const ch2::RunConfig& cfg) {
    const ch2::FamilyTrajectory traj = ch2::integrate_family(cfg.params, cfg.t_end, cfg.integrator);
    if (cfg.output.csv) {
        const fs::path path = ensure_output_dir(cfg) / "trajectory.csv";
        ch2::io::write_trajectory_csv(path.string(), traj);
        std::cerr << "wrote " << path.string() << "\n";
    }
    json j;
    j["termination"] = ch2::ode::termination_name(traj.direct.termination);
    j["termination_scale_factor"] = ch2::ode::termination_name(traj.emden.termination);
    j["t_last"] = traj.t_max();
    const ch2::DirectState last = traj.direct_states.back();
    j["final_state"] = {{"c", last.c}, {"w", last.w}, {"b", last.b}, {"db", last.db}, {"R", last.R}};
    maybe_write_summary(cfg, j);
    return 0;
}

int cmd_field(const ch2::RunConfig& cfg) {
    const ch2::FamilyTrajectory traj = ch2::integrate_family(cfg.params, cfg.t_end, cfg.integrator);
    const double t_hi = std::min(cfg.t_end, traj.t_max());
    const ch2::FieldGrid grid =
        ch2::evaluate_grid(traj, linspace(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.x_count),
                           linspace(0.0, t_hi, cfg.grid.t_count), cfg.grid.geometry);
    if (grid.unbounded_support_warning)
        std::cerr << "warning: density grows without bound in x (q2 > 0); "
                     "values are meaningful on this finite window only\n";
    const fs::path dir = ensure_output_dir(cfg);
    if (cfg.output.csv) {
        ch2::io::write_field_csv((dir / "field.csv").string(), grid);
        std::cerr << "wrote " << (dir / "field.csv").string() << "\n";
    }
    if (cfg.output.gnuplot) {
        ch2::io::write_field_gnuplot((dir / "field.gp").string(), grid);
        std::cerr << "wrote " << (dir / "field.gp").string() << "\n";
    }
    json j;
    j["x_count"] = cfg.grid.x_count;
    j["t_count"] = cfg.grid.t_count;
    j["t_max"] = t_hi;
    j["unbounded_support_warning"] = grid.unbounded_support_warning;
    maybe_write_summary(cfg, j);
    return 0;
}

int cmd_verify(const ch2::RunConfig& cfg, bool convergence, const std::vector<std::string>& corrupt) {
    ch2::ResidualOptions opts;
    opts.dt_fd = cfg.verify.dt_fd;
    if (!corrupt.empty()) {
        const std::string& target = corrupt[0];
        const double eps = std::strtod(corrupt[1].c_str(), nullptr);
        if (target == "q0")
            opts.corrupt_q0 = eps;
        else if (target == "q1")
            opts.corrupt_q1 = eps;
        else if (target == "q2")
            opts.corrupt_q2 = eps;
        else
            throw ch2::Error(ch2::ErrorCode::VALIDATION_ERROR,
                             "--corrupt target must be q0, q1 or q2");
    }

    const ch2::FamilyTrajectory traj = ch2::integrate_family(cfg.params, cfg.t_end, cfg.integrator);
    const ch2::VerifyWindow window = make_window(cfg, traj, opts.dt_fd);
    ch2::ResidualReport report;
    if (convergence) {
        const std::vector<double> dts{1e-2, 5e-3, 2.5e-3};
        ch2::VerifyWindow w = window;
        w.t0 = std::max(w.t0, traj.t_min() + dts.front());
        w.t1 = std::min(w.t1, traj.t_max() - dts.front());
        report = ch2::convergence_study(traj, w, dts, cfg.verify.tol, opts);
        // Norms at the configured dt_fd; the study contributes the order fit.
        auto order = report.convergence_order;
        auto floor = report.fd_floor;
        report = ch2::verify_full(traj, window, cfg.verify.tol, opts);
        report.convergence_order = order;
        report.fd_floor = floor;
    } else {
        report = ch2::verify_full(traj, window, cfg.verify.tol, opts);
    }
    const json j = ch2::io::report_to_json(report);
    std::cout << j.dump() << "\n";
    maybe_write_summary(cfg, j);
    return report.passed ? 0 : 2;
}

struct SweepRow {
    std::vector<double> values;
    ch2::ClassificationVerdict verdict;
    bool has_verify = false;
    bool verify_pass = false;
};

int cmd_sweep(const ch2::RunConfig& cfg) {
    const ch2::SweepSpec& sweep = cfg.sweep;
    const long total = sweep.point_count();
    if (total > sweep.cap)
        throw ch2::Error(ch2::ErrorCode::CAP_EXCEEDED, "sweep point count exceeds sweep_cap");

    // Lexicographic enumeration: first axis outermost.
    auto params_for = [&](long index, std::vector<double>& values) {
        ch2::FamilyParams p = cfg.params;
        values.clear();
        long rem = index;
        long stride = total;
        for (const auto& axis : sweep.axes) {
            stride /= static_cast<long>(axis.values.size());
            const double v = axis.values[static_cast<std::size_t>(rem / stride)];
            rem %= stride;
            values.push_back(v);
            if (axis.name == "a0") p.a0 = v;
            else if (axis.name == "a1") p.a1 = v;
            else if (axis.name == "xi") p.xi = v;
            else if (axis.name == "b0") p.b0 = v;
            else if (axis.name == "b1") p.b1 = v;
            else if (axis.name == "alpha_sq") p.alpha_sq = v;
            else if (axis.name == "sigma") p.sigma = static_cast<int>(v);
        }
        return p;
    };

    std::vector<SweepRow> rows(static_cast<std::size_t>(total));
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (long i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            if (failed.load()) return;
            try {
                SweepRow& row = rows[static_cast<std::size_t>(i)];
                const ch2::FamilyParams p = params_for(i, row.values);
                if (sweep.action_classify) row.verdict = ch2::classify(p);
                if (sweep.action_verify) {
                    row.has_verify = true;
                    try {
                        const ch2::FamilyTrajectory traj =
                            ch2::integrate_family(p, cfg.t_end, cfg.integrator);
                        ch2::VerifyWindow w = make_window(cfg, traj, cfg.verify.dt_fd);
                        ch2::ResidualOptions opts;
                        opts.dt_fd = cfg.verify.dt_fd;
                        row.verify_pass = ch2::verify_full(traj, w, cfg.verify.tol, opts).passed;
                    } catch (const ch2::Error&) {
                        row.verify_pass = false;
                    }
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };

    const unsigned n_threads =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), 16u);
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) throw ch2::Error(ch2::ErrorCode::VALIDATION_ERROR, "sweep point failed: " + first_error);

    const fs::path path = ensure_output_dir(cfg) / "sweep.csv";
    std::ostringstream out;
    for (const auto& axis : sweep.axes) out << axis.name << ',';
    out << "case,s_star,t_star,method";
    if (sweep.action_verify) out << ",verify_pass";
    out << '\n';
    for (const SweepRow& row : rows) {
        for (double v : row.values) out << ch2::io::format_g17(v) << ',';
        if (sweep.action_classify) {
            out << ch2::blowup_case_name(row.verdict.blowup_case) << ','
                << (row.verdict.s_star ? ch2::io::format_g17(*row.verdict.s_star) : "") << ','
                << (row.verdict.t_star ? ch2::io::format_g17(*row.verdict.t_star) : "") << ','
                << ch2::verdict_method_name(row.verdict.method);
        } else {
            out << ",,,";
        }
        if (sweep.action_verify) out << ',' << (row.verify_pass ? "pass" : "fail");
        out << '\n';
    }
    ch2::io::write_text_file(path.string(), out.str());
    std::cerr << "wrote " << path.string() << " (" << total << " points)\n";

    json j;
    j["points"] = total;
    j["file"] = path.string();
    maybe_write_summary(cfg, j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ch2: construct, integrate, evaluate, classify and verify the linear-velocity\n"
        "solution family of the 2-component Camassa-Holm shallow-water system.\n\n" +
        ch2::config_key_reference() +
        "\nEnvironment: CH2_OUTPUT_DIR overrides output_dir.\n"
        "Exit codes: 0 success, 1 usage/parse, 2 numerical/verification failure, 3 I/O."};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    bool convergence = false;
    std::vector<std::string> corrupt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (key = value lines)");
        sub->add_option("--set", sets, "override, repeatable: --set key=value")
            ->take_all()
            ->expected(-1);
    };

    CLI::App* classify_cmd =
        app.add_subcommand("classify", "blowup/global verdict for the configured parameters");
    CLI::App* integrate_cmd =
        app.add_subcommand("integrate", "integrate one family member; writes trajectory.csv");
    CLI::App* field_cmd =
        app.add_subcommand("field", "evaluate rho^2, rho, u on a grid; writes field.csv/.gp");
    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "substitute the constructed solution into the PDEs and report residual norms");
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "classify/verify over parameter axes; writes sweep.csv");
    for (CLI::App* sub : {classify_cmd, integrate_cmd, field_cmd, verify_cmd, sweep_cmd})
        add_common(sub);
    verify_cmd->add_flag("--convergence", convergence, "add a dt-refinement order fit");
    verify_cmd
        ->add_option("--corrupt", corrupt,
                     "test-only: perturb a profile coefficient, e.g. --corrupt q2 1e-3")
        ->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const ch2::RunConfig cfg = load_config(config_path, sets);
        if (classify_cmd->parsed()) return cmd_classify(cfg);
        if (integrate_cmd->parsed()) return cmd_integrate(cfg);
        if (field_cmd->parsed()) return cmd_field(cfg);
        if (verify_cmd->parsed()) return cmd_verify(cfg, convergence, corrupt);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    } catch (const ch2::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
