#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "ch2/config.hpp"
#include "ch2/io.hpp"

using namespace ch2;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("parse_config: the reference static-plus-scale-factor config") {
    const RunConfig cfg = parse_config(
        "sigma = 1\n"
        "a0 = 1\n"
        "a1 = 0\n"
        "xi = 1\n"
        "b0 = 0\n"
        "b1 = 0\n"
        "alpha_sq = 1\n"
        "t_end = 1\n");
    CHECK(cfg.params.sigma == 1);
    CHECK(cfg.params.xi == 1.0);
    CHECK(cfg.t_end == 1.0);
    // untouched keys keep their defaults
    CHECK(cfg.integrator.rel_tol == 1e-10);
    CHECK(cfg.output.csv);
    CHECK_FALSE(cfg.output.json);
}

TEST_CASE("parse_config: comments, blank lines, spacing") {
    const RunConfig cfg = parse_config(
        "# header comment\n"
        "\n"
        "  xi   =   -1.5   # trailing comment\n"
        "formats = csv, json\n");
    CHECK(cfg.params.xi == -1.5);
    CHECK(cfg.output.json);
}

TEST_CASE("parse_config: errors carry line numbers and violated bounds") {
    CHECK_THROWS_WITH_AS(parse_config("sigma = 0\n"), doctest::Contains("sigma must be 1 or -1"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_config("a0 = -2\n"), doctest::Contains("a0 must be > 0"), Error);
    CHECK_THROWS_WITH_AS(parse_config("\n\nwhatever = 3\n"), doctest::Contains("line 3"), Error);
    CHECK_THROWS_WITH_AS(parse_config("xi\n"), doctest::Contains("expected 'key = value'"), Error);
    CHECK_THROWS_WITH_AS(parse_config("xi = banana\n"), doctest::Contains("finite number"), Error);
    CHECK_THROWS_WITH_AS(parse_config("h_min = 1\nh_init = 0.5\n"),
                         doctest::Contains("h_min <= h_init"), Error);

    try {
        parse_config("a0 = -2\n");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VALIDATION_ERROR);
    }
    try {
        parse_config("whatever = 3\n");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PARSE_ERROR);
    }
}

TEST_CASE("apply_override mirrors the file grammar") {
    RunConfig cfg;
    apply_override(cfg, "xi=-2", "--set #1");
    CHECK(cfg.params.xi == -2.0);
    apply_override(cfg, "geometry=radial", "--set #2");
    CHECK(cfg.grid.geometry == Geometry::RADIAL);
    CHECK_THROWS_WITH_AS(apply_override(cfg, "nope=1", "--set #3"), doctest::Contains("--set #3"),
                         Error);
    CHECK_THROWS_AS(apply_override(cfg, "justkey", "--set #4"), Error);
}

TEST_CASE("sweep axes: canonical order, caps, actions") {
    RunConfig cfg = parse_config(
        "sweep_xi = -2, -1, 0, 1, 2\n"
        "sweep_a1 = -2, -1, 0, 1, 2\n"
        "sweep_action = classify\n");
    REQUIRE(cfg.sweep.axes.size() == 2);
    CHECK(cfg.sweep.axes[0].name == "a1");  // canonical order, not file order
    CHECK(cfg.sweep.axes[1].name == "xi");
    CHECK(cfg.sweep.point_count() == 25);
    CHECK(cfg.sweep.action_classify);
    CHECK_FALSE(cfg.sweep.action_verify);

    CHECK_THROWS_AS(parse_config("sweep_q5 = 1,2\n"), Error);
    CHECK_THROWS_WITH_AS(parse_config("sweep_sigma = 0, 1\n"), doctest::Contains("sigma"), Error);
    CHECK_THROWS_WITH_AS(
        parse_config("sweep_a0 = 1,2\nsweep_a1 = 1,2\nsweep_xi=1,2\nsweep_cap = 7\n"),
        doctest::Contains("sweep_cap"), Error);
}

TEST_CASE("trajectory CSV round-trips bit-exactly at 17 significant digits") {
    const FamilyTrajectory traj =
        integrate_family(FamilyParams{1, 1.0, 0.3, 0.5, 0.2, -0.1, 2.0}, 0.5);
    const auto path = temp_file("ch2_roundtrip.csv");
    io::write_trajectory_csv(path.string(), traj);
    const io::TrajectoryCsv parsed = io::read_trajectory_csv(path.string());
    REQUIRE(parsed.columns ==
            std::vector<std::string>{"t", "c", "w", "b", "db", "R", "a", "da", "energy"});
    REQUIRE(parsed.rows.size() == traj.times.size());
    CHECK(parsed.termination == "REACHED_T_END");
    for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
        CHECK(parsed.rows[i][0] == traj.times[i]);
        CHECK(parsed.rows[i][1] == traj.direct_states[i].c);
        CHECK(parsed.rows[i][2] == traj.direct_states[i].w);
        CHECK(parsed.rows[i][3] == traj.direct_states[i].b);
        CHECK(parsed.rows[i][4] == traj.direct_states[i].db);
        CHECK(parsed.rows[i][5] == traj.direct_states[i].R);
        CHECK(parsed.rows[i][6] == traj.emden_states[i].a);
        CHECK(parsed.rows[i][7] == traj.emden_states[i].da);
        CHECK(parsed.rows[i][8] == traj.energies[i]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("field CSV and gnuplot block layout") {
    const FamilyTrajectory traj = integrate_family(FamilyParams{1, 1, 0, 0, 0, 1, 4}, 1.0);
    const FieldGrid grid = evaluate_grid(traj, {0.0, 1.0}, {0.0, 1.0});
    const auto csv_path = temp_file("ch2_field.csv");
    const auto gp_path = temp_file("ch2_field.gp");
    io::write_field_csv(csv_path.string(), grid);
    io::write_field_gnuplot(gp_path.string(), grid);

    std::ifstream csv(csv_path);
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,x,rho_sq,rho,u");
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);

    std::ifstream gp(gp_path);
    int blank_separators = 0;
    while (std::getline(gp, line))
        if (line.empty()) ++blank_separators;
    CHECK(blank_separators == 1);  // two time slices, one separator

    std::filesystem::remove(csv_path);
    std::filesystem::remove(gp_path);
}

TEST_CASE("format_g17 survives a parse round trip on awkward values") {
    for (double v : {1.0 / 3.0, 2.0 / 3.0e-7, 1e-300, -0.0, 123456.789012345678,
                     9.999999999999999e22}) {
        const std::string s = io::format_g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("verdict and report JSON shapes") {
    {
        const nlohmann::json j = io::verdict_to_json(classify(FamilyParams{1, 1, -1, 0, 0, 0, 1}));
        CHECK(j["case"] == "XI_ZERO_LINEAR_BLOWUP");
        CHECK(j["s_star"] == 1.0);
        CHECK(j["t_star"] == doctest::Approx(1.0 / 3.0));
        CHECK(j["method"] == "ANALYTIC");
    }
    {
        const nlohmann::json j = io::verdict_to_json(classify(FamilyParams{1, 1, 0, 1, 0, 0, 1}));
        CHECK(j["case"] == "GLOBAL");
        CHECK_FALSE(j.contains("s_star"));
        CHECK_FALSE(j.contains("t_star"));
    }
    {
        const FamilyTrajectory traj =
            integrate_family(FamilyParams{1, 1.0, 0.3, 0.5, 0.2, -0.1, 2.0}, 1.0);
        VerifyWindow w;
        w.t0 = 1e-4;
        w.t1 = 1.0 - 1e-4;
        const nlohmann::json j = io::report_to_json(verify_full(traj, w));
        CHECK(j["passed"] == true);
        CHECK(j["mass_linf"].get<double>() >= 0.0);
        CHECK(j["interior_fraction"].get<double>() <= 1.0);
        CHECK(j.contains("dt_fd"));
        CHECK_FALSE(j.contains("convergence_order"));
    }
}

TEST_CASE("io errors surface as IO_ERROR") {
    const FamilyTrajectory traj = integrate_family(FamilyParams{1, 1, 0, 0, 0, 0, 1}, 0.1);
    try {
        io::write_trajectory_csv("/nonexistent-dir/x.csv", traj);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IO_ERROR);
    }
}
