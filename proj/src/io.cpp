#include "ch2/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ch2::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IO_ERROR, "cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_csv(const std::string& path, const FamilyTrajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t,c,w,b,db,R,a,da,energy\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const DirectState& d = traj.direct_states[i];
        const EmdenState& e = traj.emden_states[i];
        out << format_g17(traj.times[i]) << ',' << format_g17(d.c) << ',' << format_g17(d.w) << ','
            << format_g17(d.b) << ',' << format_g17(d.db) << ',' << format_g17(d.R) << ','
            << format_g17(e.a) << ',' << format_g17(e.da) << ','
            << format_g17(traj.energies[i]) << '\n';
    }
    out << "# termination=" << ode::termination_name(traj.direct.termination) << '\n';
    if (!out) throw Error(ErrorCode::IO_ERROR, "write failed for '" + path + "'");
}

TrajectoryCsv read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IO_ERROR, "cannot open '" + path + "' for reading");
    TrajectoryCsv parsed;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::IO_ERROR, "empty file '" + path + "'");
    {
        std::istringstream header(line);
        std::string col;
        while (std::getline(header, col, ',')) parsed.columns.push_back(col);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# termination=", 0) == 0) {
            parsed.termination = line.substr(std::string("# termination=").size());
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::strtod(cell.c_str(), nullptr));
        if (values.size() != parsed.columns.size())
            throw Error(ErrorCode::IO_ERROR, "malformed row in '" + path + "'");
        parsed.rows.push_back(std::move(values));
    }
    return parsed;
}

void write_field_csv(const std::string& path, const FieldGrid& grid) {
    std::ofstream out = open_out(path);
    out << "t,x,rho_sq,rho,u\n";
    for (std::size_t j = 0; j < grid.t_points.size(); ++j)
        for (std::size_t i = 0; i < grid.x_points.size(); ++i) {
            const double rsq = grid.rho_sq[i][j];
            out << format_g17(grid.t_points[j]) << ',' << format_g17(grid.x_points[i]) << ','
                << format_g17(rsq) << ',' << format_g17(std::sqrt(rsq)) << ','
                << format_g17(grid.u[i][j]) << '\n';
        }
    if (!out) throw Error(ErrorCode::IO_ERROR, "write failed for '" + path + "'");
}

void write_field_gnuplot(const std::string& path, const FieldGrid& grid) {
    std::ofstream out = open_out(path);
    out << "# blocks: one per time slice; columns: x rho_sq rho u\n";
    for (std::size_t j = 0; j < grid.t_points.size(); ++j) {
        out << "# t = " << format_g17(grid.t_points[j]) << '\n';
        for (std::size_t i = 0; i < grid.x_points.size(); ++i) {
            const double rsq = grid.rho_sq[i][j];
            out << format_g17(grid.x_points[i]) << ' ' << format_g17(rsq) << ' '
                << format_g17(std::sqrt(rsq)) << ' ' << format_g17(grid.u[i][j]) << '\n';
        }
        if (j + 1 < grid.t_points.size()) out << '\n';
    }
    if (!out) throw Error(ErrorCode::IO_ERROR, "write failed for '" + path + "'");
}

nlohmann::json verdict_to_json(const ClassificationVerdict& verdict) {
    nlohmann::json j;
    j["case"] = blowup_case_name(verdict.blowup_case);
    j["method"] = verdict_method_name(verdict.method);
    if (verdict.s_star) j["s_star"] = *verdict.s_star;
    if (verdict.t_star) j["t_star"] = *verdict.t_star;
    if (!verdict.detail.empty()) j["detail"] = verdict.detail;
    return j;
}

nlohmann::json report_to_json(const ResidualReport& report) {
    nlohmann::json j;
    j["mass_linf"] = report.mass_linf;
    j["mass_l2"] = report.mass_l2;
    j["momentum_linf"] = report.momentum_linf;
    j["momentum_l2"] = report.momentum_l2;
    j["dt_fd"] = report.dt_fd;
    j["interior_fraction"] = report.interior_fraction;
    j["interior_points"] = report.interior_points;
    j["tolerance"] = report.tolerance;
    j["passed"] = report.passed;
    if (report.convergence_order) j["convergence_order"] = *report.convergence_order;
    if (report.fd_floor) j["fd_floor"] = *report.fd_floor;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out = open_out(path);
    out << content;
    if (!out) throw Error(ErrorCode::IO_ERROR, "write failed for '" + path + "'");
}

}  // namespace ch2::io
