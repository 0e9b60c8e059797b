#pragma once

#include <string>
#include <vector>

#include "ch2/blowup.hpp"
#include "ch2/fields.hpp"
#include "ch2/verification.hpp"

#include "json.hpp"

namespace ch2::io {

/// Shortest decimal form that round-trips the double exactly (17 significant
/// digits).
std::string format_g17(double v);

/// trajectory.csv: header `t,c,w,b,db,R,a,da,energy`, one row per aligned
/// accepted step, terminated by a `# termination=<reason>` metadata line.
void write_trajectory_csv(const std::string& path, const FamilyTrajectory& traj);

struct TrajectoryCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string termination;
};

/// Re-parse a trajectory.csv (round-trip checks and downstream tooling).
TrajectoryCsv read_trajectory_csv(const std::string& path);

/// field.csv: header `t,x,rho_sq,rho,u`, time-major rows.
void write_field_csv(const std::string& path, const FieldGrid& grid);

/// field.gp: whitespace-separated `x rho_sq rho u` blocks, one block per time
/// slice, separated by blank lines (gnuplot `index` convention).
void write_field_gnuplot(const std::string& path, const FieldGrid& grid);

nlohmann::json verdict_to_json(const ClassificationVerdict& verdict);
nlohmann::json report_to_json(const ResidualReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ch2::io
