#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "caginalp/grid.hpp"
#include "caginalp/state_solver.hpp"

namespace caginalp {

/// Shortest round-tripping form is not required; 17 significant digits are.
std::string format_real(double value);

/// Header plus rows of already formatted cells. Creates parent directories.
void write_table(const std::filesystem::path& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

/// index_x[,index_y],x[,y],value
void write_field_csv(const std::filesystem::path& path, const Field& f);
/// Inverse of write_field_csv. ConfigError if the file does not describe
/// every node of `grid` exactly once or coordinates disagree with the grid.
Field read_field_csv(const std::filesystem::path& path, const Grid& grid);

/// step,time,index_x[,index_y],x[,y],value
void write_spacetime_csv(const std::filesystem::path& path,
                         const SpaceTimeField& f);
SpaceTimeField read_spacetime_csv(const std::filesystem::path& path,
                                  const Grid& grid, const TimeGrid& time);

/// index_x[,index_y],x[,y],theta,phi,mu,sigma
void write_snapshot_csv(const std::filesystem::path& path,
                        const StateSnapshot& s);

/// step,time,mass_theta_ell_phi,mass_phi,energy,linf_theta,linf_phi
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<StepDiagnostics>& rows);

}  // namespace caginalp
