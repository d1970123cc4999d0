#include "caginalp/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "caginalp/errors.hpp"

namespace caginalp {

namespace fs = std::filesystem;

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_table(const fs::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  const auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  if (!out) throw ConfigError("failed writing " + path.string());
}

namespace {

std::vector<std::string> node_header(const Grid& grid) {
  if (grid.dim() == 1) return {"index_x", "x"};
  return {"index_x", "index_y", "x", "y"};
}

std::vector<std::string> node_cells(const Grid& grid, int k) {
  const auto ij = grid.multi_index(k);
  if (grid.dim() == 1) {
    return {std::to_string(ij[0]), format_real(grid.coordinate(0, ij[0]))};
  }
  return {std::to_string(ij[0]), std::to_string(ij[1]),
          format_real(grid.coordinate(0, ij[0])),
          format_real(grid.coordinate(1, ij[1]))};
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

CsvTable read_table(const fs::path& path,
                    const std::vector<std::string>& expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      if (t.header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        throw ConfigError(path.string() + ": expected header " + want);
      }
      continue;
    }
    if (cells.size() != expected.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(expected.size()) +
                        " columns");
    }
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(line_no);
  }
  if (t.header.empty()) throw ConfigError(path.string() + ": empty file");
  return t;
}

double parse_real(const std::string& s, const fs::path& path, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    throw ConfigError(path.string() + ":" + std::to_string(line) +
                      ": not a finite number: '" + s + "'");
  }
  return v;
}

int parse_index(const std::string& s, const fs::path& path, int line) {
  std::size_t used = 0;
  int v = -1;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ConfigError(path.string() + ":" + std::to_string(line) +
                      ": not an integer: '" + s + "'");
  }
  return v;
}

// Reads node columns starting at `col`; returns the flat index after checking
// indices and coordinates against the grid.
int parse_node(const Grid& grid, const std::vector<std::string>& row, int col,
               const fs::path& path, int line) {
  std::array<int, 2> ij{0, 0};
  for (int d = 0; d < grid.dim(); ++d) {
    ij[d] = parse_index(row[col + d], path, line);
    if (ij[d] < 0 || ij[d] >= grid.nodes(d)) {
      throw ConfigError(path.string() + ":" + std::to_string(line) +
                        ": node index out of range for the grid");
    }
  }
  for (int d = 0; d < grid.dim(); ++d) {
    const double x = parse_real(row[col + grid.dim() + d], path, line);
    if (std::abs(x - grid.coordinate(d, ij[d])) >
        1e-9 * grid.length(d)) {
      throw ConfigError(path.string() + ":" + std::to_string(line) +
                        ": coordinate does not match the grid");
    }
  }
  return grid.index(ij[0], ij[1]);
}

}  // namespace

void write_field_csv(const fs::path& path, const Field& f) {
  const Grid& grid = f.grid();
  auto header = node_header(grid);
  header.push_back("value");
  std::vector<std::vector<std::string>> rows;
  for (int k = 0; k < grid.node_count(); ++k) {
    auto cells = node_cells(grid, k);
    cells.push_back(format_real(f[k]));
    rows.push_back(std::move(cells));
  }
  write_table(path, header, rows);
}

Field read_field_csv(const fs::path& path, const Grid& grid) {
  auto header = node_header(grid);
  header.push_back("value");
  const CsvTable t = read_table(path, header);
  Vector v(grid.node_count());
  std::vector<bool> seen(grid.node_count(), false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int line = t.line_numbers[r];
    const int k = parse_node(grid, t.rows[r], 0, path, line);
    if (seen[k]) {
      throw ConfigError(path.string() + ":" + std::to_string(line) +
                        ": node listed twice");
    }
    seen[k] = true;
    v[k] = parse_real(t.rows[r].back(), path, line);
  }
  if (static_cast<int>(t.rows.size()) != grid.node_count()) {
    throw ConfigError(path.string() + ": expected " +
                      std::to_string(grid.node_count()) + " nodes, found " +
                      std::to_string(t.rows.size()));
  }
  return Field(grid, std::move(v));
}

void write_spacetime_csv(const fs::path& path, const SpaceTimeField& f) {
  const Grid& grid = f.grid();
  std::vector<std::string> header{"step", "time"};
  for (auto& h : node_header(grid)) header.push_back(h);
  header.push_back("value");
  std::vector<std::vector<std::string>> rows;
  for (int n = 0; n < f.slice_count(); ++n) {
    for (int k = 0; k < grid.node_count(); ++k) {
      std::vector<std::string> cells{std::to_string(n),
                                     format_real(f.time().time(n))};
      for (auto& c : node_cells(grid, k)) cells.push_back(std::move(c));
      cells.push_back(format_real(f.slice(n)[k]));
      rows.push_back(std::move(cells));
    }
  }
  write_table(path, header, rows);
}

SpaceTimeField read_spacetime_csv(const fs::path& path, const Grid& grid,
                                  const TimeGrid& time) {
  std::vector<std::string> header{"step", "time"};
  for (auto& h : node_header(grid)) header.push_back(h);
  header.push_back("value");
  const CsvTable t = read_table(path, header);
  SpaceTimeField out(grid, time);
  const int n_nodes = grid.node_count();
  std::vector<bool> seen(static_cast<std::size_t>(n_nodes) * (time.steps() + 1),
                         false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int line = t.line_numbers[r];
    const auto& row = t.rows[r];
    const int n = parse_index(row[0], path, line);
    if (n < 0 || n > time.steps()) {
      throw ConfigError(path.string() + ":" + std::to_string(line) +
                        ": step out of range for the time grid");
    }
    const double tv = parse_real(row[1], path, line);
    if (std::abs(tv - time.time(n)) > 1e-9 * time.horizon()) {
      throw ConfigError(path.string() + ":" + std::to_string(line) +
                        ": time does not match the time grid");
    }
    const int k = parse_node(grid, row, 2, path, line);
    const std::size_t slot = static_cast<std::size_t>(n) * n_nodes + k;
    if (seen[slot]) {
      throw ConfigError(path.string() + ":" + std::to_string(line) +
                        ": entry listed twice");
    }
    seen[slot] = true;
    out.slice(n).values()[k] = parse_real(row.back(), path, line);
  }
  if (t.rows.size() != seen.size()) {
    throw ConfigError(path.string() + ": expected " +
                      std::to_string(seen.size()) + " rows, found " +
                      std::to_string(t.rows.size()));
  }
  return out;
}

void write_snapshot_csv(const fs::path& path, const StateSnapshot& s) {
  const Grid& grid = s.theta.grid();
  auto header = node_header(grid);
  for (const char* c : {"theta", "phi", "mu", "sigma"}) header.push_back(c);
  std::vector<std::vector<std::string>> rows;
  for (int k = 0; k < grid.node_count(); ++k) {
    auto cells = node_cells(grid, k);
    for (const Field* f : {&s.theta, &s.phi, &s.mu, &s.sigma}) {
      cells.push_back(format_real((*f)[k]));
    }
    rows.push_back(std::move(cells));
  }
  write_table(path, header, rows);
}

void write_diagnostics_csv(const fs::path& path,
                           const std::vector<StepDiagnostics>& diags) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& d : diags) {
    rows.push_back({std::to_string(d.step), format_real(d.time),
                    format_real(d.mass_theta_ell_phi), format_real(d.mass_phi),
                    format_real(d.energy), format_real(d.linf_theta),
                    format_real(d.linf_phi)});
  }
  write_table(path,
              {"step", "time", "mass_theta_ell_phi", "mass_phi", "energy",
               "linf_theta", "linf_phi"},
              rows);
}

}  // namespace caginalp
