#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "bvp4/errors.hpp"
#include "bvp4/experiments.hpp"

namespace bvp4 {

namespace {

std::string sci(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw Error("read_csv: malformed number '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw Error("read_csv: cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != columns) throw Error("read_csv: wrong column count in " + path.string());
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_csv: cannot open " + path.string());
  return out;
}

}  // namespace

std::string format_report(const ErrorReport& report) {
  std::ostringstream os;
  os << "problem " << to_string(report.problem) << ", n = " << report.n << "\n\n";
  char buf[256];
  os << "relative errors R(phi^(j))\n";
  std::snprintf(buf, sizeof buf, "%6s %12s %12s %12s %12s %12s\n", "m", "phi", "phi'", "phi''", "phi'''", "phi''''");
  os << buf;
  for (const auto& row : report.rows) {
    if (!row.ok) {
      std::snprintf(buf, sizeof buf, "%6d  FAILED: %s\n", row.m, row.message.c_str());
      os << buf;
      continue;
    }
    std::snprintf(buf, sizeof buf, "%6d %12.4e %12.4e %12.4e %12.4e %12.4e\n", row.m, row.R[0], row.R[1], row.R[2],
                  row.R[3], row.R[4]);
    os << buf;
  }

  os << "\ntimings (seconds)\n";
  std::snprintf(buf, sizeof buf, "%6s %12s %12s %12s\n", "m", "factor", "solve", "total");
  os << buf;
  for (const auto& row : report.rows) {
    if (!row.ok) continue;
    std::snprintf(buf, sizeof buf, "%6d %12.4e %12.4e %12.4e\n", row.m, row.t_factor, row.t_solve, row.t_total);
    os << buf;
  }

  os << "\nrelative residual per iteration\n";
  std::size_t depth = 0;
  for (const auto& row : report.rows) depth = std::max(depth, row.residuals.size());
  std::snprintf(buf, sizeof buf, "%9s", "iteration");
  os << buf;
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, " %12s", ("m=" + std::to_string(row.m)).c_str());
    os << buf;
  }
  os << "\n";
  for (std::size_t it = 0; it < depth; ++it) {
    std::snprintf(buf, sizeof buf, "%9zu", it + 1);
    os << buf;
    for (const auto& row : report.rows) {
      if (it < row.residuals.size()) {
        std::snprintf(buf, sizeof buf, " %12.4e", row.residuals[it]);
      } else {
        std::snprintf(buf, sizeof buf, " %12s", "");
      }
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

CsvPaths csv_paths(const std::filesystem::path& dir, ProblemId id) {
  const auto stem = to_string(id);
  return {dir / (stem + "_errors.csv"), dir / (stem + "_timings.csv"), dir / (stem + "_residuals.csv")};
}

CsvPaths write_csv(const ErrorReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto paths = csv_paths(dir, report.problem);

  auto errors = open_out(paths.errors);
  errors << "m,n,status,R0,R1,R2,R3,R4,message\n";
  for (const auto& row : report.rows) {
    errors << row.m << ',' << report.n << ',' << (row.ok ? "ok" : "failed");
    for (double r : row.R) errors << ',' << sci(r);
    errors << ',' << quoted(row.message) << '\n';
  }

  auto timings = open_out(paths.timings);
  timings << "m,t_factor,t_solve,t_total\n";
  for (const auto& row : report.rows) {
    timings << row.m << ',' << sci(row.t_factor) << ',' << sci(row.t_solve) << ',' << sci(row.t_total) << '\n';
  }

  auto residuals = open_out(paths.residuals);
  residuals << "m,iteration,residual\n";
  for (const auto& row : report.rows) {
    for (std::size_t it = 0; it < row.residuals.size(); ++it) {
      residuals << row.m << ',' << it + 1 << ',' << sci(row.residuals[it]) << '\n';
    }
  }
  return paths;
}

ErrorReport read_csv(const std::filesystem::path& dir, ProblemId id) {
  const auto paths = csv_paths(dir, id);
  ErrorReport report;
  report.problem = id;
  std::map<int, std::size_t> index;
  for (const auto& f : read_rows(paths.errors, 9)) {
    ErrorRow row;
    row.m = std::stoi(f[0]);
    report.n = std::stoi(f[1]);
    row.ok = f[2] == "ok";
    for (int j = 0; j < 5; ++j) row.R[static_cast<std::size_t>(j)] = to_double(f[static_cast<std::size_t>(3 + j)]);
    row.message = f[8];
    index[row.m] = report.rows.size();
    report.rows.push_back(std::move(row));
  }
  const auto lookup = [&](const std::string& m) -> ErrorRow& {
    const auto it = index.find(std::stoi(m));
    if (it == index.end()) throw Error("read_csv: row for unknown m = " + m);
    return report.rows[it->second];
  };
  for (const auto& f : read_rows(paths.timings, 4)) {
    auto& row = lookup(f[0]);
    row.t_factor = to_double(f[1]);
    row.t_solve = to_double(f[2]);
    row.t_total = to_double(f[3]);
  }
  for (const auto& f : read_rows(paths.residuals, 3)) lookup(f[0]).residuals.push_back(to_double(f[2]));
  return report;
}

}  // namespace bvp4
