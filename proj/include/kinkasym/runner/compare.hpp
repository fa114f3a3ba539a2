#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kinkasym/runner/output.hpp"

namespace kinkasym::runner {

class MisalignedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ColumnDiff {
  std::string file;
  std::string column;
  double max_abs = 0.0;
  double rms = 0.0;
  double time_of_max = 0.0;
  bool passed = true;
};

struct CompareSummary {
  double tol = 0.0;
  bool observe = false;
  bool passed = true;
  std::vector<ColumnDiff> columns;
};

inline const std::vector<std::string>& comparable_files() {
  static const std::vector<std::string> files{"entropy.csv", "kink_density.csv", "observables.csv"};
  return files;
}

/// Column-wise differences of two tables sharing (time, key) rows. Columns
/// present in only one table are skipped.
inline std::vector<ColumnDiff> diff_tables(const std::string& name, const CsvTable& a, const CsvTable& b, double tol) {
  if (a.rows.size() != b.rows.size())
    throw MisalignedError(name + ": " + std::to_string(a.rows.size()) + " vs " + std::to_string(b.rows.size()) + " rows");
  if (a.columns.size() < 2 || b.columns.size() < 2 || a.columns[0] != b.columns[0] || a.columns[1] != b.columns[1])
    throw MisalignedError(name + ": leading columns differ");
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    const double ta = a.rows[r][0];
    const double tb = b.rows[r][0];
    if (std::abs(ta - tb) > 1e-9 * std::max(1.0, std::abs(ta)) || a.rows[r][1] != b.rows[r][1])
      throw MisalignedError(name + ": row " + std::to_string(r + 1) + " is at (" + std::to_string(ta) + ", " +
                            std::to_string(a.rows[r][1]) + ") vs (" + std::to_string(tb) + ", " +
                            std::to_string(b.rows[r][1]) + ")");
  }
  std::vector<ColumnDiff> out;
  for (std::size_t ca = 2; ca < a.columns.size(); ++ca) {
    const auto it = std::find(b.columns.begin() + 2, b.columns.end(), a.columns[ca]);
    if (it == b.columns.end()) continue;
    const auto cb = static_cast<std::size_t>(it - b.columns.begin());
    ColumnDiff d{name, a.columns[ca]};
    double sq = 0.0;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      const double e = std::abs(a.rows[r][ca] - b.rows[r][cb]);
      sq += e * e;
      if (e > d.max_abs) {
        d.max_abs = e;
        d.time_of_max = a.rows[r][0];
      }
    }
    d.rms = a.rows.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(a.rows.size()));
    d.passed = d.max_abs <= tol;
    out.push_back(d);
  }
  return out;
}

/// Compares every output file the two run directories have in common.
inline CompareSummary compare_dirs(const std::filesystem::path& a, const std::filesystem::path& b, double tol,
                                   bool observe = false) {
  CompareSummary s{tol, observe};
  bool any = false;
  for (const auto& f : comparable_files()) {
    if (!std::filesystem::exists(a / f) || !std::filesystem::exists(b / f)) continue;
    any = true;
    for (auto& d : diff_tables(f, read_csv(a / f), read_csv(b / f), tol)) {
      s.passed = s.passed && d.passed;
      s.columns.push_back(std::move(d));
    }
  }
  if (!any) throw MisalignedError("no common output files in '" + a.string() + "' and '" + b.string() + "'");
  if (observe) s.passed = true;
  return s;
}

inline void write_compare_report(const CompareSummary& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.precision(6);
  out << "# kinkasym " << kVersion << "\n";
  out << "# tol " << s.tol << (s.observe ? " (observe)" : "") << "\n";
  out << "file,column,max_abs,rms,time_of_max,status\n";
  for (const auto& d : s.columns)
    out << d.file << "," << d.column << "," << d.max_abs << "," << d.rms << "," << d.time_of_max << ","
        << (d.passed ? "ok" : (s.observe ? "exceeds" : "FAIL")) << "\n";
}

}  // namespace kinkasym::runner
