#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinkasym/runner/config.hpp"
#include "kinkasym/version.hpp"

namespace kinkasym::runner {

inline constexpr int kDefaultPrecision = 12;
inline constexpr const char* kPrecisionEnv = "KINKASYM_PRECISION";

inline int output_precision() {
  const char* env = std::getenv(kPrecisionEnv);
  if (env == nullptr || *env == '\0') return kDefaultPrecision;
  const long p = detail::to_int(kPrecisionEnv, env);
  if (p < 1 || p > 17) throw ConfigError(std::string(kPrecisionEnv) + " must be in 1..17");
  return static_cast<int>(p);
}

/// Long-form CSV with a `#` comment header identifying the run.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& hash, Engine engine,
            const std::vector<std::string>& columns)
      : out_(path), precision_(output_precision()) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
    out_ << "# kinkasym " << kVersion << "\n";
    out_ << "# config_hash " << hash << "\n";
    out_ << "# engine " << to_string(engine) << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) out_ << (c ? "," : "") << columns[c];
    out_ << "\n";
  }

  void row(double time, long key, const std::vector<double>& values) {
    out_ << format(time) << "," << key;
    for (double v : values) out_ << "," << format(v);
    out_ << "\n";
  }

  [[nodiscard]] std::string format(double x) const {
    if (x == 0.0) x = 0.0;  // no "-0"
    std::ostringstream os;
    os.precision(precision_);
    os << x;
    return os.str();
  }

 private:
  std::ofstream out_;
  int precision_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (table.columns.empty()) {
      table.columns = cells;
      continue;
    }
    if (cells.size() != table.columns.size())
      throw std::runtime_error(path.string() + ": row with " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(table.columns.size()));
    std::vector<double> values;
    for (const auto& c : cells) values.push_back(detail::to_double(path.string(), c));
    table.rows.push_back(std::move(values));
  }
  return table;
}

inline void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg, Engine engine,
                           const std::vector<std::string>& files, double wall_seconds, const nlohmann::json& extra) {
  nlohmann::json m;
  m["tool"] = "kinkasym";
  m["version"] = kVersion;
  m["engine"] = to_string(engine);
  m["config_hash"] = config_hash(cfg);
  m["config"] = cfg.resolved;
  m["outputs"] = files;
  m["precision"] = output_precision();
  m["linalg_backend"] = linalg::backend_name();
  m["wall_clock_seconds"] = wall_seconds;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in '" + dir.string() + "'");
  out << m.dump(2) << "\n";
}

}  // namespace kinkasym::runner
