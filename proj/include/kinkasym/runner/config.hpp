#pragma once

// Run configuration: flat `key = value` lines with dotted keys, `#` starts a
// comment. See configs/README.md for the schema.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kinkasym/asymmetry.hpp"
#include "kinkasym/errors.hpp"
#include "kinkasym/exact.hpp"
#include "kinkasym/model.hpp"
#include "kinkasym/mps.hpp"

namespace kinkasym::runner {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { Exact, TwoKink, Fermion, Mps, Compare };

inline const char* to_string(Engine e) {
  switch (e) {
    case Engine::Exact: return "exact";
    case Engine::TwoKink: return "twokink";
    case Engine::Fermion: return "fermion";
    case Engine::Mps: return "mps";
    case Engine::Compare: return "compare";
  }
  return "?";
}

inline Engine parse_engine(const std::string& s) {
  for (Engine e : {Engine::Exact, Engine::TwoKink, Engine::Fermion, Engine::Mps, Engine::Compare})
    if (s == to_string(e)) return e;
  throw ConfigError("unknown engine '" + s + "'");
}

struct CutSpec {
  enum class Mode { All, Half, List } mode = Mode::Half;
  std::vector<int> list;

  [[nodiscard]] std::vector<int> resolve(int L) const {
    std::vector<int> out;
    switch (mode) {
      case Mode::All:
        for (int c = 1; c < L; ++c) out.push_back(c);
        break;
      case Mode::Half: out.push_back(L / 2); break;
      case Mode::List:
        for (int c : list) {
          if (c < 1 || c >= L) throw RangeError("cut " + std::to_string(c) + " outside 1..L-1");
          out.push_back(c);
        }
        break;
    }
    return out;
  }
};

struct ChargeConfig {
  bool enabled = false;
  ChargeKind kind = ChargeKind::LinkKink;
  bool kw_basis = false;
  int k = 0;  // 0: 2 * spectral range + 2 for each cut
  mps::AsymmetryMethod method = mps::AsymmetryMethod::Mpo;
  Index mpo_bond_budget = 1024;

  [[nodiscard]] int grid_for(const ChargeSpec& q) const { return k > 0 ? k : 2 * q.spectral_range() + 2; }
};

struct MpsConfig {
  mps::TruncationParams trunc;
  double dt = 0.05;
  int order = 2;
};

struct CompareConfig {
  std::vector<Engine> engines{Engine::Exact, Engine::TwoKink};
  double tol = 1e-8;
  bool observe = false;
};

struct Outputs {
  bool entropy = true;
  bool kink_density = true;
  bool sigma_z = true;
};

struct RunConfig {
  Engine engine = Engine::Exact;
  ModelParams params;
  SpinPattern initial;
  std::vector<double> times;
  CutSpec cuts;
  ChargeConfig charge;
  MpsConfig mps;
  CompareConfig compare;
  Outputs outputs;
  bool twokink_strict = true;
  std::string output_dir = "out";
  // every key with its resolved value, used for the manifest and the hash
  std::map<std::string, std::string> resolved;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(out)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

inline long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

inline std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

inline RunConfig parse_config(const std::string& text) {
  auto kv = parse_key_values(text);
  RunConfig cfg;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto num = [&](const std::string& key, double fallback) {
    const auto v = take(key);
    return v ? detail::to_double(key, *v) : fallback;
  };

  const auto engine = take("engine");
  if (!engine) throw ConfigError("missing required key 'engine'");
  cfg.engine = parse_engine(*engine);

  cfg.params.J0 = num("model.J0", 1.0);
  cfg.params.g = num("model.g", 0.0);
  cfg.params.h = num("model.h", 0.0);
  cfg.params.J = num("model.J", 0.0);
  if (const auto v = take("model.J_from_g")) {
    if (detail::to_bool("model.J_from_g", *v)) cfg.params.J = -cfg.params.g;
  }
  if (const auto v = take("model.L"))
    cfg.params.L = static_cast<int>(detail::to_int("model.L", *v));
  else
    throw ConfigError("missing required key 'model.L'");

  const auto pattern = take("initial.pattern");
  const auto j = take("initial.j");
  const auto n = take("initial.n");
  if (pattern && (j || n)) throw ConfigError("give either initial.pattern or initial.j/initial.n, not both");
  if (pattern) {
    cfg.initial = SpinPattern::parse(*pattern);
    if (cfg.initial.size() != cfg.params.L)
      throw ConfigError("initial.pattern has " + std::to_string(cfg.initial.size()) + " sites but model.L = " +
                        std::to_string(cfg.params.L));
  } else if (j && n) {
    cfg.initial = build_domain_wall(cfg.params.L, static_cast<int>(detail::to_int("initial.j", *j)),
                                    static_cast<int>(detail::to_int("initial.n", *n)));
  } else {
    throw ConfigError("initial state missing: set initial.pattern or both initial.j and initial.n");
  }

  const auto list = take("times.list");
  const auto t_max = take("times.t_max");
  const auto dt_sample = take("times.dt_sample");
  if (list && (t_max || dt_sample)) throw ConfigError("give either times.list or times.t_max/times.dt_sample");
  if (list) {
    for (const auto& item : detail::split_list(*list)) cfg.times.push_back(detail::to_double("times.list", item));
  } else {
    if (!t_max || !dt_sample) throw ConfigError("times: set times.t_max and times.dt_sample, or times.list");
    const double tm = detail::to_double("times.t_max", *t_max);
    const double dt = detail::to_double("times.dt_sample", *dt_sample);
    if (!(dt > 0.0)) throw ConfigError("times.dt_sample must be positive");
    if (tm >= 0.0) {
      const auto count = static_cast<long>(std::floor(tm / dt + 1e-9));
      for (long s = 0; s <= count; ++s) cfg.times.push_back(static_cast<double>(s) * dt);
    }
  }
  for (std::size_t s = 0; s < cfg.times.size(); ++s) {
    if (cfg.times[s] < 0.0) throw ConfigError("times must be non-negative");
    if (s > 0 && cfg.times[s] <= cfg.times[s - 1]) throw ConfigError("times must be strictly increasing");
  }

  if (const auto v = take("cuts")) {
    if (*v == "all") {
      cfg.cuts.mode = CutSpec::Mode::All;
    } else if (*v == "half") {
      cfg.cuts.mode = CutSpec::Mode::Half;
    } else {
      cfg.cuts.mode = CutSpec::Mode::List;
      for (const auto& item : detail::split_list(*v)) cfg.cuts.list.push_back(static_cast<int>(detail::to_int("cuts", item)));
    }
  }

  if (const auto v = take("charge.kind")) {
    if (*v != "none") {
      cfg.charge.enabled = true;
      cfg.charge.kind = parse_charge_kind(*v);
    }
  }
  if (const auto v = take("charge.kw_basis")) cfg.charge.kw_basis = detail::to_bool("charge.kw_basis", *v);
  if (const auto v = take("charge.k")) {
    if (*v != "auto") cfg.charge.k = static_cast<int>(detail::to_int("charge.k", *v));
  }
  if (const auto v = take("charge.method")) cfg.charge.method = mps::parse_asymmetry_method(*v);
  if (const auto v = take("charge.mpo_bond_budget"))
    cfg.charge.mpo_bond_budget = detail::to_int("charge.mpo_bond_budget", *v);

  if (const auto v = take("mps.chi_max")) cfg.mps.trunc.chi_max = static_cast<int>(detail::to_int("mps.chi_max", *v));
  cfg.mps.trunc.cutoff = num("mps.cutoff", cfg.mps.trunc.cutoff);
  cfg.mps.dt = num("mps.dt_trotter", cfg.mps.dt);
  if (const auto v = take("mps.trotter_order")) cfg.mps.order = static_cast<int>(detail::to_int("mps.trotter_order", *v));

  if (const auto v = take("compare.engines")) {
    cfg.compare.engines.clear();
    for (const auto& item : detail::split_list(*v)) cfg.compare.engines.push_back(parse_engine(item));
  }
  cfg.compare.tol = num("compare.tol", cfg.compare.tol);
  if (const auto v = take("compare.observe")) cfg.compare.observe = detail::to_bool("compare.observe", *v);

  if (const auto v = take("outputs")) {
    cfg.outputs = Outputs{false, false, false};
    for (const auto& item : detail::split_list(*v)) {
      if (item == "entropy") cfg.outputs.entropy = true;
      else if (item == "kink_density") cfg.outputs.kink_density = true;
      else if (item == "sigma_z") cfg.outputs.sigma_z = true;
      else throw ConfigError("outputs: unknown item '" + item + "'");
    }
  }
  if (const auto v = take("twokink.strict")) cfg.twokink_strict = detail::to_bool("twokink.strict", *v);
  if (const auto v = take("output_dir")) cfg.output_dir = *v;

  if (!kv.empty()) throw ConfigError("unknown key '" + kv.begin()->first + "'");

  auto& r = cfg.resolved;
  r["engine"] = to_string(cfg.engine);
  r["model.J0"] = detail::format_double(cfg.params.J0);
  r["model.g"] = detail::format_double(cfg.params.g);
  r["model.h"] = detail::format_double(cfg.params.h);
  r["model.J"] = detail::format_double(cfg.params.J);
  r["model.L"] = std::to_string(cfg.params.L);
  r["initial.pattern"] = cfg.initial.to_string();
  {
    std::string t;
    for (double x : cfg.times) t += (t.empty() ? "" : ",") + detail::format_double(x);
    r["times"] = t;
  }
  {
    std::string c;
    for (int x : cfg.cuts.resolve(cfg.params.L)) c += (c.empty() ? "" : ",") + std::to_string(x);
    r["cuts"] = c;
  }
  r["charge.kind"] = cfg.charge.enabled ? to_string(cfg.charge.kind) : "none";
  r["charge.kw_basis"] = cfg.charge.kw_basis ? "true" : "false";
  r["charge.k"] = cfg.charge.k > 0 ? std::to_string(cfg.charge.k) : "auto";
  r["charge.method"] = mps::to_string(cfg.charge.method);
  r["charge.mpo_bond_budget"] = std::to_string(cfg.charge.mpo_bond_budget);
  r["mps.chi_max"] = std::to_string(cfg.mps.trunc.chi_max);
  r["mps.cutoff"] = detail::format_double(cfg.mps.trunc.cutoff);
  r["mps.dt_trotter"] = detail::format_double(cfg.mps.dt);
  r["mps.trotter_order"] = std::to_string(cfg.mps.order);
  {
    std::string e;
    for (Engine x : cfg.compare.engines) e += (e.empty() ? "" : ",") + std::string(to_string(x));
    r["compare.engines"] = e;
  }
  r["compare.tol"] = detail::format_double(cfg.compare.tol);
  r["compare.observe"] = cfg.compare.observe ? "true" : "false";
  r["outputs"] = std::string(cfg.outputs.entropy ? "entropy," : "") + (cfg.outputs.kink_density ? "kink_density," : "") +
                 (cfg.outputs.sigma_z ? "sigma_z" : "");
  r["twokink.strict"] = cfg.twokink_strict ? "true" : "false";
  r["output_dir"] = cfg.output_dir;
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Engine-specific checks that need the whole config: capacity, regime,
/// charge support.
inline void check_config(const RunConfig& cfg, Engine engine) {
  cfg.params.validate();
  const auto cuts = cfg.cuts.resolve(cfg.params.L);
  if (cfg.charge.enabled)
    for (int c : cuts) {
      const ChargeSpec q{cfg.charge.kind, c};
      q.validate(cfg.params.L);
      if (cfg.charge.k > 0 && cfg.charge.k < 2 * q.spectral_range())
        throw ConfigError("charge.k = " + std::to_string(cfg.charge.k) + " is below twice the spectral range at cut " +
                          std::to_string(c));
    }
  switch (engine) {
    case Engine::Exact: exact::check_capacity(cfg.params.L, exact::kDefaultDenseLimit); break;
    case Engine::TwoKink:
      if (cfg.twokink_strict && !cfg.params.kink_conserving())
        throw RegimeError("twokink engine in strict mode needs J == -g (set twokink.strict = false for the projected "
                          "two-kink approximation)");
      if (cfg.charge.enabled && (cfg.charge.kind != ChargeKind::LinkKink || cfg.charge.kw_basis))
        throw RegimeError("twokink engine only resolves the link_kink charge in the original basis");
      break;
    case Engine::Fermion:
      if (cfg.params.h != 0.0 || !cfg.params.kink_conserving())
        throw RegimeError("fermion engine requires h == 0 and J == -g");
      if (cfg.charge.enabled) throw RegimeError("fermion engine does not compute charge-resolved entropies");
      break;
    case Engine::Mps:
      if (cfg.mps.order != 2 && cfg.mps.order != 4) throw ConfigError("mps.trotter_order must be 2 or 4");
      if (!(cfg.mps.dt > 0.0)) throw ConfigError("mps.dt_trotter must be positive");
      if (cfg.mps.trunc.chi_max < 1) throw ConfigError("mps.chi_max must be at least 1");
      break;
    case Engine::Compare:
      if (cfg.compare.engines.size() != 2) throw ConfigError("compare.engines needs exactly two engines");
      for (Engine e : cfg.compare.engines) {
        if (e == Engine::Compare) throw ConfigError("compare.engines cannot contain compare");
        RunConfig leg = cfg;
        if (e == Engine::TwoKink) leg.twokink_strict = false;
        check_config(leg, e);
      }
      break;
  }
  if (cfg.charge.kw_basis && engine != Engine::Exact && engine != Engine::Mps && engine != Engine::Compare)
    throw RegimeError("charge.kw_basis is only supported by the exact and mps engines");
  if (engine == Engine::TwoKink || engine == Engine::Fermion) {
    if (kink_count(cfg.initial) != 2 || cfg.initial(1) != 1 || cfg.initial(cfg.params.L) != 1)
      throw RegimeError("two-kink engines need a single flipped interior domain as the initial state");
  }
}

/// FNV-1a over the resolved key/value pairs.
inline std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : cfg.resolved) {
    if (k == "output_dir") continue;
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace kinkasym::runner
