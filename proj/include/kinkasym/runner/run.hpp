#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinkasym/asymmetry.hpp"
#include "kinkasym/exact.hpp"
#include "kinkasym/fermion.hpp"
#include "kinkasym/mps.hpp"
#include "kinkasym/parallel.hpp"
#include "kinkasym/runner/compare.hpp"
#include "kinkasym/runner/config.hpp"
#include "kinkasym/runner/output.hpp"
#include "kinkasym/tebd.hpp"
#include "kinkasym/twokink.hpp"

namespace kinkasym::runner {

struct Sample {
  std::vector<double> s2;
  std::vector<double> s2_projected;  // empty without a charge
  std::vector<double> kink_density;  // links 1..L-1
  std::vector<double> sigma_z;       // sites 1..L
};

class SampleSink {
 public:
  SampleSink(const std::filesystem::path& dir, const RunConfig& cfg, Engine engine) : cuts_(cfg.cuts.resolve(cfg.params.L)) {
    const auto hash = config_hash(cfg);
    if (cfg.outputs.entropy) {
      std::vector<std::string> cols{"time", "cut", "S2"};
      if (cfg.charge.enabled) cols.insert(cols.end(), {"S2_Q", "dS2"});
      entropy_ = std::make_unique<CsvWriter>(dir / "entropy.csv", hash, engine, cols);
      files_.push_back("entropy.csv");
    }
    if (cfg.outputs.kink_density) {
      kinks_ = std::make_unique<CsvWriter>(dir / "kink_density.csv", hash, engine,
                                           std::vector<std::string>{"time", "link", "delta"});
      files_.push_back("kink_density.csv");
    }
    if (cfg.outputs.sigma_z) {
      sz_ = std::make_unique<CsvWriter>(dir / "observables.csv", hash, engine,
                                        std::vector<std::string>{"time", "site", "sigma_z"});
      files_.push_back("observables.csv");
    }
  }

  [[nodiscard]] const std::vector<int>& cuts() const noexcept { return cuts_; }
  [[nodiscard]] bool wants_entropy() const noexcept { return entropy_ != nullptr; }
  [[nodiscard]] const std::vector<std::string>& files() const noexcept { return files_; }

  void write(double t, const Sample& s) {
    if (entropy_)
      for (std::size_t c = 0; c < cuts_.size(); ++c) {
        if (s.s2_projected.empty()) {
          entropy_->row(t, cuts_[c], {s.s2[c]});
        } else {
          entropy_->row(t, cuts_[c], {s.s2[c], s.s2_projected[c], s.s2_projected[c] - s.s2[c]});
        }
      }
    if (kinks_)
      for (std::size_t i = 0; i < s.kink_density.size(); ++i)
        kinks_->row(t, static_cast<long>(i) + 1, {s.kink_density[i]});
    if (sz_)
      for (std::size_t i = 0; i < s.sigma_z.size(); ++i) sz_->row(t, static_cast<long>(i) + 1, {s.sigma_z[i]});
  }

 private:
  std::vector<int> cuts_;
  std::unique_ptr<CsvWriter> entropy_;
  std::unique_ptr<CsvWriter> kinks_;
  std::unique_ptr<CsvWriter> sz_;
  std::vector<std::string> files_;
};

namespace engines {

inline nlohmann::json run_exact(const RunConfig& cfg, SampleSink& sink) {
  const auto& p = cfg.params;
  const exact::Propagator prop(exact::build_hamiltonian(p));
  const auto psi0 = exact::DenseState::basis(cfg.initial);
  for (double t : cfg.times) {
    const auto psi = prop.evolve(psi0, t);
    Sample s;
    if (sink.wants_entropy()) {
      const auto basis_state = cfg.charge.kw_basis ? exact::kw_circuit(psi) : psi;
      for (int cut : sink.cuts()) {
        const auto rho = exact::reduce(basis_state, cut);
        s.s2.push_back(exact::renyi2(rho));
        if (cfg.charge.enabled) s.s2_projected.push_back(exact::renyi2(exact::project_charge(rho, {cfg.charge.kind, cut})));
      }
    }
    for (int i = 1; i < p.L; ++i) s.kink_density.push_back(exact::kink_density(psi, i));
    for (int i = 1; i <= p.L; ++i) s.sigma_z.push_back(exact::sigma_z_expectation(psi, i));
    sink.write(t, s);
  }
  return {{"tolerances", {{"dense_limit_L", exact::kDefaultDenseLimit}, {"charge_projection", "exact sector masking"}}}};
}

inline Sample twokink_sample(const twokink::TwoKinkAmplitudes& a, const twokink::TwoKinkBasis& basis,
                             const RunConfig& cfg, const SampleSink& sink, bool check_bound) {
  Sample s;
  if (sink.wants_entropy())
    for (int cut : sink.cuts()) {
      if (check_bound) {
        s.s2.push_back(fermion::schmidt_bound_s2(a, basis, cut).s2);
        continue;
      }
      const auto r = twokink::renyi2_twokink_resolved(a, basis, cut);
      s.s2.push_back(r.s2);
      if (cfg.charge.enabled) s.s2_projected.push_back(r.s2_projected);
    }
  s.kink_density = twokink::kink_density_profile(a, basis);
  s.sigma_z = twokink::sigma_z_profile(a, basis);
  return s;
}

inline nlohmann::json run_twokink(const RunConfig& cfg, SampleSink& sink) {
  const twokink::TwoKinkBasis basis(cfg.params.L);
  const twokink::TwoKinkPropagator prop(twokink::build_h2(cfg.params));
  const auto a0 = twokink::TwoKinkAmplitudes::from_pattern(cfg.initial);
  constexpr std::size_t kChunk = 64;
  for (std::size_t start = 0; start < cfg.times.size(); start += kChunk) {
    const std::vector<double> chunk(cfg.times.begin() + static_cast<long>(start),
                                    cfg.times.begin() + static_cast<long>(std::min(start + kChunk, cfg.times.size())));
    const auto states = prop.evolve_many(a0, chunk);
    std::vector<Sample> samples(chunk.size());
    parallel_for(chunk.size(), [&](std::size_t k) { samples[k] = twokink_sample(states[k], basis, cfg, sink, false); });
    for (std::size_t k = 0; k < chunk.size(); ++k) sink.write(chunk[k], samples[k]);
  }
  return {{"tolerances", {{"kink_conserving", cfg.params.kink_conserving()},
                          {"note", cfg.params.kink_conserving() ? "exact on the J = -g line"
                                                                : "projected two-kink approximation (J != -g)"}}}};
}

inline nlohmann::json run_fermion(const RunConfig& cfg, SampleSink& sink) {
  const int L = cfg.params.L;
  const twokink::TwoKinkBasis basis(L);
  const fermion::FermionPropagator prop(fermion::hopping_matrix(cfg.params));
  int jl = 0;
  int jr = 0;
  for (int i = 2; i < L; ++i)
    if (cfg.initial(i) == -1) {
      if (jl == 0) jl = i;
      jr = i;
    }
  const auto [x, y] = fermion::domain_modes(jl, jr - jl + 1);
  for (double t : cfg.times) {
    const auto f = fermion::two_fermion_state(prop.propagate(t), x, y);
    sink.write(t, twokink_sample(fermion::to_twokink(f), basis, cfg, sink, true));
  }
  return {{"tolerances", {{"schmidt_bound", "S2 <= 2 + 1e-9 asserted at every cut"}}}};
}

inline nlohmann::json run_mps(const RunConfig& cfg, SampleSink& sink) {
  const auto& p = cfg.params;
  auto m = mps::mps_from_pattern(cfg.initial, cfg.mps.trunc);
  mps::TebdEvolver ev(p, cfg.mps.dt, cfg.mps.order);
  const double n0 = kink_count(cfg.initial);
  double drift = 0.0;
  double kw_trunc = 0.0;
  bool kw_warning = false;
  Index max_bond = 1;
  double t_prev = 0.0;
  const mps::AsymmetryOptions opt{cfg.charge.method, cfg.charge.mpo_bond_budget};
  for (double t : cfg.times) {
    ev.evolve(m, t - t_prev);
    t_prev = t;
    max_bond = std::max(max_bond, m.max_bond());
    Sample s;
    const auto lz = mps::local_z(m);
    s.sigma_z = lz.z;
    double kinks = 0.0;
    for (double zz : lz.zz) {
      s.kink_density.push_back(0.5 * (1.0 - zz));
      kinks += 0.5 * (1.0 - zz);
    }
    if (p.kink_conserving()) drift = std::max(drift, std::abs(kinks - n0));
    if (sink.wants_entropy()) {
      mps::MPSState work = cfg.charge.kw_basis ? mps::kw_apply(m) : m;
      if (cfg.charge.kw_basis) {
        kw_trunc = std::max(kw_trunc, work.truncation_error() - m.truncation_error());
        kw_warning = kw_warning || work.budget_warning();
      }
      for (int cut : sink.cuts()) {
        if (cfg.charge.enabled) {
          const ChargeSpec q{cfg.charge.kind, cut};
          const auto r = mps::asymmetry_s2(work, q, cfg.charge.grid_for(q), opt);
          s.s2.push_back(r.s2);
          s.s2_projected.push_back(r.s2_projected);
        } else {
          s.s2.push_back(mps::renyi2_at_cut(work, cut));
        }
      }
    }
    sink.write(t, s);
  }
  nlohmann::json mj;
  mj["max_bond"] = max_bond;
  mj["truncation_error"] = m.truncation_error();
  mj["budget_warning"] = m.budget_warning() || kw_warning;
  if (cfg.charge.kw_basis) mj["kw_truncation_error_max"] = kw_trunc;
  if (p.kink_conserving()) mj["kink_number_drift_max"] = drift;
  return {{"mps", mj},
          {"tolerances",
           {{"chi_max", cfg.mps.trunc.chi_max}, {"cutoff", cfg.mps.trunc.cutoff}, {"dt_trotter", cfg.mps.dt},
            {"trotter_order", cfg.mps.order}}}};
}

}  // namespace engines

struct RunOutcome {
  int exit_code = 0;
  std::vector<std::filesystem::path> dirs;
  std::optional<CompareSummary> comparison;
};

/// Runs one engine into `dir` and writes its manifest.
inline void run_engine(const RunConfig& cfg, Engine engine, const std::filesystem::path& dir) {
  check_config(cfg, engine);
  std::filesystem::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();
  SampleSink sink(dir, cfg, engine);
  nlohmann::json extra;
  switch (engine) {
    case Engine::Exact: extra = engines::run_exact(cfg, sink); break;
    case Engine::TwoKink: extra = engines::run_twokink(cfg, sink); break;
    case Engine::Fermion: extra = engines::run_fermion(cfg, sink); break;
    case Engine::Mps: extra = engines::run_mps(cfg, sink); break;
    case Engine::Compare: throw ConfigError("run_engine: compare is not a single engine");
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(dir, cfg, engine, sink.files(), wall, extra);
}

inline RunOutcome run(const RunConfig& cfg) {
  check_config(cfg, cfg.engine);
  RunOutcome out;
  const std::filesystem::path root(cfg.output_dir);
  if (cfg.engine != Engine::Compare) {
    run_engine(cfg, cfg.engine, root);
    out.dirs.push_back(root);
    return out;
  }
  for (Engine e : cfg.compare.engines) {
    RunConfig leg = cfg;
    leg.engine = e;
    leg.resolved["engine"] = to_string(e);
    if (e == Engine::TwoKink) {
      leg.twokink_strict = false;
      leg.resolved["twokink.strict"] = "false";
    }
    const auto dir = root / to_string(e);
    run_engine(leg, e, dir);
    out.dirs.push_back(dir);
  }
  out.comparison = compare_dirs(out.dirs[0], out.dirs[1], cfg.compare.tol, cfg.compare.observe);
  write_compare_report(*out.comparison, root / "compare_report.csv");
  out.exit_code = out.comparison->passed ? 0 : 2;
  return out;
}

}  // namespace kinkasym::runner
