#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <string>

#include "kinkasym/errors.hpp"
#include "kinkasym/linalg.hpp"
#include "kinkasym/runner/run.hpp"
#include "kinkasym/version.hpp"

namespace {

using namespace kinkasym;

void print_summary(const runner::CompareSummary& s) {
  for (const auto& d : s.columns)
    std::cout << d.file << ":" << d.column << "  max " << d.max_abs << "  rms " << d.rms << "  at t=" << d.time_of_max
              << (d.passed ? "" : (s.observe ? "  (exceeds tol)" : "  FAIL")) << "\n";
  std::cout << (s.passed ? "compare: ok" : "compare: FAIL") << " (tol " << s.tol << ")\n";
}

int dispatch(const std::function<int()>& body) {
  try {
    return body();
  } catch (const RegimeError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return 3;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kink dynamics and entanglement asymmetry in a constrained Ising chain"};
  app.set_version_flag("--version", std::string(kinkasym::kVersion));
  app.require_subcommand(1);

  std::string cfg_path;
  std::string out_override;
  auto* run = app.add_subcommand("run", "Run the engine named in a config file");
  run->add_option("config", cfg_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", out_override, "Override output_dir");

  std::string dir_a;
  std::string dir_b;
  double tol = 1e-8;
  bool observe = false;
  std::string report;
  auto* cmp = app.add_subcommand("compare", "Compare the outputs of two run directories");
  cmp->add_option("dir_a", dir_a)->required()->check(CLI::ExistingDirectory);
  cmp->add_option("dir_b", dir_b)->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--tol", tol, "Max absolute difference allowed")->capture_default_str();
  cmp->add_flag("--observe", observe, "Report differences without failing");
  cmp->add_option("--report", report, "Write a CSV report");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Parse and check a config without running it");
  val->add_option("config", validate_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    if (!kinkasym::linalg::lapack_usable())
      std::cerr << "warning: LAPACK self-check failed, using the Eigen fallback (try OPENBLAS_CORETYPE=Haswell)\n";
    return dispatch([&] {
      auto cfg = runner::load_config(cfg_path);
      if (!out_override.empty()) {
        cfg.output_dir = out_override;
        cfg.resolved["output_dir"] = out_override;
      }
      const auto outcome = runner::run(cfg);
      if (outcome.comparison) print_summary(*outcome.comparison);
      std::cout << "wrote " << cfg.output_dir << " (config " << runner::config_hash(cfg) << ")\n";
      return outcome.exit_code;
    });
  }
  if (*cmp) {
    return dispatch([&] {
      const auto s = runner::compare_dirs(dir_a, dir_b, tol, observe);
      if (!report.empty()) runner::write_compare_report(s, report);
      print_summary(s);
      return s.passed ? 0 : 2;
    });
  }
  return dispatch([&] {
    const auto cfg = runner::load_config(validate_path);
    runner::check_config(cfg, cfg.engine);
    std::cout << "ok: " << runner::to_string(cfg.engine) << " L=" << cfg.params.L << " samples=" << cfg.times.size()
              << " hash=" << runner::config_hash(cfg) << "\n";
    return 0;
  });
}
