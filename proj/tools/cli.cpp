#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "thermvisc/checks.hpp"
#include "thermvisc/errors.hpp"
#include "thermvisc/run.hpp"

namespace thermvisc {

namespace {

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw InvalidInput("empty entry in --values");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw InvalidInput("--values is empty");
  return out;
}

// "eps5" -> (epsilons, eps5); "time.dt" -> (time, dt).
std::pair<std::string, std::string> param_key(const std::string& p) {
  const auto dot = p.find('.');
  if (dot != std::string::npos) return {p.substr(0, dot), p.substr(dot + 1)};
  if (p.rfind("eps", 0) == 0 || p == "lambda") return {"epsilons", p};
  throw InvalidInput("--param '" + p + "': use epsK, lambda or section.key");
}

void report_run(std::ostream& out, const std::string& dir, const RunResult& r) {
  out << dir << ": " << r.manifest.halt_reason << ", " << r.manifest.steps << " steps";
  if (!r.manifest.monitor_flags.empty()) {
    out << ", flags:";
    for (const auto& f : r.manifest.monitor_flags) out << " " << f;
  }
  out << "\n";
  for (const auto& w : r.manifest.warnings) out << "  warning: " << w << "\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermo-viscoelastic Giesekus simulator and invariant checks", "thermvisc"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config_path, out_dir, suite = "all", param, values;
  int snapshot_every = -1;

  auto* run = app.add_subcommand("run", "Run one simulation into an output directory");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--snapshot-every", snapshot_every, "Steps between snapshots (0 disables)")
      ->check(CLI::NonNegativeNumber);

  auto* check = app.add_subcommand("check", "Run built-in property suites");
  check->add_option("--suite", suite, "algebra, invariants or all")
      ->check(CLI::IsMember({"algebra", "invariants", "all"}));

  auto* oracle = app.add_subcommand("oracle", "Oracle report for a config's material and epsilons");
  oracle->add_option("--config", config_path, "Config file")->required();

  auto* sweep = app.add_subcommand("sweep", "Repeat a run over values of one parameter");
  sweep->add_option("--config", config_path, "Config file")->required();
  sweep->add_option("--param", param, "epsK, lambda or section.key")->required();
  sweep->add_option("--values", values, "Comma separated values")->required();
  sweep->add_option("--out", out_dir, "Parent directory for the runs")->default_val("sweep");
  sweep->add_option("--snapshot-every", snapshot_every, "Steps between snapshots (0 disables)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*check) {
      const CheckReport rep = run_check_suite(parse_suite(suite));
      out << rep.to_text();
      out << (rep.passed() ? "all checks passed\n" : "some checks FAILED\n");
      return rep.passed() ? 0 : 1;
    }
    const SimConfig cfg = parse_config(config_path);
    if (*oracle) {
      const CheckReport rep = oracle_suite(cfg);
      out << rep.to_text();
      return rep.passed() ? 0 : 1;
    }
    if (*run) {
      const RunResult r = run_to_directory(cfg, out_dir, snapshot_every);
      report_run(out, out_dir, r);
      return r.trajectory.halted ? 1 : 0;
    }
    // sweep
    const auto [section, key] = param_key(param);
    const auto vals = split_values(values);
    std::vector<SimConfig> cfgs;
    for (const auto& v : vals) {
      SimConfig c = cfg;
      set_config_value(c, section, key, v);
      c.validate();
      cfgs.push_back(c);
    }
    int code = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const std::string dir = (std::filesystem::path(out_dir) / (key + "_" + vals[i])).string();
      const RunResult r = run_to_directory(cfgs[i], dir, snapshot_every);
      report_run(out, dir, r);
      if (r.trajectory.halted) code = 1;
    }
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace thermvisc
