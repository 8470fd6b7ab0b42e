#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "thermvisc/config.hpp"
#include "thermvisc/errors.hpp"
#include "thermvisc/format.hpp"
#include "thermvisc/run.hpp"
#include "thermvisc/snapshot.hpp"

#ifdef THERMVISC_HAVE_CLI
#include "cli.hpp"
#endif

using namespace thermvisc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thermvisc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int config_error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal config completes with defaults") {
  const SimConfig c = parse_config_text("[grid]\nn=32\n");
  CHECK(c.grid.n == 32);
  CHECK(c.grid.d == 2);
  CHECK(c.grid.L == 1.0);
  CHECK(c.material == "reference");
  CHECK(c.eps.eps1 == 1e-3);
  CHECK(c.eps.eps2 == 1e-5);
  CHECK(c.eps.eps3 == 1e-2);
  CHECK(c.eps.eps5 == 1e-2);
  CHECK(c.eps.lambda == 0.5);
  CHECK(c.dt == 0.0);
  CHECK(c.t_end == 1.0);
  CHECK(c.stepper == Stepper::explicit_rk2);
  CHECK(c.transport == TransportScheme::upwind);
}

TEST_CASE("config parsing: comments, sections and values") {
  const SimConfig c = parse_config_text(
      "# header\n"
      "[grid]\n d = 3 \n n = 16 ; trailing\n L = 2.5\n"
      "[epsilons]\neps4 = 1e-4\neps7_diffusion = true\n"
      "[time]\ndt = 0.001\nstepper = imex\ntwin_B = true\ntransport = centered\n"
      "[initial]\nvelocity = random\nseed = 42\n");
  CHECK(c.grid.d == 3);
  CHECK(c.grid.n == 16);
  CHECK(c.grid.L == 2.5);
  CHECK(c.eps.eps4 == 1e-4);
  CHECK(c.eps.eps7_diffusion);
  CHECK(c.dt == 0.001);
  CHECK(c.stepper == Stepper::imex);
  CHECK(c.twin_B);
  CHECK(c.transport == TransportScheme::centered);
  CHECK(c.initial.velocity == "random");
  CHECK(c.seed == 42);
  CHECK(parse_config_text("[time]\ndt = auto\n").dt == 0.0);
}

TEST_CASE("config errors carry line numbers and name the violated condition") {
  CHECK(config_error_line("[grid]\nn = 32\nm = 3\n") == 3);
  CHECK(config_error_line("[grid]\nn = 32\nn = 16\n") == 3);
  CHECK(config_error_line("n = 32\n") == 1);
  CHECK(config_error_line("[grids]\n") == 1);
  CHECK(config_error_line("[grid\n") == 1);
  CHECK(config_error_line("[grid]\nn 32\n") == 2);
  CHECK(config_error_line("\n\n[time]\nstepper = leapfrog\n") == 4);
  CHECK(config_error_line("[grid]\nn = 3.5\n") == 2);
  CHECK(config_error_line("[epsilons]\neps1 = nan\n") == 2);
  try {
    parse_config_text("[epsilons]\neps2 = 1e-2\neps5 = 1e-2\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("eps2 < eps5^2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("[grid]\nn = 10\nd = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/thermvisc.ini"), ConfigError);
}

TEST_CASE("config echo round-trips") {
  SimConfig c;
  c.grid = GridSpec{3, 24, 0.75};
  c.eps.eps3 = 0.1 / 3.0;
  c.dt = 1e-4;
  c.initial.theta = "cold_spot";
  c.seed = 77;
  c.twin_B = true;
  const std::string text = to_ini(c);
  const SimConfig back = parse_config_text(text);
  CHECK(to_ini(back) == text);
  CHECK(back.eps.eps3 == c.eps.eps3);
  SimConfig d;
  set_config_value(d, "epsilons", "eps5", "1e-3");
  CHECK(d.eps.eps5 == 1e-3);
  CHECK_THROWS_AS(set_config_value(d, "epsilons", "eps9", "1"), ConfigError);
}

TEST_CASE("shortest round-trip formatting") {
  std::mt19937_64 r(6);
  for (int k = 0; k < 2000; ++k) {
    const double x = std::ldexp(std::uniform_real_distribution<double>(-1, 1)(r), static_cast<int>(r() % 200) - 100);
    const std::string s = format_double(x);
    double y = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), y);
    CHECK(y == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.0) == "-0");
  CHECK(format_double(1e300) == "1e+300");
}

TEST_CASE("atomic write replaces the file and leaves no temporary") {
  const fs::path dir = scratch("atomic");
  const fs::path f = dir / "a.txt";
  write_file_atomic(f.string(), "one");
  write_file_atomic(f.string(), "two");
  CHECK(slurp(f) == "two");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("snapshot round trip is bit exact") {
  const Grid<2> g(8, 1.5);
  State<2> s = State<2>::zeros(g, true);
  std::mt19937_64 r(8);
  for (Field* f : {&s.v, &s.F, &s.e, &s.theta, &s.B})
    for (auto& x : f->raw()) x = std::uniform_real_distribution<double>(-1, 1)(r);
  s.t = 0.125;
  const fs::path p = scratch("snap") / "s.bin";
  write_snapshot(p.string(), s, g, 17);
  const Snapshot snap = read_snapshot(p.string());
  CHECK(snap.d == 2);
  CHECK(snap.n == 8);
  CHECK(snap.L == 1.5);
  CHECK(snap.t == 0.125);
  CHECK(snap.step == 17);
  CHECK(snap.names.size() == 2 + 4 + 1 + 1 + 4);
  CHECK(snap.field("v1") == std::vector<double>(s.v.comp(1), s.v.comp(1) + g.npts()));
  CHECK(snap.field("F10") == std::vector<double>(s.F.comp(2), s.F.comp(2) + g.npts()));
  CHECK(snap.field("theta") == std::vector<double>(s.theta.comp(0), s.theta.comp(0) + g.npts()));
  CHECK(snap.field("B11") == std::vector<double>(s.B.comp(3), s.B.comp(3) + g.npts()));
  CHECK_THROWS_AS(snap.field("q"), InvalidInput);

  // Header offsets are independent of the header length.
  const std::string raw = slurp(p);
  const auto nl = raw.find('\n');
  const auto h = nlohmann::json::parse(raw.substr(0, nl));
  CHECK(h["format"] == "thermvisc-snapshot");
  CHECK(h["byte_order"] == "little");
  CHECK(raw.size() - nl - 1 == 12 * g.npts() * sizeof(double));
  const std::size_t off = h["fields"][7]["offset"];
  double x;
  std::memcpy(&x, raw.data() + nl + 1 + off, sizeof(double));
  CHECK(x == s.theta.at(0, 0));

  std::ofstream(p, std::ios::binary) << "{\"format\":\"other\"}\n";
  CHECK_THROWS_AS(read_snapshot(p.string()), InvalidInput);
}

TEST_CASE("run directory contents and determinism") {
  SimConfig c = parse_config_text(
      "[grid]\nn = 16\n[time]\nt_end = 0.002\n[initial]\nvelocity = random\ntheta = bump\ndeformation = random\n"
      "deformation_scale = 0.1\nseed = 3\n[output]\nsnapshot_every = 5\n");
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const RunResult ra = run_to_directory(c, a.string());
  const RunResult rb = run_to_directory(c, b.string());
  CHECK_FALSE(ra.trajectory.halted);
  CHECK(fs::exists(a / "config.ini"));
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(fs::exists(a / "diagnostics.csv"));
  CHECK(fs::exists(a / "snapshots" / "snap_00000000.bin"));
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
  CHECK(slurp(a / "config.ini") == to_ini(c));
  const auto man = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(man["halt_reason"] == "completed");
  CHECK(man["version"] == version());
  CHECK(man["outputs"].size() == ra.manifest.outputs.size());
  for (const auto& o : man["outputs"]) CHECK(fs::exists(a / o.get<std::string>()));
  const std::string csv = slurp(a / "diagnostics.csv");
  CHECK(csv.rfind(csv_header() + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(ra.trajectory.records.size()) + 1);

  // Snapshots disabled: no snapshot directory.
  const fs::path n = scratch("run_nosnap");
  run_to_directory(c, n.string(), 0);
  CHECK_FALSE(fs::exists(n / "snapshots"));
}

TEST_CASE("halted runs still write a manifest and a halt snapshot") {
  // Velocities near the overflow threshold make the convective flux non-finite
  // on the first step.
  SimConfig c = parse_config_text("[grid]\nn = 8\n[time]\nt_end = 0.01\n");
  c.initial.velocity = "taylor_green";
  c.initial.velocity_amplitude = 1e200;
  const fs::path d = scratch("run_halt");
  const RunResult r = run_to_directory(c, d.string());
  CHECK(r.trajectory.halted);
  CHECK(fs::exists(d / "manifest.json"));
  const auto man = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(man["halt_reason"].get<std::string>() != "completed");
  CHECK(fs::exists(d / "snapshots" / "halt.bin"));
}

#ifdef THERMVISC_HAVE_CLI
namespace {
int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "thermvisc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}
}  // namespace

TEST_CASE("command line exit codes") {
  CHECK(cli({}) == 2);
  CHECK(cli({"frobnicate"}) == 2);
  CHECK(cli({"run", "--config"}) == 2);
  CHECK(cli({"check", "--suite", "bogus"}) == 2);
  std::string text;
  CHECK(cli({"check", "--suite", "algebra"}, &text) == 0);
  CHECK(text.find("all checks passed") != std::string::npos);
  CHECK(cli({"--help"}) == 0);

  const fs::path dir = scratch("cli");
  std::ofstream(dir / "bad.ini") << "[grid]\nwidth = 3\n";
  CHECK(cli({"run", "--config", (dir / "bad.ini").string(), "--out", (dir / "o").string()}, &text) == 2);
  CHECK(text.find("line 2") != std::string::npos);

  std::ofstream(dir / "eq.ini") << "[grid]\nn = 8\n[epsilons]\neps2 = 1e-7\n[time]\nt_end = 0.001\n";
  CHECK(cli({"run", "--config", (dir / "eq.ini").string(), "--out", (dir / "eq").string()}) == 0);
  const std::string csv = slurp(dir / "eq" / "diagnostics.csv");
  // Flat residual column on the rest state.
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    CHECK(cols[13] == "0");
  }

  CHECK(cli({"sweep", "--config", (dir / "eq.ini").string(), "--param", "eps5", "--values", "1e-2,1e-3", "--out",
             (dir / "sw").string()}) == 0);
  CHECK(fs::exists(dir / "sw" / "eps5_1e-2" / "diagnostics.csv"));
  CHECK(fs::exists(dir / "sw" / "eps5_1e-3" / "diagnostics.csv"));
  CHECK(cli({"sweep", "--config", (dir / "eq.ini").string(), "--param", "eps5", "--values", "1e-4", "--out",
             (dir / "sw2").string()}) == 2);
  CHECK(cli({"oracle", "--config", (dir / "eq.ini").string()}) == 0);
}
#endif
