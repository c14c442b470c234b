#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "raysplit/errors.hpp"
#include "raysplit/runner.hpp"
#include "raysplit/scenario.hpp"
#include "raysplit/svg.hpp"

using namespace raysplit;

namespace {

std::string fixture(const std::string& name) {
  return std::string(RAYSPLIT_FIXTURE_DIR) + "/" + name;
}

const std::vector<std::string> kFixtures = {
    "concentric.cfg", "offset_disk.cfg", "chamber.cfg", "circle_arc.cfg",
    "ellipse_lab.cfg"};

std::filesystem::path fresh_dir(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "raysplit_runner" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(f), "missing artifact: " << path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = hay.find(needle); at != std::string::npos;
       at = hay.find(needle, at + needle.size())) {
    ++n;
  }
  return n;
}

long line_count(const std::string& text) {
  return static_cast<long>(count(text, "\n"));
}

/// Value of the first `key: value` report line, empty when absent.
std::string report_value(const std::string& report, const std::string& key) {
  const std::string tag = key + ": ";
  std::size_t at = report.rfind(tag, 0) == 0 ? 0 : report.find("\n" + tag);
  if (at == std::string::npos) return {};
  at = report.find(tag, at) + tag.size();
  return report.substr(at, report.find('\n', at) - at);
}

RunConfig config_for(const std::filesystem::path& dir) {
  RunConfig cfg;
  cfg.out_dir = dir.string();
  cfg.quiet = true;
  return cfg;
}

int run_fixture(const std::string& file, const std::string& sub,
                const std::filesystem::path& dir) {
  return run_subcommand(sub, load_scenario(fixture(file)), config_for(dir));
}

}  // namespace

TEST_CASE("fixture scenarios load and round-trip through print") {
  for (const std::string& name : kFixtures) {
    CAPTURE(name);
    const Scenario sc = load_scenario(fixture(name));
    const std::string once = print_scenario(sc);
    const Scenario back = parse_scenario(once);
    CHECK(print_scenario(back) == once);
    CHECK(sc.outer.perimeter() > 0.0);
  }
}

TEST_CASE("svg scenes render valid deterministic documents") {
  const Scenario sc = load_scenario(fixture("concentric.cfg"));

  SvgScene svg;
  CHECK(svg.element_count() == 0);
  const std::string empty = svg.render();
  CHECK(count(empty, "<svg") == 1);
  CHECK(count(empty, "</svg>") == 1);

  svg.add_curve(sc.outer);
  svg.add_curve(*sc.inner);
  svg.add_arc(sc.outer, BoundaryArc::between(0.1, 0.4));
  svg.add_arc(sc.outer, BoundaryArc::empty_arc());  // draws nothing
  svg.add_loop({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}});
  svg.add_polyline({{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.0}});
  svg.add_point({0.0, 1.5});
  svg.add_point({0.0, -1.5});
  CHECK(svg.element_count() == 7);

  const std::string doc = svg.render(640, 480);
  CHECK(doc == svg.render(640, 480));  // same bytes on every render
  CHECK(count(doc, "<path ") == 5);    // curves, arc, loop, polyline
  CHECK(count(doc, "<circle ") == 2);  // the two dots
  CHECK(count(doc, "\" fill=\"none\"") == 5);

  // The four-vertex loop closes with Z after exactly three line commands;
  // it is the last closed path (the sampled boundary outlines close too).
  const std::size_t loop_at = doc.rfind(" Z\" ");
  REQUIRE(loop_at != std::string::npos);
  const std::size_t loop_start = doc.rfind("<path ", loop_at);
  const std::string loop = doc.substr(loop_start, loop_at - loop_start);
  CHECK(count(loop, " L") == 3);

  // World y points up: the higher point lands at a smaller canvas y.
  const std::size_t c1 = doc.find("cy=\"", doc.find("<circle "));
  const std::size_t c2 = doc.find("cy=\"", c1 + 1);
  REQUIRE(c2 != std::string::npos);
  CHECK(std::atof(doc.c_str() + c1 + 4) < std::atof(doc.c_str() + c2 + 4));
}

TEST_CASE("environment variables override the scenario caps") {
  Scenario sc = load_scenario(fixture("concentric.cfg"));
  setenv("RAYSPLIT_DEPTH", "3", 1);
  setenv("RAYSPLIT_MAX_EVENTS", "777", 1);
  setenv("RAYSPLIT_MAX_ITER", "9", 1);
  apply_env_overrides(sc);
  unsetenv("RAYSPLIT_DEPTH");
  unsetenv("RAYSPLIT_MAX_EVENTS");
  unsetenv("RAYSPLIT_MAX_ITER");
  CHECK(sc.caps.depth_cap == 3);
  CHECK(sc.caps.max_events == 777);
  CHECK(sc.caps.max_iter == 9);

  setenv("RAYSPLIT_DEPTH", "zero", 1);
  CHECK_THROWS_AS(apply_env_overrides(sc), ScenarioError);
  unsetenv("RAYSPLIT_DEPTH");
}

TEST_CASE("trace writes the event log and survives tight budgets") {
  const auto dir = fresh_dir("trace");
  setenv("RAYSPLIT_MAX_EVENTS", "500", 1);
  const int code = run_fixture("concentric.cfg", "trace", dir);
  unsetenv("RAYSPLIT_MAX_EVENTS");
  CHECK(code == kExitSuccess);

  const std::string report = slurp(dir / "report.txt");
  CHECK(report_value(report, "verdict") == "traced");
  CHECK(report_value(report, "exit") == "0");
  const long events = std::atol(report_value(report, "events").c_str());
  CHECK(events > 0);
  CHECK(events <= 500);

  const std::string csv = slurp(dir / "events.csv");
  CHECK(line_count(csv) == events + 1);  // header plus one row per event
  CHECK(csv.rfind("time,", 0) == 0);
  CHECK(count(slurp(dir / "tree.svg"), "<svg") == 1);

  // A zero horizon leaves just the root event: a single-row log.
  const auto dir0 = fresh_dir("trace_zero");
  RunConfig cfg = config_for(dir0);
  cfg.horizon = 0.0;
  CHECK(run_subcommand("trace", load_scenario(fixture("concentric.cfg")), cfg) ==
        kExitSuccess);
  CHECK(line_count(slurp(dir0 / "events.csv")) == 2);
}

TEST_CASE("construct reports the fixpoint and draws every iteration") {
  const auto dir = fresh_dir("construct");
  CHECK(run_fixture("offset_disk.cfg", "construct", dir) == kExitSuccess);

  const std::string report = slurp(dir / "report.txt");
  CHECK(report_value(report, "verdict") == "fixpoint");
  const int iters = std::atoi(report_value(report, "iterations").c_str());
  CHECK(iters >= 1);
  CHECK(iters <= 20);
  CHECK(report_value(report, "witness-source").rfind("(", 0) == 0);

  // History rows: entry 0 plus one per iteration.
  const std::string csv = slurp(dir / "construction.csv");
  CHECK(line_count(csv) == iters + 2);

  // Figure structure: both boundaries plus a wall/inclusion arc pair per
  // history entry.
  const std::string figure = slurp(dir / "construction.svg");
  CHECK(count(figure, "<path ") == 2 + 2 * static_cast<std::size_t>(iters + 1));

  // A declared-arc observation cannot seed the point construction.
  CHECK_THROWS_AS(
      run_fixture("chamber.cfg", "construct", fresh_dir("construct_bad")),
      ScenarioError);
}

TEST_CASE("escape and trap verdicts map to the documented exit codes") {
  CHECK(run_fixture("concentric.cfg", "check-ueg", fresh_dir("ueg_pass")) ==
        kExitSuccess);
  const auto ueg_dir = fresh_dir("ueg_fail");
  CHECK(run_fixture("chamber.cfg", "check-ueg", ueg_dir) == kExitWitness);
  const std::string ueg = slurp(ueg_dir / "report.txt");
  CHECK(report_value(ueg, "verdict") == "not-escaping");
  CHECK(std::atol(report_value(ueg, "violations").c_str()) > 0);
  CHECK(line_count(slurp(ueg_dir / "drift.csv")) > 100);

  const auto trap_dir = fresh_dir("trap_hit");
  CHECK(run_fixture("chamber.cfg", "check-trap", trap_dir) == kExitWitness);
  const std::string trap = slurp(trap_dir / "report.txt");
  CHECK(report_value(trap, "verdict") == "trapped-witness");
  CHECK(report_value(trap, "orbit-0").find("tir-retroreflection") !=
        std::string::npos);
  CHECK(line_count(slurp(trap_dir / "trapped.csv")) >= 5);

  // The first trapped cycle is drawn as a closed polygon whose vertex count
  // matches its bounce count (four for the retroreflected bowtie).
  const std::string figure = slurp(trap_dir / "trapped.svg");
  const std::size_t loop_at = figure.rfind(" Z\" ");
  REQUIRE(loop_at != std::string::npos);  // curves close too; orbit is last
  const std::size_t start = figure.rfind("<path ", loop_at);
  CHECK(count(figure.substr(start, loop_at - start), " L") == 3);

  CHECK_THROWS_AS(
      run_fixture("circle_arc.cfg", "check-trap", fresh_dir("trap_bad")),
      ScenarioError);
  CHECK_THROWS_AS(
      run_fixture("circle_arc.cfg", "check-ueg", fresh_dir("ueg_bad")),
      ScenarioError);
}

TEST_CASE("narrow-arc control check fails with the periodic square orbit") {
  const auto dir = fresh_dir("gcc_fail");
  CHECK(run_fixture("circle_arc.cfg", "check-gcc", dir) == kExitWitness);
  const std::string report = slurp(dir / "report.txt");
  CHECK(report_value(report, "verdict") == "escaping-orbit");
  CHECK(report_value(report, "witness-periodic") == "yes");
  const double period =
      std::atof(report_value(report, "witness-period-length").c_str());
  CHECK(period == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-9));
  // The log keeps every bounce marched within the horizon (start plus
  // floor(10 / sqrt(2)) flights), not just one period.
  CHECK(line_count(slurp(dir / "witness.csv")) == 9);
  const std::string csv = slurp(dir / "witness.csv");
  CHECK(csv.find("0,0,1,0\n") != std::string::npos);  // launch point (1, 0)
  CHECK(count(slurp(dir / "witness.svg"), "<path ") == 3);
}

TEST_CASE("observability runs end to end on the fixture matrix") {
  const auto pass_dir = fresh_dir("obs_pass");
  CHECK(run_fixture("concentric.cfg", "check-obs", pass_dir) == kExitSuccess);
  const std::string report = slurp(pass_dir / "report.txt");
  CHECK(report_value(report, "verdict") == "all-observed");
  CHECK(report_value(report, "undetermined") == "0");
  const std::string summary = report_value(report, "summary");
  CHECK(summary.rfind("all ", 0) == 0);
  CHECK(summary.find("samples observed, max time ") != std::string::npos);
  const long samples = std::atol(report_value(report, "samples").c_str());
  CHECK(samples > 0);
  CHECK(line_count(slurp(pass_dir / "samples.csv")) == samples + 1);

  // Identical scenario and seed give byte-identical artifacts.
  const auto again_dir = fresh_dir("obs_pass_again");
  CHECK(run_fixture("concentric.cfg", "check-obs", again_dir) == kExitSuccess);
  CHECK(slurp(again_dir / "samples.csv") == slurp(pass_dir / "samples.csv"));
  CHECK(slurp(again_dir / "report.txt") == slurp(pass_dir / "report.txt"));

  const auto trap_dir = fresh_dir("obs_trapped");
  CHECK(run_fixture("chamber.cfg", "check-obs", trap_dir) == kExitWitness);
  const std::string trapped = slurp(trap_dir / "report.txt");
  CHECK(report_value(trapped, "verdict") == "trapped-witness");
  CHECK(std::atol(report_value(trapped, "trapped-orbits").c_str()) > 0);
  CHECK(report_value(trapped, "exit") == "3");
  CHECK(count(slurp(trap_dir / "observability.svg"), "<path ") >= 4);
}

TEST_CASE("the ellipse lab runs on a bare conic table only") {
  const auto dir = fresh_dir("ellipse");
  CHECK(run_fixture("ellipse_lab.cfg", "ellipse", dir) == kExitSuccess);
  const std::string report = slurp(dir / "report.txt");
  CHECK(report_value(report, "table") == "ellipse");
  CHECK(report_value(report, "caustic-violations") == "0");
  CHECK(report_value(report, "focal-converged") == "yes");
  CHECK(report_value(report, "demo-arc-controlled") == "yes");
  CHECK(report_value(report, "demo-arc-visibility-form") == "none");
  CHECK(report_value(report, "demo-complement-controlled") == "yes");
  CHECK(report_value(report, "complement-visibility-source").rfind("(", 0) == 0);
  CHECK(line_count(slurp(dir / "caustics.csv")) == 9);
  CHECK(line_count(slurp(dir / "focal.csv")) == 202);
  CHECK(count(slurp(dir / "ellipse.svg"), "<svg") == 1);

  CHECK_THROWS_AS(
      run_fixture("concentric.cfg", "ellipse", fresh_dir("ellipse_bad")),
      ScenarioError);
  CHECK_THROWS_AS(run_subcommand("frobnicate",
                                 load_scenario(fixture("concentric.cfg")),
                                 config_for(fresh_dir("unknown_sub"))),
                  ScenarioError);
}
