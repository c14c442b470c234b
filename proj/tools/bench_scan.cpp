// Benchmark: the sampled observability scan with the parallel sample loop
// against the serial reference loop, verifying both produce identical
// verdicts. On a single-core host the speedup hovers around 1x; the point is
// the comparison harness and the output equality check.

#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "raysplit/errors.hpp"
#include "raysplit/observe.hpp"
#include "raysplit/parallel.hpp"
#include "raysplit/regions.hpp"
#include "raysplit/runner.hpp"
#include "raysplit/scenario.hpp"

namespace {

constexpr const char* kDefaultScenario = R"(
[outer]
kind = circle
center = (0, 0)
radius = 2
[inner]
kind = circle
center = (0, 0)
radius = 1
[speeds]
c1 = 1
c2 = sqrt(2)
[observation]
mode = point
x0 = (3, 0)
[sampling]
glide_spacing = 0.2
)";

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compare the parallel observability scan with the serial one"};
  std::string scenario_file;
  int n_s = 48;
  int n_theta = 16;
  double horizon = 25.0;
  app.add_option("--scenario", scenario_file,
                 "scenario file (default: concentric annulus)");
  app.add_option("--ns", n_s, "wall/interface parameter samples");
  app.add_option("--ntheta", n_theta, "angle samples");
  app.add_option("--horizon", horizon, "time horizon");
  CLI11_PARSE(app, argc, argv);

  try {
    raysplit::Scenario sc = scenario_file.empty()
                                ? raysplit::parse_scenario(kDefaultScenario)
                                : raysplit::load_scenario(scenario_file);
    const raysplit::BoundaryArc gamma = raysplit::resolve_wall_gamma(sc);

    std::printf("samples grid: %dx%d, horizon %.3g, %d worker(s)\n", n_s,
                n_theta, horizon, raysplit::worker_count());

    auto t0 = std::chrono::steady_clock::now();
    const raysplit::ObservabilityReport serial = raysplit::check_observability(
        sc, gamma, horizon, n_s, n_theta, sc.caps.depth_cap, {},
        /*serial=*/true);
    const double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const raysplit::ObservabilityReport parallel = raysplit::check_observability(
        sc, gamma, horizon, n_s, n_theta, sc.caps.depth_cap, {},
        /*serial=*/false);
    const double t_parallel = seconds_since(t0);

    bool identical = serial.samples.size() == parallel.samples.size() &&
                     serial.observed == parallel.observed &&
                     serial.undetermined == parallel.undetermined &&
                     serial.max_time == parallel.max_time;
    for (std::size_t i = 0; identical && i < serial.samples.size(); ++i) {
      identical = serial.samples[i].verdict == parallel.samples[i].verdict &&
                  serial.samples[i].time == parallel.samples[i].time;
    }

    std::printf("serial reference: %8.3f s  (%ld observed / %zu samples)\n",
                t_serial, serial.observed, serial.samples.size());
    std::printf("parallel loop:    %8.3f s  (%ld observed / %zu samples)\n",
                t_parallel, parallel.observed, parallel.samples.size());
    std::printf("speedup: %.2fx\n", t_parallel > 0 ? t_serial / t_parallel : 0.0);
    std::printf("identical output: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
  } catch (const raysplit::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
