// Times the OpenMP replication kernels against their serial reference and
// checks that both paths produce identical results.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "conclab/harness.hpp"
#include "conclab/parallel.hpp"
#include "conclab/processes.hpp"
#include "conclab/product_space.hpp"

using namespace conclab;

namespace {

template <typename F>
double time_seconds(F&& work) {
  const auto t0 = std::chrono::steady_clock::now();
  work();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   results %s\n", name,
              serial, parallel, serial / parallel, identical ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  int threads = omp_get_max_threads();
  if (argc > 1) threads = std::max(1, std::atoi(argv[1]));
  std::printf("comparing serial reference vs OpenMP kernels (%d threads)\n\n", threads);

  {
    SpaceGenOptions opts;
    SuiteReport serial_report, parallel_report;
    const double ts = time_seconds(
        [&] { serial_report = run_product_space_suite(99, 400, opts, 1); });
    const double tp = time_seconds(
        [&] { parallel_report = run_product_space_suite(99, 400, opts, threads); });
    report("product-space suite (400)", ts, tp,
           serial_report.checks == parallel_report.checks &&
               serial_report.violations == parallel_report.violations);
  }

  {
    const std::vector<PatternGraph> patterns{PatternGraph::named("K3")};
    const std::vector<int> grid{48, 96, 192};
    ReverseReport serial_report, parallel_report;
    const double ts = time_seconds(
        [&] { serial_report = reverse_process_experiment(patterns, grid, 200, 7, {1}); });
    const double tp = time_seconds([&] {
      parallel_report = reverse_process_experiment(patterns, grid, 200, 7, {threads});
    });
    report("reverse process (3 sizes)", ts, tp, to_json(serial_report) == to_json(parallel_report));
  }

  {
    auto h = PatternGraph::named("K3");
    LipschitzReport serial_report, parallel_report;
    const double ts =
        time_seconds([&] { serial_report = lipschitz_sweep(h, 48, 1128, 200, 3, {1}); });
    const double tp = time_seconds(
        [&] { parallel_report = lipschitz_sweep(h, 48, 1128, 200, 3, {threads}); });
    report("lipschitz sweep (200)", ts, tp,
           to_json(serial_report) == to_json(parallel_report));
  }

  return 0;
}
