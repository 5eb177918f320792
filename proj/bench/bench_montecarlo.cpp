// Serial reference vs OpenMP Monte Carlo: wall time and result equality.
// usage: bench_montecarlo [config] [trials] [threads]

#include "rotorsim/montecarlo.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifndef ROTORSIM_CONFIG_DIR
#define ROTORSIM_CONFIG_DIR "configs"
#endif

using namespace rotorsim;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : std::string(ROTORSIM_CONFIG_DIR) + "/wind_study.json";
  MonteCarloSpec spec = load_montecarlo(path);
  spec.trials = argc > 2 ? std::atoi(argv[2]) : 8;
  spec.base.duration = std::min(spec.base.duration, 15.0);
  const int threads = argc > 3 ? std::atoi(argv[3]) : omp_get_max_threads();

  auto time = [](auto&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    return std::make_pair(std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };
  const auto [serial, ts] = time([&] { return run_montecarlo_serial(spec); });
  const auto [parallel, tp] = time([&] { return run_montecarlo_parallel(spec, threads); });

  std::printf("%d trials of %.0f s, %d threads (%d cores)\n", spec.trials, spec.base.duration, threads,
              omp_get_num_procs());
  std::printf("serial   %8.2f s\nparallel %8.2f s  speedup %.2fx\n", ts, tp, ts / tp);
  const bool same = serial == parallel;
  std::printf("results %s\n", same ? "identical" : "DIFFER");
  return same ? 0 : 1;
}
