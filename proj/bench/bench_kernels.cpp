// Benchmark for the two parallel kernels against their serial reference
// implementations: the Monte Carlo trace loop (estimate vs estimate_serial)
// and the SAND convolution (convolve_cdfs vs convolve_cdfs_serial).  Results
// must agree exactly; any divergence is a bug and exits nonzero.  Pass
// --quick for a fast smoke run.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "atsmc/engine.hpp"
#include "atsmc/models.hpp"
#include "atsmc/oracle.hpp"
#include "atsmc/translate.hpp"

using namespace atsmc;

namespace {

template <typename Fn>
double best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto start = std::chrono::steady_clock::now();
    fn();
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                   .count();
    if (s < best) best = s;
  }
  return best;
}

SmcQuery root_query(const NSTA& nsta, double bound) {
  return parse_query("Pr[x<=" + std::to_string(bound) + "](<> " +
                         nsta.automata[0].id + ".Disrupt)",
                     nsta);
}

CdfGrid ramp_grid(std::size_t points, double step, double lambda) {
  CdfGrid g;
  g.step = step;
  g.values.resize(points);
  for (std::size_t k = 0; k < points; ++k)
    g.values[k] = 1.0 - std::exp(-lambda * static_cast<double>(k) * step);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

  int mismatches = 0;

  {
    NSTA nsta = translate_tree(shipped_security_model());
    SmcQuery query = root_query(nsta, 180.0);
    SmcSettings settings;
    settings.epsilon = quick ? 0.05 : 0.01;
    const int reps = quick ? 2 : 3;

    std::string reference = estimate_json(estimate_serial(nsta, query, settings));
    double serial_s =
        best_of(reps, [&] { estimate_serial(nsta, query, settings); });
    std::printf("smc %lld runs, 20 automata\n",
                static_cast<long long>(required_runs(settings.epsilon, settings.alpha)));
    std::printf("  serial          %8.3f s\n", serial_s);

    for (int workers : {1, 2, 4}) {
      SmcSettings w = settings;
      w.workers = workers;
      if (estimate_json(estimate(nsta, query, w)) != reference) {
        std::printf("  parallel workers=%d DISAGREES with serial\n", workers);
        ++mismatches;
        continue;
      }
      double s = best_of(reps, [&] { estimate(nsta, query, w); });
      std::printf("  parallel x%d     %8.3f s   speedup %.2f\n", workers, s,
                  serial_s / s);
    }
  }

  {
    const std::size_t points = quick ? 2001 : 20001;
    CdfGrid a = ramp_grid(points, 0.1, 0.010);
    CdfGrid b = ramp_grid(points, 0.1, 0.007);
    const int reps = quick ? 3 : 5;

    CdfGrid reference = convolve_cdfs_serial(a, b);
    double serial_s = best_of(reps, [&] { convolve_cdfs_serial(a, b); });
    std::printf("convolution %zu points\n", points);
    std::printf("  serial          %8.3f s\n", serial_s);

    if (convolve_cdfs(a, b).values != reference.values) {
      std::printf("  parallel DISAGREES with serial\n");
      ++mismatches;
    } else {
      double s = best_of(reps, [&] { convolve_cdfs(a, b); });
      std::printf("  parallel        %8.3f s   speedup %.2f\n", s, serial_s / s);
    }
  }

  if (mismatches) {
    std::printf("%d kernel(s) disagree\n", mismatches);
    return 1;
  }
  return 0;
}
