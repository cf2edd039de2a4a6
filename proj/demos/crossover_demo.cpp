// Builds a few photon-added squeezed states, prints their mean photon numbers
// and x-quadrature W1 distances from the squeezed vacuum, and locates the
// 1-vs-2 crossover from exact tomograms and from sampled homodyne data.

#include <cstdio>
#include <numbers>

#include "tomowass/tomowass.hpp"

namespace tw = tomowass;

int main() {
  const double r = 1.0 / std::numbers::sqrt2;
  tw::StateSpec reference;
  reference.squeeze = tw::SqueezeParams(r);

  std::printf("r = %.4f\n  m   <n>       W1(svs, |xi,m>)\n", r);
  for (int m = 1; m <= 3; ++m) {
    tw::StateSpec added = reference;
    added.photon_delta = m;
    std::printf("  %d   %-8.4f  %.6f\n", m, tw::mean_photon_number(tw::build_state(added)),
                tw::w1_states(reference, added, 0.0));
  }

  tw::StateSpec one = reference;
  one.photon_delta = 1;
  tw::StateSpec two = reference;
  two.photon_delta = 2;
  const auto exact = tw::find_state_crossover(reference, one, two, tw::SweepParameter::R, 0.0, 0.3, 0.6);
  std::printf("exact crossover:   r* = %.5f\n", exact.location);

  tw::EmpiricalCrossoverOptions opts;
  opts.shots = 100'000;
  opts.seed = 7;
  const auto sampled =
      tw::empirical_crossover(reference, one, two, tw::SweepParameter::R, 0.0, 0.3, 0.6, opts);
  std::printf("sampled crossover: r* = %.5f (%zu shots per record, tolerance %.4f)\n",
              sampled.location, opts.shots, tw::empirical_crossover_tolerance(opts.shots));
  return 0;
}
