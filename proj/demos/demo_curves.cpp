// Walks through the geometric side of the library: closed curves on S^3,
// their arc lengths and moments, and the frame potential of sampled
// unitary paths in growing dimension.

#include <cmath>
#include <cstdio>

#include "udesign/design.hpp"
#include "udesign/sphere.hpp"
#include "udesign/upath.hpp"

using namespace udesign;

int main() {
  std::printf("arc lengths of the three basic curves\n");
  struct {
    const char* name;
    curve_kind kind;
    double expected;
  } rows[] = {
      {"xi", curve_kind::xi, std::sqrt(10.0) * M_PI},
      {"gamma", curve_kind::gamma, 2.0 * std::sqrt(5.0) * M_PI},
      {"gamma-tilde", curve_kind::gamma_tilde, std::sqrt(5.0) * M_PI},
  };
  for (const auto& row : rows) {
    double len = arc_length(curve_spec(row.kind));
    std::printf("  %-12s %.12f  (closed form %.12f)\n", row.name, len,
                row.expected);
  }

  std::printf("\nsecond moment of xi at 128 samples (want I/4)\n");
  moment_result mom = curve_moments(curve_spec(curve_kind::xi), 128);
  for (int r = 0; r < 4; ++r) {
    std::printf("  ");
    for (int c = 0; c < 4; ++c) std::printf("% .6f ", mom.m2(r, c));
    std::printf("\n");
  }

  std::printf("\nframe potential of sampled paths (1 = exact 1-design)\n");
  unitary_path loop = two_axis_path(axis3(0, 0, 1), axis3(0, 1, 0));
  for (int n : {3, 4, 8}) {
    std::printf("  two-axis  d=2  n=%-3d F=%.12f\n", n,
                frame_potential(sample_path(loop, n), 1));
  }
  unitary_path bundle = fiber_path(3);
  for (int n : {24, 25, 50}) {
    std::printf("  fiber     d=3  n=%-3d F=%.12f\n", n,
                frame_potential(sample_path(bundle, n), 1));
  }
  unitary_path ladder = hw_path(4);
  std::printf("  shift/clock d=4 n=16  F=%.12f\n",
              frame_potential(sample_path(ladder, 16), 1));
  return 0;
}
