#pragma once

#include <cmath>
#include <vector>

#include "coupled_levy/measures.hpp"
#include "coupled_levy/rng.hpp"

namespace testing_support {

using namespace coupled_levy;

inline Distribution1D uniform01() { return Distribution1D::from_family(Uniform{0.0, 1.0}); }
inline Distribution1D laplace01() { return Distribution1D::from_family(Laplace{0.0, 1.0}); }
inline Distribution1D exponential1() { return Distribution1D::from_family(Exponential{1.0, 0.0}); }

inline std::vector<double> draw(const Distribution1D& d, std::size_t n, std::uint64_t seed) {
  UniformStream u(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = sample(d, u.next());
  return out;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace testing_support
