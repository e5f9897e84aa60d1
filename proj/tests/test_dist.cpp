#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "relicmp/dist.hpp"

using namespace relicmp;

TEST_CASE("normal cdf and quantile") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_sf(1.644853626951473) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  for (double p : {1e-8, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
}

namespace {

// quadrature oracle for the chi-square upper tail
double chisq_sf_quadrature(double x, int df) {
  const double a = 0.5 * df;
  auto density = [&](double t) {
    return std::exp((a - 1.0) * std::log(t) - 0.5 * t - std::lgamma(a) - a * std::log(2.0));
  };
  const double hi = x + 60.0 + 10.0 * df;
  const int steps = 200000;
  const double h = (hi - x) / steps;
  double acc = 0.5 * (density(x) + density(hi));
  for (int i = 1; i < steps; ++i) acc += density(x + h * i);
  return acc * h;
}

}  // namespace

TEST_CASE("chi-square tail against quadrature") {
  for (int df : {1, 2, 3, 5, 10}) {
    for (double x : {0.5, 2.0, 3.841458820694124, 11.07, 25.0}) {
      CHECK(chisq_sf(x, df) ==
            doctest::Approx(chisq_sf_quadrature(x, df)).epsilon(1e-6));
    }
  }
  CHECK(chisq_sf(0.0, 3) == 1.0);
}

TEST_CASE("df=1 tail equals the two-sided normal tail identically") {
  for (double t : {0.1, 0.5, 1.0, 1.96, 3.2, 6.0}) {
    const double via_chisq = chisq_sf(t * t, 1);
    const double via_normal = 2.0 * normal_sf(t);
    CHECK(std::abs(via_chisq - via_normal) < 1e-15);
  }
}
