#include <doctest.h>

#include <cmath>
#include <vector>

#include "relicmp/rng.hpp"

using namespace relicmp;

TEST_CASE("streams are pure functions of (seed, index)") {
  RngStream a(42, 17), b(42, 17), c(42, 18), d(43, 17);
  bool all_equal = true, some_diff_c = false, some_diff_d = false;
  for (int i = 0; i < 256; ++i) {
    const std::uint64_t va = a.next_u64();
    if (va != b.next_u64()) all_equal = false;
    if (va != c.next_u64()) some_diff_c = true;
    if (va != d.next_u64()) some_diff_d = true;
  }
  CHECK(all_equal);
  CHECK(some_diff_c);
  CHECK(some_diff_d);
}

TEST_CASE("unit draws live in [0,1) and are roughly uniform") {
  RngStream rng(1, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("bounded draws are unbiased across small ranges") {
  RngStream rng(5, 1);
  std::vector<int> counts(5, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[rng.next_below(5)];
  for (int c : counts) CHECK(std::abs(c / static_cast<double>(n) - 0.2) < 0.01);
}

TEST_CASE("normal deviates pass moment sanity checks") {
  RngStream rng(99, 0);
  const int n = 100000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_normal();
    m1 += x;
    m2 += x * x;
    m3 += x * x * x;
    m4 += x * x * x * x;
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double var = m2 - m1 * m1;
  const double skew = (m3 - 3 * m1 * var - m1 * m1 * m1) / std::pow(var, 1.5);
  const double kurt = m4 / (var * var);
  CHECK(std::abs(m1) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
  CHECK(std::abs(skew) < 0.1);
  CHECK(std::abs(kurt - 3.0) < 0.2);
}

TEST_CASE("derive separates nearby keys") {
  CHECK(RngStream::derive(0, 0) != RngStream::derive(0, 1));
  CHECK(RngStream::derive(0, 0) != RngStream::derive(1, 0));
  CHECK(RngStream::derive(7, 3) == RngStream::derive(7, 3));
}
