#pragma once

namespace relicmp {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);

/// Standard normal quantile (inverse CDF), p in (0,1).
double normal_quantile(double p);

/// Chi-square upper tail P(X > x) with df degrees of freedom.
/// df == 1 routes through erfc so it agrees with the normal tail identically.
double chisq_sf(double x, int df);

}  // namespace relicmp
