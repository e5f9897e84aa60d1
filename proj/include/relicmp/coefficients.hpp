#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relicmp/stats.hpp"
#include "relicmp/types.hpp"

namespace relicmp {

enum class CoefKind { alpha, lambda1, lambda2, lambda3, lambda4, lambda5, lambda6 };

const char* coef_kind_name(CoefKind k);
std::optional<CoefKind> parse_coef_kind(const std::string& name);

/// Two-part item split for the split-half coefficient (0-based item indices).
struct Split {
  std::vector<int> part_a;
  std::vector<int> part_b;
};

/// A reliability functional of the covariance matrix: coefficient alpha or
/// one of the six lambda coefficients. value() evaluates the functional,
/// gradient() its exact derivative with respect to the half-vectorized
/// covariance (vecs order). Off-diagonal gradient entries are derivatives
/// with respect to the symmetric pair (sigma_ij, sigma_ji) moved together,
/// so they pair directly with lower-triangle stackings of outer products.
struct Coefficient {
  CoefKind kind = CoefKind::alpha;
  std::optional<Split> split;                           // lambda3
  std::optional<std::vector<double>> error_variances;   // lambda6
  bool derive_error_variances = false;                  // lambda6: e_t^2 = 1/(Sigma^-1)_tt

  std::string name() const { return coef_kind_name(kind); }

  double value(const CovarianceSummary& cov) const;

  /// max_tied, when given, reports whether the max defining Cbar2 is attained
  /// by more than one item (lambda4/lambda5 are not differentiable there; the
  /// gradient is evaluated at the first attaining index).
  std::vector<double> gradient(const CovarianceSummary& cov, bool* max_tied = nullptr) const;
};

/// The delta vector for coefficient alpha, in vecs order.
std::vector<double> alpha_delta(const CovarianceSummary& cov);

}  // namespace relicmp
