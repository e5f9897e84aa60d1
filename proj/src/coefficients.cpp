#include "relicmp/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "relicmp/linalg.hpp"

namespace relicmp {

const char* coef_kind_name(CoefKind k) {
  switch (k) {
    case CoefKind::alpha: return "alpha";
    case CoefKind::lambda1: return "lambda1";
    case CoefKind::lambda2: return "lambda2";
    case CoefKind::lambda3: return "lambda3";
    case CoefKind::lambda4: return "lambda4";
    case CoefKind::lambda5: return "lambda5";
    case CoefKind::lambda6: return "lambda6";
  }
  return "?";
}

std::optional<CoefKind> parse_coef_kind(const std::string& name) {
  for (CoefKind k : {CoefKind::alpha, CoefKind::lambda1, CoefKind::lambda2, CoefKind::lambda3,
                     CoefKind::lambda4, CoefKind::lambda5, CoefKind::lambda6})
    if (name == coef_kind_name(k)) return k;
  return std::nullopt;
}

namespace {

// sum of squared off-diagonal entries
double offdiag_sumsq(const Matrix& s) {
  double c2 = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (i != j) c2 += s(i, j) * s(i, j);
  return c2;
}

// C_{2t} = sum_{j != t} sigma_tj^2 for every item, plus argmax and tie flag
struct MaxRowSumsq {
  double value = 0.0;
  std::size_t argmax = 0;
  bool tied = false;
};

MaxRowSumsq max_row_sumsq(const Matrix& s) {
  const std::size_t k = s.rows();
  std::vector<double> c2t(k, 0.0);
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t j = 0; j < k; ++j)
      if (j != t) c2t[t] += s(t, j) * s(t, j);
  MaxRowSumsq out;
  for (std::size_t t = 1; t < k; ++t)
    if (c2t[t] > c2t[out.argmax]) out.argmax = t;
  out.value = c2t[out.argmax];
  for (std::size_t t = 0; t < k; ++t)
    if (t != out.argmax && std::abs(c2t[t] - out.value) <= 1e-12 * std::max(out.value, 1.0))
      out.tied = true;
  return out;
}

void validate_split(const Split& split, std::size_t k) {
  if (split.part_a.empty() || split.part_b.empty())
    fail(Errc::missing_split, "split-half coefficient needs two nonempty parts");
  std::vector<int> seen(k, 0);
  for (int idx : split.part_a) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= k)
      fail(Errc::invalid_request, "split index out of range");
    ++seen[idx];
  }
  for (int idx : split.part_b) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= k)
      fail(Errc::invalid_request, "split index out of range");
    ++seen[idx];
  }
  for (std::size_t i = 0; i < k; ++i)
    if (seen[i] != 1) fail(Errc::invalid_request, "split must partition the items");
}

// total of the diagonal block selected by `part`
double block_total(const Matrix& s, const std::vector<int>& part) {
  double t = 0.0;
  for (int i : part)
    for (int j : part) t += s(i, j);
  return t;
}

std::vector<double> resolve_error_variances(const Coefficient& c, const CovarianceSummary& cov) {
  if (c.error_variances) {
    if (c.error_variances->size() != cov.k())
      fail(Errc::invalid_request, "error variances must have one entry per item");
    for (double e : *c.error_variances)
      if (!(e >= 0.0)) fail(Errc::invalid_request, "error variances must be nonnegative");
    return *c.error_variances;
  }
  if (c.derive_error_variances) {
    // e_t^2 = 1/(Sigma^-1)_tt, the squared-multiple-correlation convention
    std::vector<double> inv_diag = inverse_diagonal(cov.matrix);
    std::vector<double> e(cov.k());
    for (std::size_t t = 0; t < e.size(); ++t) e[t] = 1.0 / inv_diag[t];
    return e;
  }
  fail(Errc::missing_error_variances,
       "lambda6 needs error variances (supply them or enable derivation)");
}

}  // namespace

double Coefficient::value(const CovarianceSummary& cov) const {
  if (cov.zero_total()) fail(Errc::zero_total_variance, "coefficient undefined: 1'Sigma 1 is zero");
  const double k = static_cast<double>(cov.k());
  const double trace = cov.trace, total = cov.total;
  switch (kind) {
    case CoefKind::alpha:
      return k / (k - 1.0) * (1.0 - trace / total);
    case CoefKind::lambda1:
      return 1.0 - trace / total;
    case CoefKind::lambda2: {
      const double c2 = offdiag_sumsq(cov.matrix);
      return (total - trace + std::sqrt(k / (k - 1.0) * c2)) / total;
    }
    case CoefKind::lambda3: {
      if (!split) fail(Errc::missing_split, "lambda3 needs an item split");
      validate_split(*split, cov.k());
      const double block_sum =
          block_total(cov.matrix, split->part_a) + block_total(cov.matrix, split->part_b);
      return 2.0 * (1.0 - block_sum / total);
    }
    case CoefKind::lambda4: {
      const double cbar2 = max_row_sumsq(cov.matrix).value;
      return (1.0 - trace / total) + 2.0 * std::sqrt(cbar2) / total;
    }
    case CoefKind::lambda5: {
      const double cbar2 = max_row_sumsq(cov.matrix).value;
      return (1.0 - trace / total) + k / (k - 1.0) * 2.0 * std::sqrt(cbar2) / total;
    }
    case CoefKind::lambda6: {
      const std::vector<double> e = resolve_error_variances(*this, cov);
      double esum = 0.0;
      for (double v : e) esum += v;
      return 1.0 - esum / total;
    }
  }
  fail(Errc::invalid_request, "unknown coefficient");
}

std::vector<double> Coefficient::gradient(const CovarianceSummary& cov, bool* max_tied) const {
  if (cov.zero_total()) fail(Errc::zero_total_variance, "gradient undefined: 1'Sigma 1 is zero");
  if (max_tied) *max_tied = false;
  const std::size_t kk = cov.k();
  const double k = static_cast<double>(kk);
  const double trace = cov.trace, total = cov.total;
  const double total2 = total * total;
  std::vector<double> g(vecs_length(kk), 0.0);

  // fill vecs positions from per-entry values
  auto assemble = [&](auto&& diag_value, auto&& offdiag_value) {
    std::size_t p = 0;
    for (std::size_t j = 0; j < kk; ++j)
      for (std::size_t i = j; i < kk; ++i, ++p)
        g[p] = (i == j) ? diag_value(i) : offdiag_value(i, j);
  };

  switch (kind) {
    case CoefKind::alpha: {
      const double ratio = k / (k - 1.0);
      const double d = -ratio * (total - trace) / total2;
      const double o = 2.0 * ratio * trace / total2;
      assemble([&](std::size_t) { return d; }, [&](std::size_t, std::size_t) { return o; });
      break;
    }
    case CoefKind::lambda1: {
      const double d = (trace - total) / total2;
      const double o = 2.0 * trace / total2;
      assemble([&](std::size_t) { return d; }, [&](std::size_t, std::size_t) { return o; });
      break;
    }
    case CoefKind::lambda2: {
      const double c2 = offdiag_sumsq(cov.matrix);
      if (c2 <= 1e-12 * total2)
        fail(Errc::singular_gradient, "lambda2 gradient: C2 is at its square-root singularity");
      const double w = std::sqrt(k / (k - 1.0));
      const double root = std::sqrt(c2);
      const double d = (trace - total - w * root) / total2;
      assemble([&](std::size_t) { return d; },
               [&](std::size_t i, std::size_t j) {
                 const double s_ij = cov.matrix(i, j);
                 return (2.0 * trace + 2.0 * w * (s_ij * total / root - root)) / total2;
               });
      break;
    }
    case CoefKind::lambda3: {
      if (!split) fail(Errc::missing_split, "lambda3 needs an item split");
      validate_split(*split, kk);
      std::vector<int> part(kk, 0);
      for (int i : split->part_b) part[i] = 1;
      const double block_sum =
          block_total(cov.matrix, split->part_a) + block_total(cov.matrix, split->part_b);
      const double d = 2.0 * (block_sum - total) / total2;
      assemble([&](std::size_t) { return d; },
               [&](std::size_t i, std::size_t j) {
                 // same part: the pair moves the block sum and the total;
                 // across parts: only the total moves
                 return part[i] == part[j] ? 4.0 * (block_sum - total) / total2
                                           : 4.0 * block_sum / total2;
               });
      break;
    }
    case CoefKind::lambda4:
    case CoefKind::lambda5: {
      const MaxRowSumsq m = max_row_sumsq(cov.matrix);
      if (max_tied) *max_tied = m.tied;
      if (m.value <= 1e-12 * total2)
        fail(Errc::singular_gradient, "Cbar2 is at its square-root singularity");
      const double c = (kind == CoefKind::lambda4) ? 2.0 : 2.0 * k / (k - 1.0);
      const double root = std::sqrt(m.value);
      const double d = (trace - total - c * root) / total2;
      assemble([&](std::size_t) { return d; },
               [&](std::size_t i, std::size_t j) {
                 const bool hits_max = (i == m.argmax) || (j == m.argmax);
                 const double s_ij = cov.matrix(i, j);
                 const double peak = hits_max ? c * s_ij * total / root : 0.0;
                 return (2.0 * trace + peak - 2.0 * c * root) / total2;
               });
      break;
    }
    case CoefKind::lambda6: {
      const std::vector<double> e = resolve_error_variances(*this, cov);
      double esum = 0.0;
      for (double v : e) esum += v;
      // error variances are treated as fixed inputs here, matching the
      // inferential use where they are supplied rather than re-derived
      const double d = esum / total2;
      const double o = 2.0 * esum / total2;
      assemble([&](std::size_t) { return d; }, [&](std::size_t, std::size_t) { return o; });
      break;
    }
  }
  return g;
}

std::vector<double> alpha_delta(const CovarianceSummary& cov) {
  Coefficient alpha;
  return alpha.gradient(cov);
}

}  // namespace relicmp
