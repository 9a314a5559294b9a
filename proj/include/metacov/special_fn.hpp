#pragma once

#include "metacov/errors.hpp"

namespace metacov {

/// Pooled degrees of freedom: total subjects minus the number of groups in
/// the pooling.  Valid from 2 upward; the inverse-variance moments
/// additionally require at least 3.
class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(int value);

  int value() const noexcept { return value_; }

  friend bool operator==(DegreesOfFreedom, DegreesOfFreedom) noexcept = default;

 private:
  int value_;
};

/// ln Gamma(x) for x > 0.  Absolute error stays below 1e-12 on [0.5, 1000]
/// (Stirling series with argument shift, evaluated in extended precision).
double ln_gamma(double x);

/// Small-sample bias correction for a standardized mean difference:
/// Gamma(v/2) / (sqrt(v/2) * Gamma((v-1)/2)), evaluated through ln_gamma
/// differences so large v cannot overflow.  Lies in (0, 1), increasing in v.
double bias_correction(DegreesOfFreedom df);

/// Mean of the reciprocal pooled SD: E(1/s_p) = 1 / (sigma * J(v)).
double inv_sd_mean(DegreesOfFreedom df, double sigma);

/// Mean of the reciprocal pooled variance: E(1/s_p^2) = v / ((v-2) sigma^2).
/// Diverges at v <= 2.
double inv_var_mean(DegreesOfFreedom df, double sigma);

/// Variance of the reciprocal pooled SD:
/// Var(1/s_p) = (v/(v-2) - 1/J(v)^2) / sigma^2.  Diverges at v <= 2.
double inv_sd_variance(DegreesOfFreedom df, double sigma);

}  // namespace metacov
