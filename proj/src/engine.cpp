#include "metacov/engine.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace metacov {
namespace {

void require_positive_count(int n, const char* what) {
  if (n < 1) {
    throw DomainError(std::string(what) + " must be a positive count");
  }
}

double overlap_share(const TwoOutcomeStudy& study) {
  const OutcomePair& a = study.outcome_a();
  const OutcomePair& b = study.outcome_b();
  return static_cast<double>(study.overlap_treatment()) /
             (static_cast<double>(a.treatment.n) * b.treatment.n) +
         static_cast<double>(study.overlap_control()) /
             (static_cast<double>(a.control.n) * b.control.n);
}

void check_integrity(const CovMatrix& cov) {
  for (int i = 0; i < cov.dim(); ++i) {
    if (!(cov(i, i) > 0.0)) {
      std::ostringstream msg;
      msg << "variance entry (" << i << "," << i << ") is not positive: " << cov(i, i);
      throw MatrixIntegrityError(msg.str());
    }
  }
  const auto [smallest, largest] = eigenvalue_range(cov);
  if (smallest < -kPsdTolerance * largest) {
    std::ostringstream msg;
    msg << "matrix is not positive semidefinite within tolerance; smallest eigenvalue "
        << smallest << " against largest " << largest;
    throw MatrixIntegrityError(msg.str());
  }
}

}  // namespace

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::two_outcome:
      return "two-outcome";
    case Method::multi_arm_wei:
      return "wei";
    case Method::multi_arm_novel:
      return "novel";
  }
  return "unknown";
}

double hedges_g(double mean_treatment, double mean_control, double s_pooled,
                DegreesOfFreedom df) {
  if (!(s_pooled > 0.0)) {
    throw DomainError("hedges_g: pooled SD must be positive");
  }
  return bias_correction(df) * (mean_treatment - mean_control) / s_pooled;
}

double var_g_two_group(double delta, int n_treatment, int n_control, DegreesOfFreedom df) {
  require_positive_count(n_treatment, "treatment group size");
  require_positive_count(n_control, "control group size");
  const double j = bias_correction(df);
  const double v = df.value();
  return j * j * (1.0 / n_treatment + 1.0 / n_control + delta * delta / (2.0 * v));
}

double cov_md_two_outcomes(const TwoOutcomeStudy& study, double sigma_a, double sigma_b) {
  return study.rho() * overlap_share(study) * sigma_a * sigma_b;
}

double cov_pooledvar_two_outcomes(double rho, double sigma_a, double sigma_b, double k_factor) {
  if (!(k_factor >= 0.0)) {
    throw DomainError("k factor must be nonnegative");
  }
  return rho * rho * sigma_a * sigma_a * sigma_b * sigma_b * k_factor;
}

double k_full_overlap(DegreesOfFreedom df) { return 2.0 / df.value(); }

double resolve_k_factor(const TwoOutcomeStudy& study) {
  if (study.k_factor()) {
    return *study.k_factor();
  }
  if (study.full_overlap()) {
    return k_full_overlap(degrees_of_freedom(study.outcome_a()));
  }
  throw KFactorRequired(
      "the pooled-variance covariance scale k is undetermined for partial overlap; "
      "supply k explicitly or estimate it by simulation");
}

double cov_g_two_outcomes(const TwoOutcomeStudy& study, double delta_a, double delta_b,
                          double /*sigma_a*/, double /*sigma_b*/) {
  // The sigmas cancel against the standardized deltas and drop out.
  if (study.rho() == 0.0) {
    return 0.0;  // every term carries a factor of rho
  }
  const double k = resolve_k_factor(study);
  const double j_a = bias_correction(degrees_of_freedom(study.outcome_a()));
  const double j_b = bias_correction(degrees_of_freedom(study.outcome_b()));
  return study.rho() * j_a * j_b *
         (overlap_share(study) + study.rho() * k * delta_a * delta_b / 4.0);
}

double cov_md_shared_control(double sigma, int n_control) {
  if (!(sigma > 0.0)) {
    throw DomainError("cov_md_shared_control: sigma must be positive");
  }
  if (n_control < 2) {
    throw DomainError("cov_md_shared_control: control group needs at least 2 subjects");
  }
  return sigma * sigma / n_control;
}

double cov_g_multiarm_wei(double delta_a, double delta_b, int n_control, DegreesOfFreedom df) {
  if (df.value() <= 2) {
    throw SingularityError("cov_g_multiarm_wei: needs degrees of freedom >= 3");
  }
  require_positive_count(n_control, "control group size");
  const double v = df.value();
  const double j = bias_correction(df);
  const double inv_sd_spread = v / (v - 2.0) - 1.0 / (j * j);
  return j * j * delta_a * delta_b * inv_sd_spread + 1.0 / n_control;
}

double var_g_multiarm_wei(double delta, int n_treatment, int n_control, DegreesOfFreedom df) {
  if (df.value() <= 2) {
    throw SingularityError("var_g_multiarm_wei: needs degrees of freedom >= 3");
  }
  require_positive_count(n_treatment, "treatment group size");
  require_positive_count(n_control, "control group size");
  const double v = df.value();
  const double j = bias_correction(df);
  const double inv_sd_spread = v / (v - 2.0) - 1.0 / (j * j);
  return (1.0 / n_treatment + 1.0 / n_control) + j * j * delta * delta * inv_sd_spread;
}

double cov_g_multiarm_novel(double delta_a, double delta_b, int n_control, DegreesOfFreedom df) {
  require_positive_count(n_control, "control group size");
  const double v = df.value();
  const double j = bias_correction(df);
  return j * j * (delta_a * delta_b / (2.0 * v) + 1.0 / n_control);
}

double var_g_multiarm_novel(double delta, int n_treatment, int n_control, DegreesOfFreedom df) {
  return var_g_two_group(delta, n_treatment, n_control, df);
}

StudyEffects assemble_cov_matrix(const MultiArmStudy& study, Method method, ParamMode mode) {
  if (method == Method::two_outcome) {
    throw DomainError("the two-outcome method needs a two-outcome study");
  }
  const DegreesOfFreedom df = degrees_of_freedom(study);
  const double j = bias_correction(df);
  const double sigma = mode == ParamMode::truth ? study.sigma() : pooled_sd(study);
  const int n_arms = static_cast<int>(study.arms().size());
  const int n_control = study.control().n;

  std::vector<double> g(n_arms);
  std::vector<double> delta(n_arms);
  for (int i = 0; i < n_arms; ++i) {
    g[i] = hedges_g(study.arms()[i].mean, study.control().mean, sigma, df);
    delta[i] = g[i] / j;
  }

  CovMatrix cov(n_arms);
  for (int r = 0; r < n_arms; ++r) {
    const int n_arm = study.arms()[r].n;
    cov.set(r, r, method == Method::multi_arm_wei
                      ? var_g_multiarm_wei(delta[r], n_arm, n_control, df)
                      : var_g_multiarm_novel(delta[r], n_arm, n_control, df));
    for (int c = 0; c < r; ++c) {
      cov.set(r, c, method == Method::multi_arm_wei
                        ? cov_g_multiarm_wei(delta[r], delta[c], n_control, df)
                        : cov_g_multiarm_novel(delta[r], delta[c], n_control, df));
    }
  }
  check_integrity(cov);
  return {EffectVector{std::move(g), df, j}, std::move(cov)};
}

StudyEffects assemble_cov_matrix(const TwoOutcomeStudy& study, Method method, ParamMode mode) {
  (void)mode;  // population sigma and pooled sigma coincide for this design
  if (method != Method::two_outcome) {
    throw DomainError("multi-arm methods need a multi-arm study");
  }
  const OutcomePair& a = study.outcome_a();
  const OutcomePair& b = study.outcome_b();
  const DegreesOfFreedom df_a = degrees_of_freedom(a);
  const DegreesOfFreedom df_b = degrees_of_freedom(b);
  const double j_a = bias_correction(df_a);
  const double j_b = bias_correction(df_b);
  const double sigma_a = pooled_sd(a);
  const double sigma_b = pooled_sd(b);
  const double g_a = hedges_g(a.treatment.mean, a.control.mean, sigma_a, df_a);
  const double g_b = hedges_g(b.treatment.mean, b.control.mean, sigma_b, df_b);
  const double delta_a = g_a / j_a;
  const double delta_b = g_b / j_b;

  CovMatrix cov(2);
  cov.set(0, 0, var_g_two_group(delta_a, a.treatment.n, a.control.n, df_a));
  cov.set(1, 1, var_g_two_group(delta_b, b.treatment.n, b.control.n, df_b));
  cov.set(1, 0, cov_g_two_outcomes(study, delta_a, delta_b, sigma_a, sigma_b));
  check_integrity(cov);

  // Metadata carries outcome_a's (v, J); the entries above use each
  // outcome's own degrees of freedom.
  return {EffectVector{{g_a, g_b}, df_a, j_a}, std::move(cov)};
}

std::pair<double, double> eigenvalue_range(const CovMatrix& matrix) {
  Eigen::MatrixXd m(matrix.dim(), matrix.dim());
  for (int r = 0; r < matrix.dim(); ++r) {
    for (int c = 0; c < matrix.dim(); ++c) {
      m(r, c) = matrix(r, c);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();
  return {values(0), values(matrix.dim() - 1)};
}

}  // namespace metacov
