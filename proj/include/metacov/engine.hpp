#pragma once

#include <utility>

#include "metacov/model.hpp"

namespace metacov {

/// Which covariance recipe to apply.
enum class Method { two_outcome, multi_arm_wei, multi_arm_novel };

/// Whether study fields hold population truth (simulation designs) or sample
/// plug-ins (real data).
enum class ParamMode { truth, plugin };

/// "two-outcome", "wei" or "novel".
const char* to_string(Method method) noexcept;

/// Hedges' g: J(v) * (mean_t - mean_c) / s_pooled.
double hedges_g(double mean_treatment, double mean_control, double s_pooled,
                DegreesOfFreedom df);

/// Delta-method variance of g for one two-group comparison:
/// J(v)^2 * (1/n_t + 1/n_c + delta^2 / (2v)).
double var_g_two_group(double delta, int n_treatment, int n_control, DegreesOfFreedom df);

/// Covariance of the two mean differences induced by shared subjects:
/// rho * (m_t/(n_a^t n_b^t) + m_c/(n_a^c n_b^c)) * sigma_a * sigma_b.
double cov_md_two_outcomes(const TwoOutcomeStudy& study, double sigma_a, double sigma_b);

/// Covariance of the two pooled variances: rho^2 sigma_a^2 sigma_b^2 k.
double cov_pooledvar_two_outcomes(double rho, double sigma_a, double sigma_b, double k_factor);

/// Closed-form k under full overlap: 2/v (forced by Cov(s^2, s^2) = Var(s^2)).
double k_full_overlap(DegreesOfFreedom df);

/// k resolution order: explicit study value, then the full-overlap closed
/// form, otherwise KFactorRequired.
double resolve_k_factor(const TwoOutcomeStudy& study);

/// Delta-method covariance of the two outcomes' g values.  Exactly 0 when
/// rho is 0; otherwise requires a resolvable k factor.
double cov_g_two_outcomes(const TwoOutcomeStudy& study, double delta_a, double delta_b,
                          double sigma_a, double sigma_b);

/// Distribution-free covariance of two mean differences sharing one control
/// arm: sigma^2 / n_c.
double cov_md_shared_control(double sigma, int n_control);

/// Shared-control covariance of g for two distinct arms, inverse-moment
/// route: J^2 delta_a delta_b (v/(v-2) - 1/J^2) + 1/n_c.  Needs v >= 3.
double cov_g_multiarm_wei(double delta_a, double delta_b, int n_control, DegreesOfFreedom df);

/// Matching variance: (1/n_t + 1/n_c) + J^2 delta^2 (v/(v-2) - 1/J^2).
double var_g_multiarm_wei(double delta, int n_treatment, int n_control, DegreesOfFreedom df);

/// Shared-control covariance of g for two distinct arms, pooled-variance
/// route: J^2 (delta_a delta_b / (2v) + 1/n_c).
double cov_g_multiarm_novel(double delta_a, double delta_b, int n_control, DegreesOfFreedom df);

/// Matching variance; same recipe as var_g_two_group.
double var_g_multiarm_novel(double delta, int n_treatment, int n_control, DegreesOfFreedom df);

struct StudyEffects {
  EffectVector effects;
  CovMatrix cov;
};

/// Full per-study effect vector plus covariance matrix.  Plugin mode derives
/// delta_k = g_k / J(v) and sigma from the pooled SD; truth mode reads the
/// supplied population parameters.  The result is symmetric by construction
/// and checked for a positive diagonal and positive semidefiniteness.
StudyEffects assemble_cov_matrix(const MultiArmStudy& study, Method method, ParamMode mode);
StudyEffects assemble_cov_matrix(const TwoOutcomeStudy& study, Method method, ParamMode mode);

/// (smallest, largest) eigenvalue of a symmetric matrix; the PSD oracle.
std::pair<double, double> eigenvalue_range(const CovMatrix& matrix);

/// Relative PSD tolerance: smallest eigenvalue >= -kPsdTolerance * largest.
inline constexpr double kPsdTolerance = 1e-10;

}  // namespace metacov
