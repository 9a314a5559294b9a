#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "metacov/special_fn.hpp"

namespace metacov {

/// Summary of one arm: sample size, mean, SD.  Carries population values in
/// truth mode and sample summaries in plugin mode.
struct GroupSummary {
  GroupSummary(int n, double mean, double sd);

  int n;
  double mean;
  double sd;
};

/// One outcome measured on a treatment arm and a control arm.
struct OutcomePair {
  GroupSummary treatment;
  GroupSummary control;
};

DegreesOfFreedom degrees_of_freedom(const GroupSummary& treatment, const GroupSummary& control);
DegreesOfFreedom degrees_of_freedom(const OutcomePair& outcome);

/// Square root of the (n-1)-weighted average of group variances.
double pooled_sd(const GroupSummary& treatment, const GroupSummary& control);
double pooled_sd(const OutcomePair& outcome);

/// Two outcomes measured within one study on (partially) shared subjects.
/// overlap_treatment / overlap_control count the subjects measured on both
/// outcomes in the respective arm; rho is the within-subject correlation
/// between the outcomes.  k_factor scales Cov(s_a^2, s_b^2) and may be left
/// unset (see resolve_k_factor in the engine).
class TwoOutcomeStudy {
 public:
  TwoOutcomeStudy(OutcomePair outcome_a, OutcomePair outcome_b, int overlap_treatment,
                  int overlap_control, double rho,
                  std::optional<double> k_factor = std::nullopt);

  const OutcomePair& outcome_a() const noexcept { return outcome_a_; }
  const OutcomePair& outcome_b() const noexcept { return outcome_b_; }
  int overlap_treatment() const noexcept { return overlap_treatment_; }
  int overlap_control() const noexcept { return overlap_control_; }
  double rho() const noexcept { return rho_; }
  const std::optional<double>& k_factor() const noexcept { return k_factor_; }

  /// True when every subject of both arms is measured on both outcomes.
  bool full_overlap() const noexcept;

 private:
  OutcomePair outcome_a_;
  OutcomePair outcome_b_;
  int overlap_treatment_;
  int overlap_control_;
  double rho_;
  std::optional<double> k_factor_;
};

/// One control arm plus one or more treatment arms sharing a study SD.
/// When sigma is not supplied it is computed as the pooled SD of the
/// summaries (the plugin choice); simulation designs supply the truth value.
class MultiArmStudy {
 public:
  MultiArmStudy(GroupSummary control, std::vector<GroupSummary> arms,
                std::optional<double> sigma = std::nullopt);

  const GroupSummary& control() const noexcept { return control_; }
  const std::vector<GroupSummary>& arms() const noexcept { return arms_; }
  double sigma() const noexcept { return sigma_; }

 private:
  GroupSummary control_;
  std::vector<GroupSummary> arms_;
  double sigma_;
};

DegreesOfFreedom degrees_of_freedom(const MultiArmStudy& study);
double pooled_sd(const MultiArmStudy& study);

/// Hedges' g values of one study (one entry per outcome or per arm) plus the
/// degrees-of-freedom / bias-correction metadata they were computed with.
struct EffectVector {
  std::vector<double> g;
  DegreesOfFreedom df;
  double j_factor;
};

/// Symmetric matrix of within-study covariances.  Only the lower triangle is
/// stored, so entries (a,b) and (b,a) are the same number by construction.
class CovMatrix {
 public:
  explicit CovMatrix(int dim);

  int dim() const noexcept { return dim_; }
  double operator()(int row, int col) const;
  void set(int row, int col, double value);
  std::vector<double> row_major() const;

 private:
  std::size_t pack(int row, int col) const;

  int dim_;
  std::vector<double> lower_;
};

}  // namespace metacov
