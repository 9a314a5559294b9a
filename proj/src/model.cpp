#include "metacov/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace metacov {
namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be finite");
  }
}

}  // namespace

GroupSummary::GroupSummary(int n_, double mean_, double sd_) : n(n_), mean(mean_), sd(sd_) {
  if (n < 2) {
    throw DomainError("group size must be at least 2, got " + std::to_string(n));
  }
  require_finite(mean, "group mean");
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw DomainError("group sd must be positive and finite");
  }
}

DegreesOfFreedom degrees_of_freedom(const GroupSummary& treatment, const GroupSummary& control) {
  return DegreesOfFreedom(treatment.n + control.n - 2);
}

DegreesOfFreedom degrees_of_freedom(const OutcomePair& outcome) {
  return degrees_of_freedom(outcome.treatment, outcome.control);
}

double pooled_sd(const GroupSummary& treatment, const GroupSummary& control) {
  const double weighted = (treatment.n - 1) * treatment.sd * treatment.sd +
                          (control.n - 1) * control.sd * control.sd;
  return std::sqrt(weighted / (treatment.n + control.n - 2));
}

double pooled_sd(const OutcomePair& outcome) {
  return pooled_sd(outcome.treatment, outcome.control);
}

TwoOutcomeStudy::TwoOutcomeStudy(OutcomePair outcome_a, OutcomePair outcome_b,
                                 int overlap_treatment, int overlap_control, double rho,
                                 std::optional<double> k_factor)
    : outcome_a_(std::move(outcome_a)),
      outcome_b_(std::move(outcome_b)),
      overlap_treatment_(overlap_treatment),
      overlap_control_(overlap_control),
      rho_(rho),
      k_factor_(k_factor) {
  const int max_t = std::min(outcome_a_.treatment.n, outcome_b_.treatment.n);
  const int max_c = std::min(outcome_a_.control.n, outcome_b_.control.n);
  if (overlap_treatment_ < 0 || overlap_treatment_ > max_t) {
    throw DomainError("treatment overlap " + std::to_string(overlap_treatment_) +
                      " exceeds the smaller treatment group (" + std::to_string(max_t) + ")");
  }
  if (overlap_control_ < 0 || overlap_control_ > max_c) {
    throw DomainError("control overlap " + std::to_string(overlap_control_) +
                      " exceeds the smaller control group (" + std::to_string(max_c) + ")");
  }
  if (!(std::fabs(rho_) <= 1.0)) {
    throw DomainError("within-subject correlation must lie in [-1, 1]");
  }
  if (k_factor_ && (!(*k_factor_ >= 0.0) || !std::isfinite(*k_factor_))) {
    throw DomainError("k factor must be nonnegative and finite");
  }
}

bool TwoOutcomeStudy::full_overlap() const noexcept {
  return overlap_treatment_ == outcome_a_.treatment.n &&
         overlap_treatment_ == outcome_b_.treatment.n &&
         overlap_control_ == outcome_a_.control.n && overlap_control_ == outcome_b_.control.n;
}

MultiArmStudy::MultiArmStudy(GroupSummary control, std::vector<GroupSummary> arms,
                             std::optional<double> sigma)
    : control_(control), arms_(std::move(arms)), sigma_(0.0) {
  if (arms_.empty()) {
    throw DomainError("a multi-arm study needs at least one treatment arm");
  }
  long df = control_.n - static_cast<long>(arms_.size()) - 1;
  for (const GroupSummary& arm : arms_) {
    df += arm.n;
  }
  if (df < 3) {
    throw DomainError("multi-arm degrees of freedom must be at least 3, got " +
                      std::to_string(df));
  }
  sigma_ = sigma ? *sigma : pooled_sd(*this);
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw DomainError("study sigma must be positive and finite");
  }
}

DegreesOfFreedom degrees_of_freedom(const MultiArmStudy& study) {
  long df = study.control().n - static_cast<long>(study.arms().size()) - 1;
  for (const GroupSummary& arm : study.arms()) {
    df += arm.n;
  }
  return DegreesOfFreedom(static_cast<int>(df));
}

double pooled_sd(const MultiArmStudy& study) {
  double weighted = (study.control().n - 1) * study.control().sd * study.control().sd;
  long df = study.control().n - 1;
  for (const GroupSummary& arm : study.arms()) {
    weighted += (arm.n - 1) * arm.sd * arm.sd;
    df += arm.n - 1;
  }
  return std::sqrt(weighted / df);
}

CovMatrix::CovMatrix(int dim) : dim_(dim) {
  if (dim < 1) {
    throw DomainError("covariance matrix dimension must be positive");
  }
  lower_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
}

std::size_t CovMatrix::pack(int row, int col) const {
  if (row < 0 || row >= dim_ || col < 0 || col >= dim_) {
    throw std::out_of_range("covariance matrix index out of range");
  }
  if (col > row) {
    std::swap(row, col);
  }
  return static_cast<std::size_t>(row) * (row + 1) / 2 + col;
}

double CovMatrix::operator()(int row, int col) const { return lower_[pack(row, col)]; }

void CovMatrix::set(int row, int col, double value) { lower_[pack(row, col)] = value; }

std::vector<double> CovMatrix::row_major() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dim_) * dim_);
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) {
      out.push_back((*this)(r, c));
    }
  }
  return out;
}

}  // namespace metacov
