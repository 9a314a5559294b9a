#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "metacov/mc_oracle.hpp"
#include "metacov/model.hpp"

using namespace metacov;

TEST_CASE("group summary validates its invariants") {
  CHECK_NOTHROW(GroupSummary(2, 0.0, 1.0));
  CHECK_THROWS_AS(GroupSummary(1, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(GroupSummary(10, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(GroupSummary(10, 0.0, -1.0), DomainError);
  CHECK_THROWS_AS(GroupSummary(10, std::nan(""), 1.0), DomainError);
  CHECK_THROWS_AS(GroupSummary(10, 0.0, std::nan("")), DomainError);
}

TEST_CASE("degrees of freedom formulas") {
  CHECK(degrees_of_freedom(GroupSummary(10, 0, 1), GroupSummary(12, 0, 1)).value() == 20);

  const MultiArmStudy two_arms(GroupSummary(20, 0, 1),
                               {GroupSummary(20, 0, 1), GroupSummary(20, 0, 1)});
  CHECK(degrees_of_freedom(two_arms).value() == 57);

  // A single-arm study reduces to the two-group formula.
  const MultiArmStudy single(GroupSummary(20, 0, 1), {GroupSummary(20, 0, 1)});
  CHECK(degrees_of_freedom(single).value() == 38);
  CHECK(degrees_of_freedom(single).value() ==
        degrees_of_freedom(GroupSummary(20, 0, 1), GroupSummary(20, 0, 1)).value());
}

TEST_CASE("pooled sd formulas") {
  // Equal group SDs pool to the same value.
  CHECK(pooled_sd(GroupSummary(7, 1.0, 2.5), GroupSummary(13, 0.0, 2.5)) ==
        doctest::Approx(2.5).epsilon(1e-15));

  CHECK(pooled_sd(GroupSummary(3, 0, 1.0), GroupSummary(3, 0, 2.0)) ==
        doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));

  // Three equal-size arms plus control with SDs (1,1,1,3).
  const MultiArmStudy study(
      GroupSummary(5, 0, 3.0),
      {GroupSummary(5, 0, 1.0), GroupSummary(5, 0, 1.0), GroupSummary(5, 0, 1.0)});
  CHECK(pooled_sd(study) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("pooled sd is permutation invariant and positively homogeneous") {
  mc::SplitMix64 rng(20240811ULL);
  auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.next_unit(); };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GroupSummary> arms;
    const int n_arms = 2 + static_cast<int>(rng.next() % 4);
    for (int a = 0; a < n_arms; ++a) {
      arms.emplace_back(2 + static_cast<int>(rng.next() % 40), uniform(-2.0, 2.0),
                        uniform(0.1, 5.0));
    }
    const GroupSummary control(2 + static_cast<int>(rng.next() % 40), uniform(-2.0, 2.0),
                               uniform(0.1, 5.0));
    const MultiArmStudy study(control, arms);
    const double baseline = pooled_sd(study);

    std::vector<GroupSummary> shuffled = arms;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + trial % n_arms, shuffled.end());
    CHECK(pooled_sd(MultiArmStudy(control, shuffled)) ==
          doctest::Approx(baseline).epsilon(1e-12));

    const double c = uniform(0.2, 6.0);
    std::vector<GroupSummary> scaled;
    for (const GroupSummary& arm : arms) {
      scaled.emplace_back(arm.n, arm.mean, c * arm.sd);
    }
    const MultiArmStudy scaled_study(GroupSummary(control.n, control.mean, c * control.sd),
                                     scaled);
    CHECK(pooled_sd(scaled_study) == doctest::Approx(c * baseline).epsilon(1e-12));
  }
}

TEST_CASE("two-outcome study invariants") {
  const OutcomePair a{GroupSummary(20, 0.4, 1.0), GroupSummary(18, 0.0, 1.0)};
  const OutcomePair b{GroupSummary(16, 0.6, 1.0), GroupSummary(18, 0.0, 1.0)};

  CHECK_NOTHROW(TwoOutcomeStudy(a, b, 16, 18, 0.5));
  CHECK_NOTHROW(TwoOutcomeStudy(a, b, 0, 0, -1.0));
  // Overlap may not exceed the smaller group on either side.
  CHECK_THROWS_AS(TwoOutcomeStudy(a, b, 17, 18, 0.5), DomainError);
  CHECK_THROWS_AS(TwoOutcomeStudy(a, b, 16, 19, 0.5), DomainError);
  CHECK_THROWS_AS(TwoOutcomeStudy(a, b, -1, 0, 0.5), DomainError);
  CHECK_THROWS_AS(TwoOutcomeStudy(a, b, 16, 18, 1.2), DomainError);
  CHECK_THROWS_AS(TwoOutcomeStudy(a, b, 16, 18, std::nan("")), DomainError);
  CHECK_THROWS_AS(TwoOutcomeStudy(a, b, 16, 18, 0.5, -0.1), DomainError);

  const TwoOutcomeStudy partial(a, b, 16, 18, 0.5);
  CHECK_FALSE(partial.full_overlap());

  const OutcomePair same{GroupSummary(20, 0.4, 1.0), GroupSummary(18, 0.0, 1.0)};
  const TwoOutcomeStudy full(same, same, 20, 18, 0.5);
  CHECK(full.full_overlap());
}

TEST_CASE("multi-arm study invariants") {
  CHECK_THROWS_AS(MultiArmStudy(GroupSummary(20, 0, 1), {}), DomainError);
  // v = 2 + 2 - 2 = 2 < 3.
  CHECK_THROWS_AS(MultiArmStudy(GroupSummary(2, 0, 1), {GroupSummary(2, 0, 1)}), DomainError);
  CHECK_NOTHROW(MultiArmStudy(GroupSummary(3, 0, 1), {GroupSummary(2, 0, 1)}));
  CHECK_THROWS_AS(MultiArmStudy(GroupSummary(20, 0, 1), {GroupSummary(20, 0, 1)}, -1.0),
                  DomainError);

  const MultiArmStudy defaulted(GroupSummary(10, 0, 2.0), {GroupSummary(10, 1, 1.0)});
  CHECK(defaulted.sigma() == doctest::Approx(pooled_sd(defaulted)).epsilon(1e-15));

  const MultiArmStudy explicit_sigma(GroupSummary(10, 0, 2.0), {GroupSummary(10, 1, 1.0)}, 3.5);
  CHECK(explicit_sigma.sigma() == 3.5);
}

TEST_CASE("covariance matrix stores a symmetric lower triangle") {
  CovMatrix m(3);
  CHECK(m.dim() == 3);
  m.set(0, 0, 1.0);
  m.set(2, 1, 0.25);
  m.set(0, 2, -0.5);
  // Exact symmetry: the same stored number serves both index orders.
  CHECK(m(1, 2) == 0.25);
  CHECK(m(2, 1) == 0.25);
  CHECK(m(2, 0) == -0.5);
  CHECK(m(0, 2) == -0.5);
  CHECK(m(1, 1) == 0.0);

  const std::vector<double> expected{1.0, 0.0, -0.5, 0.0, 0.0, 0.25, -0.5, 0.25, 0.0};
  CHECK(m.row_major() == expected);

  CHECK_THROWS_AS(m(3, 0), std::out_of_range);
  CHECK_THROWS_AS(m.set(0, -1, 1.0), std::out_of_range);
  CHECK_THROWS_AS(CovMatrix(0), DomainError);
}
