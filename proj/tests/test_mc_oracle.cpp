#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "metacov/mc_oracle.hpp"

using namespace metacov;
using namespace metacov::mc;

namespace {

MultiArmStudy null_three_group(int n) {
  return MultiArmStudy(GroupSummary(n, 0.0, 1.0),
                       {GroupSummary(n, 0.0, 1.0), GroupSummary(n, 0.0, 1.0)}, 1.0);
}

TwoOutcomeStudy two_outcome_design(int n, double delta_a, double delta_b, double rho,
                                   int overlap_t, int overlap_c) {
  const OutcomePair a{GroupSummary(n, delta_a, 1.0), GroupSummary(n, 0.0, 1.0)};
  const OutcomePair b{GroupSummary(n, delta_b, 1.0), GroupSummary(n, 0.0, 1.0)};
  return TwoOutcomeStudy(a, b, overlap_t, overlap_c, rho);
}

double z_of(double analytic, const McEstimate& estimate) {
  return (analytic - estimate.value) / estimate.std_error;
}

bool same_summary(const GroupSummary& a, const GroupSummary& b) {
  return a.n == b.n && a.mean == b.mean && a.sd == b.sd;
}

}  // namespace

TEST_CASE("splitmix stream basics") {
  SplitMix64 rng(7);
  SplitMix64 rng_again(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_unit();
    CHECK(u == rng_again.next_unit());
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  CHECK(substream_seed(1, 0) != substream_seed(1, 1));
  CHECK(substream_seed(1, 0) != substream_seed(2, 0));
}

TEST_CASE("config rejects too few replicates") {
  CHECK_THROWS_AS(SimConfig(null_three_group(20), 10, 1), DomainError);
  CHECK_THROWS_AS(SimConfig(null_three_group(20), 99, 1), DomainError);
  CHECK_NOTHROW(SimConfig(null_three_group(20), 100, 1));
}

TEST_CASE("replicate simulation is deterministic in (seed, index)") {
  const SimConfig config(null_three_group(12), 1000, 99);
  const MultiArmReplicate first = simulate_multiarm_study(config, 17);
  const MultiArmReplicate again = simulate_multiarm_study(config, 17);
  CHECK(same_summary(first.control, again.control));
  REQUIRE(first.arms.size() == again.arms.size());
  for (std::size_t i = 0; i < first.arms.size(); ++i) {
    CHECK(same_summary(first.arms[i], again.arms[i]));
  }
  CHECK(first.pooled_sd == again.pooled_sd);

  const MultiArmReplicate other = simulate_multiarm_study(config, 18);
  CHECK(first.control.mean != other.control.mean);
}

TEST_CASE("simulators demand the matching design") {
  const SimConfig multiarm(null_three_group(12), 1000, 1);
  CHECK_THROWS_AS(simulate_two_outcome_study(multiarm, 0), DomainError);
  const SimConfig two(two_outcome_design(10, 0.0, 0.0, 0.5, 10, 10), 1000, 1);
  CHECK_THROWS_AS(simulate_multiarm_study(two, 0), DomainError);
  CHECK_THROWS_AS(pooled_sd_moments(two), DomainError);
  CHECK_THROWS_AS(estimate_k(multiarm), DomainError);
}

TEST_CASE("perfectly correlated identical outcomes give identical g values") {
  const SimConfig config(two_outcome_design(15, 0.4, 0.4, 1.0, 15, 15), 1000, 5);
  for (long r = 0; r < 50; ++r) {
    const std::vector<double> g = replicate_g(config, r);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == g[1]);
  }
  const McMatrix cov = empirical_cov_g(SimConfig(config.design, 2000, 5));
  CHECK(cov.at(0, 1).value == cov.at(0, 0).value);
}

TEST_CASE("independent outcomes show no mean-difference correlation") {
  const SimConfig config(two_outcome_design(10, 0.3, 0.6, 0.0, 10, 10), 20000, 11);
  const VectorMoments md = empirical_md_moments(config);
  const McEstimate& cross = md.covariance.at(0, 1);
  CHECK(std::fabs(cross.value / cross.std_error) <= 3.0);
}

TEST_CASE("null multi-arm design has centered mean differences") {
  const SimConfig config(null_three_group(20), 20000, 13);
  const VectorMoments md = empirical_md_moments(config);
  for (const McEstimate& mean : md.mean) {
    CHECK(std::fabs(mean.value / mean.std_error) <= 3.0);
  }
}

TEST_CASE("pooled SD moments reproduce the chi-square identities") {
  // v = 10 through a single-arm design with n = 6 per group.
  const MultiArmStudy design(GroupSummary(6, 0.0, 1.0), {GroupSummary(6, 0.7, 1.0)}, 1.0);
  const DegreesOfFreedom df = degrees_of_freedom(design);
  REQUIRE(df.value() == 10);
  const SimConfig config(design, 100000, 17);
  const PooledSdMoments moments = pooled_sd_moments(config);

  CHECK(std::fabs(z_of(1.0, moments.mean_square)) <= 3.0);                      // E(s^2)
  CHECK(std::fabs(z_of(2.0 / df.value(), moments.var_square)) <= 3.0);          // Var(s^2)
  CHECK(std::fabs(z_of(inv_sd_mean(df, 1.0), moments.mean_inverse)) <= 3.0);    // E(1/s)
  CHECK(std::fabs(z_of(inv_var_mean(df, 1.0), moments.mean_inverse_square)) <= 3.0);
}

TEST_CASE("shared-control covariance of mean differences, normal and skewed") {
  const MultiArmStudy design(GroupSummary(10, 0.0, 1.0),
                             {GroupSummary(10, 0.3, 1.0), GroupSummary(10, 0.6, 1.0)}, 1.0);
  for (NoiseModel noise : {NoiseModel::gaussian, NoiseModel::shifted_exponential}) {
    const SimConfig config(design, 100000, 19, noise);
    const VectorMoments md = empirical_md_moments(config);
    CAPTURE(noise == NoiseModel::gaussian ? "normal" : "shifted-exponential");
    CHECK(std::fabs(z_of(0.1, md.covariance.at(0, 1))) <= 3.0);  // sigma^2 / n_c
  }
}

TEST_CASE("hedges_g is unbiased for the population effect") {
  const MultiArmStudy design(GroupSummary(10, 0.0, 1.0), {GroupSummary(10, 0.5, 1.0)}, 1.0);
  const SimConfig config(design, 100000, 23);
  const VectorMoments g = empirical_g_moments(config);
  CHECK(std::fabs(z_of(0.5, g.mean[0])) <= 3.0);
}

TEST_CASE("estimate_k") {
  SUBCASE("full overlap recovers the closed form 2/v") {
    const SimConfig config(two_outcome_design(20, 0.4, 0.6, 0.6, 20, 20), 100000, 29);
    const McEstimate k = estimate_k(config);
    CHECK(std::fabs(z_of(2.0 / 38.0, k)) <= 3.0);
    CHECK(k.replicates == 100000);
  }
  SUBCASE("unidentifiable at rho = 0") {
    const SimConfig config(two_outcome_design(20, 0.4, 0.6, 0.0, 20, 20), 1000, 29);
    CHECK_THROWS_AS(estimate_k(config), UnidentifiableError);
  }
  SUBCASE("half overlap yields a finite positive estimate") {
    const SimConfig config(two_outcome_design(20, 0.4, 0.6, 0.9, 10, 10), 200000, 31);
    const McEstimate k = estimate_k(config);
    REQUIRE(std::isfinite(k.value));
    CHECK(k.value > 0.0);
    CHECK(k.value > 3.0 * k.std_error);
  }
}

TEST_CASE("standard errors scale like one over the square root of replicates") {
  const auto design = null_three_group(20);
  const McEstimate narrow = empirical_cov_g(SimConfig(design, 40000, 37)).at(0, 1);
  const McEstimate wide = empirical_cov_g(SimConfig(design, 20000, 37)).at(0, 1);
  const double ratio = narrow.std_error / wide.std_error;
  // Doubling the replicates should shrink the SE by ~ 1/sqrt(2), within 20%.
  CHECK(ratio > 0.707 * 0.8);
  CHECK(ratio < 0.707 * 1.2);
}

TEST_CASE("results do not depend on the worker count") {
  SimConfig single(null_three_group(15), 5000, 41);
  single.max_threads = 1;
  SimConfig quad(null_three_group(15), 5000, 41);
  quad.max_threads = 4;
  const VectorMoments a = empirical_g_moments(single);
  const VectorMoments b = empirical_g_moments(quad);
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    CHECK(a.mean[i].value == b.mean[i].value);
    CHECK(a.mean[i].std_error == b.mean[i].std_error);
  }
  for (int r = 0; r < a.covariance.dim; ++r) {
    for (int c = 0; c < a.covariance.dim; ++c) {
      CHECK(a.covariance.at(r, c).value == b.covariance.at(r, c).value);
      CHECK(a.covariance.at(r, c).std_error == b.covariance.at(r, c).std_error);
    }
  }
}

TEST_CASE("validate") {
  SUBCASE("wei passes on the null design at everyday replicate counts") {
    const SimConfig config(null_three_group(20), 10000, 43);
    const ValidationReport report = validate(config, {Method::multi_arm_wei}, 3.0);
    REQUIRE(report.methods.size() == 1);
    CHECK(report.methods[0].entries.size() == 3);  // (0,0), (1,0), (1,1)
    CHECK(report.pass);
  }
  SUBCASE("a deliberately perturbed analytic entry fails its check") {
    const SimConfig config(null_three_group(20), 10000, 43);
    const McMatrix mc_cov = empirical_cov_g(config);
    CovMatrix analytic(2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c <= r; ++c) {
        analytic.set(r, c, mc_cov.at(r, c).value);
      }
    }
    analytic.set(1, 0, mc_cov.at(1, 0).value + 10.0 * mc_cov.at(1, 0).std_error);
    const MethodValidation scored =
        check_against(Method::multi_arm_wei, analytic, mc_cov, 3.0);
    CHECK_FALSE(scored.pass);
    int failures = 0;
    for (const ValidationEntry& entry : scored.entries) {
      if (!entry.pass) {
        ++failures;
        CHECK(entry.row == 1);
        CHECK(entry.col == 0);
        CHECK(entry.z == doctest::Approx(10.0).epsilon(1e-9));
      }
    }
    CHECK(failures == 1);
  }
  SUBCASE("two methods are scored side by side against one simulation") {
    const SimConfig config(null_three_group(20), 10000, 43);
    const ValidationReport report =
        validate(config, {Method::multi_arm_wei, Method::multi_arm_novel}, 3.0);
    REQUIRE(report.methods.size() == 2);
    CHECK(report.methods[0].method == Method::multi_arm_wei);
    CHECK(report.methods[1].method == Method::multi_arm_novel);
    // Same simulation behind both scorings.
    CHECK(report.methods[0].entries[1].mc_value == report.methods[1].entries[1].mc_value);
  }
  SUBCASE("a degenerate tolerance fails") {
    const SimConfig config(null_three_group(20), 10000, 43);
    const ValidationReport report = validate(config, {Method::multi_arm_wei}, 0.001);
    CHECK_FALSE(report.pass);
  }
  SUBCASE("partial-overlap two-outcome designs get k estimated automatically") {
    const SimConfig config(two_outcome_design(12, 0.3, 0.5, 0.8, 6, 6), 20000, 47);
    const ValidationReport report = validate(config, {Method::two_outcome}, 3.0);
    REQUIRE(report.methods.size() == 1);
    // The analytic side resolved a k and produced finite entries.
    for (const ValidationEntry& entry : report.methods[0].entries) {
      REQUIRE(std::isfinite(entry.analytic));
    }
  }
}
