#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "metacov/engine.hpp"

namespace metacov::mc {

/// Batch count used for jackknife standard errors and for the deterministic
/// parallel reduction order.
inline constexpr int kJackknifeBatches = 100;

/// Below this many replicates the jackknife standard errors are meaningless.
inline constexpr long kMinReplicates = 100;

/// 64-bit avalanche mix (splitmix64 finalizer).
std::uint64_t scramble64(std::uint64_t x) noexcept;

/// Seed of the independent stream used for one replicate: a hash of the
/// master seed and the replicate index, so results never depend on worker
/// count or scheduling.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// splitmix64 generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  /// Uniform double in [0, 1).
  double next_unit() noexcept;

 private:
  std::uint64_t state_;
};

/// Noise shape for the simulators.  Everything is standardized to mean 0 and
/// variance 1; shifted_exponential (Exp(1) - 1) exercises the
/// distribution-free claims with a skewed generator.
enum class NoiseModel { gaussian, shifted_exponential };

/// Stream of standardized draws for one replicate.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, NoiseModel model) noexcept : rng_(seed), model_(model) {}

  double next();

 private:
  SplitMix64 rng_;
  NoiseModel model_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// A simulation plan: a design holding population (truth) parameters, a
/// replicate budget and a master seed.
struct SimConfig {
  SimConfig(std::variant<TwoOutcomeStudy, MultiArmStudy> design, long replicates,
            std::uint64_t master_seed, NoiseModel noise = NoiseModel::gaussian);

  std::variant<TwoOutcomeStudy, MultiArmStudy> design;
  long replicates;
  std::uint64_t master_seed;
  NoiseModel noise;
  int max_threads = 0;  // 0: hardware concurrency; never changes results
};

/// One simulation-based estimate with its jackknife standard error.
struct McEstimate {
  double value;
  double std_error;
  long replicates;
};

/// Matrix of estimates (row-major, symmetric content).
struct McMatrix {
  explicit McMatrix(int dim_) : dim(dim_), entries(static_cast<std::size_t>(dim_) * dim_) {}

  int dim;
  std::vector<McEstimate> entries;

  McEstimate& at(int row, int col) { return entries[static_cast<std::size_t>(row) * dim + col]; }
  const McEstimate& at(int row, int col) const {
    return entries[static_cast<std::size_t>(row) * dim + col];
  }
};

/// Summaries of one simulated two-outcome replicate.  Draw order: shared
/// treatment subjects (bivariate), outcome-a-only, outcome-b-only, then the
/// control arm in the same pattern.
struct TwoOutcomeReplicate {
  GroupSummary treatment_a;
  GroupSummary control_a;
  GroupSummary treatment_b;
  GroupSummary control_b;
  double pooled_sd_a;
  double pooled_sd_b;
};
TwoOutcomeReplicate simulate_two_outcome_study(const SimConfig& config, long replicate_index);

/// Summaries of one simulated multi-arm replicate.  Draw order: control arm,
/// then the treatment arms in design order; all groups share sigma.
struct MultiArmReplicate {
  GroupSummary control;
  std::vector<GroupSummary> arms;
  double pooled_sd;
};
MultiArmReplicate simulate_multiarm_study(const SimConfig& config, long replicate_index);

/// Hedges' g vector of one replicate (two entries for a two-outcome design,
/// one per arm for a multi-arm design).
std::vector<double> replicate_g(const SimConfig& config, long replicate_index);

/// Per-coordinate means and the full covariance matrix of a replicate-level
/// vector statistic, with jackknife standard errors over fixed batches.
struct VectorMoments {
  std::vector<McEstimate> mean;
  McMatrix covariance;
};

/// Moments of the per-replicate Hedges' g vector.
VectorMoments empirical_g_moments(const SimConfig& config);

/// Sample covariance matrix of the per-replicate g vectors.
McMatrix empirical_cov_g(const SimConfig& config);

/// Moments of the per-replicate mean differences (no SD division).
VectorMoments empirical_md_moments(const SimConfig& config);

/// Moments of the pooled SD of a multi-arm design: E(s^2), Var(s^2), E(1/s),
/// E(1/s^2).
struct PooledSdMoments {
  McEstimate mean_square;
  McEstimate var_square;
  McEstimate mean_inverse;
  McEstimate mean_inverse_square;
};
PooledSdMoments pooled_sd_moments(const SimConfig& config);

/// k estimate for a two-outcome design:
/// Cov(s_a^2, s_b^2) / (rho^2 sigma_a^2 sigma_b^2).  Unidentifiable at rho=0.
McEstimate estimate_k(const SimConfig& config);

/// One compared matrix entry: analytic value against the simulation estimate.
struct ValidationEntry {
  int row;
  int col;
  double analytic;
  double mc_value;
  double mc_std_error;
  double z;
  bool pass;
};

struct MethodValidation {
  Method method;
  std::vector<ValidationEntry> entries;
  bool pass;
};

struct ValidationReport {
  std::vector<MethodValidation> methods;
  McMatrix mc_cov;
  long replicates;
  double tolerance_se;
  bool pass;
};

/// Compare one analytic matrix against simulation estimates entry by entry.
MethodValidation check_against(Method method, const CovMatrix& analytic, const McMatrix& mc,
                               double tolerance_se);

/// Run the simulation once and score every requested method against it.
/// Two-outcome designs with partial overlap, rho != 0 and no explicit k get
/// k estimated from an independent seed substream first.
ValidationReport validate(const SimConfig& config, const std::vector<Method>& methods,
                          double tolerance_se);

}  // namespace metacov::mc
