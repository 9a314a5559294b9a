#include "metacov/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <span>
#include <thread>
#include <utility>

namespace metacov::mc {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
// Seed-space tag separating validate's internal k estimation from the main
// replicate stream.
constexpr std::uint64_t kKEstimateTag = 0x6b2d657374696d61ULL;

/// Running mean and centered sum of squares (Welford).
struct RunningStats {
  long count = 0;
  double mean = 0.0;
  double sum_sq = 0.0;  // (n-1) * sample variance

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / count;
    sum_sq += delta * (x - mean);
  }

  double sd() const { return std::sqrt(sum_sq / (count - 1)); }
};

GroupSummary to_summary(const RunningStats& stats) {
  return GroupSummary(static_cast<int>(stats.count), stats.mean, stats.sd());
}

/// Pooled sums over one replicate batch: count, per-coordinate sums and the
/// packed lower triangle of cross-product sums.  Means and covariances of
/// the replicate vectors are smooth functions of these, which is what the
/// leave-one-batch-out jackknife differentiates.
struct MomentSums {
  explicit MomentSums(int width)
      : count(0), sum(width, 0.0), cross(static_cast<std::size_t>(width) * (width + 1) / 2, 0.0) {}

  long count;
  std::vector<double> sum;
  std::vector<double> cross;

  void add(std::span<const double> obs) {
    ++count;
    std::size_t k = 0;
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += obs[i];
      for (std::size_t j = 0; j <= i; ++j) {
        cross[k++] += obs[i] * obs[j];
      }
    }
  }

  void merge(const MomentSums& other) {
    count += other.count;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += other.sum[i];
    for (std::size_t i = 0; i < cross.size(); ++i) cross[i] += other.cross[i];
  }

  MomentSums minus(const MomentSums& other) const {
    MomentSums out(*this);
    out.count -= other.count;
    for (std::size_t i = 0; i < sum.size(); ++i) out.sum[i] -= other.sum[i];
    for (std::size_t i = 0; i < cross.size(); ++i) out.cross[i] -= other.cross[i];
    return out;
  }

  double cross_at(int i, int j) const {
    if (j > i) std::swap(i, j);
    return cross[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
  }

  double mean_of(int i) const { return sum[i] / count; }

  double cov_of(int i, int j) const {
    return (cross_at(i, j) - sum[i] * sum[j] / count) / (count - 1);
  }
};

/// Batch-resolved sums plus the jackknife estimator over them.
class BatchedMoments {
 public:
  BatchedMoments(int width, std::vector<MomentSums> batches)
      : total_(width), batches_(std::move(batches)) {
    for (const MomentSums& batch : batches_) total_.merge(batch);
  }

  McEstimate estimate(const std::function<double(const MomentSums&)>& stat) const {
    const double full = stat(total_);
    const int n_batches = static_cast<int>(batches_.size());
    std::vector<double> leave_out(n_batches);
    double mean_out = 0.0;
    for (int b = 0; b < n_batches; ++b) {
      leave_out[b] = stat(total_.minus(batches_[b]));
      mean_out += leave_out[b];
    }
    mean_out /= n_batches;
    double sq = 0.0;
    for (double value : leave_out) {
      sq += (value - mean_out) * (value - mean_out);
    }
    const double se = std::sqrt((n_batches - 1.0) / n_batches * sq);
    return {full, se, total_.count};
  }

 private:
  MomentSums total_;
  std::vector<MomentSums> batches_;
};

/// Run the observer over every replicate, accumulating into the fixed batch
/// partition.  Batches are claimed by worker threads through a counter, but
/// every batch's content depends only on the replicate indices it covers, so
/// the result is independent of thread count and scheduling.
BatchedMoments accumulate_replicates(
    const SimConfig& config, int width,
    const std::function<void(long, std::span<double>)>& observe) {
  const int n_batches = kJackknifeBatches;
  const long replicates = config.replicates;
  std::vector<MomentSums> batches(n_batches, MomentSums(width));

  std::atomic<int> next_batch{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    std::vector<double> buffer(width);
    for (;;) {
      const int b = next_batch.fetch_add(1);
      if (b >= n_batches) return;
      try {
        MomentSums local(width);
        const long lo = replicates * static_cast<long>(b) / n_batches;
        const long hi = replicates * static_cast<long>(b + 1) / n_batches;
        for (long r = lo; r < hi; ++r) {
          observe(r, buffer);
          local.add(buffer);
        }
        batches[b] = std::move(local);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int n_threads = config.max_threads > 0 ? config.max_threads
                                         : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, n_batches);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return BatchedMoments(width, std::move(batches));
}

VectorMoments moments_from(const BatchedMoments& batched, int dim) {
  VectorMoments out{{}, McMatrix(dim)};
  out.mean.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    out.mean.push_back(batched.estimate([i](const MomentSums& s) { return s.mean_of(i); }));
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      const McEstimate entry =
          batched.estimate([i, j](const MomentSums& s) { return s.cov_of(i, j); });
      out.covariance.at(i, j) = entry;
      out.covariance.at(j, i) = entry;
    }
  }
  return out;
}

const TwoOutcomeStudy& two_outcome_design(const SimConfig& config, const char* who) {
  const auto* design = std::get_if<TwoOutcomeStudy>(&config.design);
  if (!design) {
    throw DomainError(std::string(who) + " needs a two-outcome design");
  }
  return *design;
}

const MultiArmStudy& multiarm_design(const SimConfig& config, const char* who) {
  const auto* design = std::get_if<MultiArmStudy>(&config.design);
  if (!design) {
    throw DomainError(std::string(who) + " needs a multi-arm design");
  }
  return *design;
}

/// Simulate one arm of a two-outcome replicate: shared subjects first with
/// correlated pairs, then the per-outcome tails with independent draws.
void simulate_shared_arm(NoiseStream& noise, const GroupSummary& group_a,
                         const GroupSummary& group_b, int overlap, double rho,
                         double rho_complement, RunningStats& stats_a, RunningStats& stats_b) {
  for (int i = 0; i < overlap; ++i) {
    const double z1 = noise.next();
    const double z2 = noise.next();
    stats_a.add(group_a.mean + group_a.sd * z1);
    stats_b.add(group_b.mean + group_b.sd * (rho * z1 + rho_complement * z2));
  }
  for (int i = overlap; i < group_a.n; ++i) {
    stats_a.add(group_a.mean + group_a.sd * noise.next());
  }
  for (int i = overlap; i < group_b.n; ++i) {
    stats_b.add(group_b.mean + group_b.sd * noise.next());
  }
}

}  // namespace

std::uint64_t scramble64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return scramble64(scramble64(master_seed) ^ index);
}

std::uint64_t SplitMix64::next() noexcept {
  state_ += kGolden;
  return scramble64(state_);
}

double SplitMix64::next_unit() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double NoiseStream::next() {
  if (model_ == NoiseModel::shifted_exponential) {
    // Exp(1) - 1: mean 0, variance 1, skewness 2.
    return -std::log1p(-rng_.next_unit()) - 1.0;
  }
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = rng_.next_unit();
  const double u2 = rng_.next_unit();
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

SimConfig::SimConfig(std::variant<TwoOutcomeStudy, MultiArmStudy> design_, long replicates_,
                     std::uint64_t master_seed_, NoiseModel noise_)
    : design(std::move(design_)),
      replicates(replicates_),
      master_seed(master_seed_),
      noise(noise_) {
  if (replicates < kMinReplicates) {
    throw DomainError("replicates must be at least " + std::to_string(kMinReplicates) +
                      ", got " + std::to_string(replicates));
  }
}

TwoOutcomeReplicate simulate_two_outcome_study(const SimConfig& config, long replicate_index) {
  const TwoOutcomeStudy& design = two_outcome_design(config, "simulate_two_outcome_study");
  NoiseStream noise(substream_seed(config.master_seed, static_cast<std::uint64_t>(replicate_index)),
                    config.noise);
  const double rho = design.rho();
  const double rho_complement = std::sqrt((1.0 - rho) * (1.0 + rho));

  RunningStats treatment_a, treatment_b, control_a, control_b;
  simulate_shared_arm(noise, design.outcome_a().treatment, design.outcome_b().treatment,
                      design.overlap_treatment(), rho, rho_complement, treatment_a, treatment_b);
  simulate_shared_arm(noise, design.outcome_a().control, design.outcome_b().control,
                      design.overlap_control(), rho, rho_complement, control_a, control_b);

  const long df_a = treatment_a.count + control_a.count - 2;
  const long df_b = treatment_b.count + control_b.count - 2;
  return TwoOutcomeReplicate{
      to_summary(treatment_a),
      to_summary(control_a),
      to_summary(treatment_b),
      to_summary(control_b),
      std::sqrt((treatment_a.sum_sq + control_a.sum_sq) / df_a),
      std::sqrt((treatment_b.sum_sq + control_b.sum_sq) / df_b),
  };
}

MultiArmReplicate simulate_multiarm_study(const SimConfig& config, long replicate_index) {
  const MultiArmStudy& design = multiarm_design(config, "simulate_multiarm_study");
  NoiseStream noise(substream_seed(config.master_seed, static_cast<std::uint64_t>(replicate_index)),
                    config.noise);
  const double sigma = design.sigma();

  RunningStats control;
  for (int i = 0; i < design.control().n; ++i) {
    control.add(design.control().mean + sigma * noise.next());
  }
  double pooled_sum_sq = control.sum_sq;
  long df = control.count - 1;

  std::vector<GroupSummary> arms;
  arms.reserve(design.arms().size());
  for (const GroupSummary& arm : design.arms()) {
    RunningStats stats;
    for (int i = 0; i < arm.n; ++i) {
      stats.add(arm.mean + sigma * noise.next());
    }
    pooled_sum_sq += stats.sum_sq;
    df += stats.count - 1;
    arms.push_back(to_summary(stats));
  }
  return MultiArmReplicate{to_summary(control), std::move(arms),
                           std::sqrt(pooled_sum_sq / df)};
}

std::vector<double> replicate_g(const SimConfig& config, long replicate_index) {
  if (std::holds_alternative<TwoOutcomeStudy>(config.design)) {
    const TwoOutcomeStudy& design = std::get<TwoOutcomeStudy>(config.design);
    const double j_a = bias_correction(degrees_of_freedom(design.outcome_a()));
    const double j_b = bias_correction(degrees_of_freedom(design.outcome_b()));
    const TwoOutcomeReplicate rep = simulate_two_outcome_study(config, replicate_index);
    return {j_a * (rep.treatment_a.mean - rep.control_a.mean) / rep.pooled_sd_a,
            j_b * (rep.treatment_b.mean - rep.control_b.mean) / rep.pooled_sd_b};
  }
  const MultiArmStudy& design = std::get<MultiArmStudy>(config.design);
  const double j = bias_correction(degrees_of_freedom(design));
  const MultiArmReplicate rep = simulate_multiarm_study(config, replicate_index);
  std::vector<double> g;
  g.reserve(rep.arms.size());
  for (const GroupSummary& arm : rep.arms) {
    g.push_back(j * (arm.mean - rep.control.mean) / rep.pooled_sd);
  }
  return g;
}

VectorMoments empirical_g_moments(const SimConfig& config) {
  if (std::holds_alternative<TwoOutcomeStudy>(config.design)) {
    const TwoOutcomeStudy& design = std::get<TwoOutcomeStudy>(config.design);
    const double j_a = bias_correction(degrees_of_freedom(design.outcome_a()));
    const double j_b = bias_correction(degrees_of_freedom(design.outcome_b()));
    auto observe = [&config, j_a, j_b](long r, std::span<double> out) {
      const TwoOutcomeReplicate rep = simulate_two_outcome_study(config, r);
      out[0] = j_a * (rep.treatment_a.mean - rep.control_a.mean) / rep.pooled_sd_a;
      out[1] = j_b * (rep.treatment_b.mean - rep.control_b.mean) / rep.pooled_sd_b;
    };
    return moments_from(accumulate_replicates(config, 2, observe), 2);
  }
  const MultiArmStudy& design = std::get<MultiArmStudy>(config.design);
  const double j = bias_correction(degrees_of_freedom(design));
  const int dim = static_cast<int>(design.arms().size());
  auto observe = [&config, j](long r, std::span<double> out) {
    const MultiArmReplicate rep = simulate_multiarm_study(config, r);
    for (std::size_t i = 0; i < rep.arms.size(); ++i) {
      out[i] = j * (rep.arms[i].mean - rep.control.mean) / rep.pooled_sd;
    }
  };
  return moments_from(accumulate_replicates(config, dim, observe), dim);
}

McMatrix empirical_cov_g(const SimConfig& config) {
  return empirical_g_moments(config).covariance;
}

VectorMoments empirical_md_moments(const SimConfig& config) {
  if (std::holds_alternative<TwoOutcomeStudy>(config.design)) {
    auto observe = [&config](long r, std::span<double> out) {
      const TwoOutcomeReplicate rep = simulate_two_outcome_study(config, r);
      out[0] = rep.treatment_a.mean - rep.control_a.mean;
      out[1] = rep.treatment_b.mean - rep.control_b.mean;
    };
    return moments_from(accumulate_replicates(config, 2, observe), 2);
  }
  const MultiArmStudy& design = std::get<MultiArmStudy>(config.design);
  const int dim = static_cast<int>(design.arms().size());
  auto observe = [&config](long r, std::span<double> out) {
    const MultiArmReplicate rep = simulate_multiarm_study(config, r);
    for (std::size_t i = 0; i < rep.arms.size(); ++i) {
      out[i] = rep.arms[i].mean - rep.control.mean;
    }
  };
  return moments_from(accumulate_replicates(config, dim, observe), dim);
}

PooledSdMoments pooled_sd_moments(const SimConfig& config) {
  multiarm_design(config, "pooled_sd_moments");
  // Tracked per replicate: s^2, 1/s, 1/s^2; Var(s^2) falls out of the
  // cross-product sums.
  auto observe = [&config](long r, std::span<double> out) {
    const MultiArmReplicate rep = simulate_multiarm_study(config, r);
    const double s = rep.pooled_sd;
    out[0] = s * s;
    out[1] = 1.0 / s;
    out[2] = 1.0 / (s * s);
  };
  const BatchedMoments batched = accumulate_replicates(config, 3, observe);
  return PooledSdMoments{
      batched.estimate([](const MomentSums& s) { return s.mean_of(0); }),
      batched.estimate([](const MomentSums& s) { return s.cov_of(0, 0); }),
      batched.estimate([](const MomentSums& s) { return s.mean_of(1); }),
      batched.estimate([](const MomentSums& s) { return s.mean_of(2); }),
  };
}

McEstimate estimate_k(const SimConfig& config) {
  const TwoOutcomeStudy& design = two_outcome_design(config, "estimate_k");
  if (design.rho() == 0.0) {
    throw UnidentifiableError("k is unidentifiable at rho = 0 (the scaled covariance vanishes)");
  }
  const double sigma_a = pooled_sd(design.outcome_a());
  const double sigma_b = pooled_sd(design.outcome_b());
  const double denom =
      design.rho() * design.rho() * sigma_a * sigma_a * sigma_b * sigma_b;
  auto observe = [&config](long r, std::span<double> out) {
    const TwoOutcomeReplicate rep = simulate_two_outcome_study(config, r);
    out[0] = rep.pooled_sd_a * rep.pooled_sd_a;
    out[1] = rep.pooled_sd_b * rep.pooled_sd_b;
  };
  const BatchedMoments batched = accumulate_replicates(config, 2, observe);
  return batched.estimate([denom](const MomentSums& s) { return s.cov_of(0, 1) / denom; });
}

MethodValidation check_against(Method method, const CovMatrix& analytic, const McMatrix& mc,
                               double tolerance_se) {
  if (analytic.dim() != mc.dim) {
    throw DomainError("check_against: dimension mismatch");
  }
  MethodValidation out{method, {}, true};
  for (int i = 0; i < analytic.dim(); ++i) {
    for (int j = 0; j <= i; ++j) {
      const McEstimate& estimate = mc.at(i, j);
      const double value = analytic(i, j);
      double z;
      if (estimate.std_error > 0.0) {
        z = (value - estimate.value) / estimate.std_error;
      } else {
        z = value == estimate.value ? 0.0 : std::numeric_limits<double>::infinity();
      }
      const bool pass = std::fabs(z) <= tolerance_se;
      out.entries.push_back({i, j, value, estimate.value, estimate.std_error, z, pass});
      out.pass = out.pass && pass;
    }
  }
  return out;
}

ValidationReport validate(const SimConfig& config, const std::vector<Method>& methods,
                          double tolerance_se) {
  if (!(tolerance_se > 0.0)) {
    throw DomainError("validate: tolerance must be positive");
  }
  const VectorMoments moments = empirical_g_moments(config);

  std::variant<TwoOutcomeStudy, MultiArmStudy> design = config.design;
  if (auto* two = std::get_if<TwoOutcomeStudy>(&design)) {
    const bool needs_k = two->rho() != 0.0 && !two->k_factor() && !two->full_overlap();
    if (needs_k) {
      SimConfig k_config = config;
      k_config.master_seed = scramble64(config.master_seed ^ kKEstimateTag);
      const double k = estimate_k(k_config).value;
      *two = TwoOutcomeStudy(two->outcome_a(), two->outcome_b(), two->overlap_treatment(),
                             two->overlap_control(), two->rho(), k);
    }
  }

  ValidationReport report{{}, moments.covariance, config.replicates, tolerance_se, true};
  for (Method method : methods) {
    const CovMatrix analytic = std::visit(
        [method](const auto& study) {
          return assemble_cov_matrix(study, method, ParamMode::truth).cov;
        },
        design);
    MethodValidation scored = check_against(method, analytic, moments.covariance, tolerance_se);
    report.pass = report.pass && scored.pass;
    report.methods.push_back(std::move(scored));
  }
  return report;
}

}  // namespace metacov::mc
