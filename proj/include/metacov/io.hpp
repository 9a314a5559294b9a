#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "metacov/engine.hpp"
#include "metacov/mc_oracle.hpp"

namespace metacov::io {

/// Malformed input (CSV schema, config file, flag values).  Messages carry
/// source name plus row/column diagnostics where applicable.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// 17 significant digits; round-trips every double exactly.
std::string format_double(double value);

Method parse_method(const std::string& text);     // "novel" | "wei" | "two-outcome"
ParamMode parse_mode(const std::string& text);    // "truth" | "plugin"
const char* to_string(ParamMode mode) noexcept;
mc::NoiseModel parse_noise(const std::string& text);  // "normal" | "shifted-exponential"
const char* to_string(mc::NoiseModel noise) noexcept;

// ---------------------------------------------------------------------------
// Studies tables.
//
// multi-arm schema:     study_id,arm_id,n,mean,sd        (arm_id "control"
//                       reserved; exactly one control row per study)
// multi-outcome schema: study_id,outcome_id,arm,n,mean,sd (arm is t or c;
//                       exactly two outcomes per study, both arms each)
// pairs schema:         study_id,outcome_a,outcome_b,rho,overlap_t,overlap_c,k
//                       (k may be empty; one row per study, required)
//
// Headers are mandatory and matched exactly; unknown columns are rejected.
// ---------------------------------------------------------------------------

struct NamedMultiArmStudy {
  std::string study_id;
  MultiArmStudy study;
};
std::vector<NamedMultiArmStudy> parse_multiarm_studies(std::istream& in, ParamMode mode,
                                                       const std::string& source);

struct NamedTwoOutcomeStudy {
  std::string study_id;
  TwoOutcomeStudy study;
};
std::vector<NamedTwoOutcomeStudy> parse_two_outcome_studies(std::istream& studies,
                                                            std::istream& pairs, ParamMode mode,
                                                            const std::string& studies_source,
                                                            const std::string& pairs_source);

// ---------------------------------------------------------------------------
// Simulation design configs: `key = value` lines, '#' comments.
//
// multi-arm:     scenario = multi-arm; sigma = S; control = N MEAN;
//                arm = N MEAN (one line per treatment arm)
// multi-outcome: scenario = multi-outcome; rho = R; overlap_t = N;
//                overlap_c = N; outcome_a = NT MT NC MC SD;
//                outcome_b = NT MT NC MC SD; k = K (optional)
// either:        generator = normal | shifted-exponential (optional)
// ---------------------------------------------------------------------------

struct DesignConfig {
  std::variant<TwoOutcomeStudy, MultiArmStudy> design;
  mc::NoiseModel noise;
  std::string scenario;  // "multi-arm" | "multi-outcome"
};
DesignConfig parse_design_config(std::istream& in, const std::string& source);

// ---------------------------------------------------------------------------
// Writers.  All floating-point output uses format_double.
// ---------------------------------------------------------------------------

/// One study result as a single JSON line.
void write_study_record(std::ostream& out, const std::string& study_id, Method method,
                        const std::string& scenario, ParamMode mode, const EffectVector& effects,
                        const CovMatrix& cov);

/// Aggregated simulation moments as a single JSON line.
void write_moments_record(std::ostream& out, const std::string& scenario,
                          const mc::SimConfig& config, const mc::VectorMoments& moments);

/// Human-readable (and grep-friendly) validation report.
void write_validation_report(std::ostream& out, const mc::ValidationReport& report,
                             const std::string& scenario, std::uint64_t seed);

// CSV emission of simulated summaries; output round-trips through the
// parsers above.
void write_multiarm_summary_header(std::ostream& out);
void write_multiarm_summary_rows(std::ostream& out, const std::string& study_id,
                                 const mc::MultiArmReplicate& replicate);
void write_two_outcome_summary_header(std::ostream& out);
void write_two_outcome_summary_rows(std::ostream& out, const std::string& study_id,
                                    const mc::TwoOutcomeReplicate& replicate);
void write_pairs_header(std::ostream& out);
void write_pairs_row(std::ostream& out, const std::string& study_id,
                     const TwoOutcomeStudy& design);

}  // namespace metacov::io
