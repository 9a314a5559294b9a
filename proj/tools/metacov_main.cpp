// metacov: within-study covariance matrices for standardized mean
// differences (Hedges' g), with a built-in simulation oracle.
//
// Subcommands:
//   compute   effect sizes + covariance matrices from study summary CSVs
//   simulate  draw replicate summaries (or aggregated moments) from a design
//   validate  score analytic covariances against the simulation oracle
//
// Exit codes: 0 success / validation pass, 1 validation failure,
//             2 input error, 3 computation error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metacov/engine.hpp"
#include "metacov/io.hpp"
#include "metacov/mc_oracle.hpp"

namespace {

constexpr int kExitValidationFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitComputeError = 3;

// Computation-stage failure (as opposed to malformed input).
struct ComputeError : std::runtime_error {
  explicit ComputeError(const std::string& what) : std::runtime_error(what) {}
};

std::ifstream open_input(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw metacov::io::ParseError("cannot open '" + path + "' for reading");
  }
  return file;
}

class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::out | std::ios::trunc);
      if (!file_) {
        throw metacov::io::ParseError("cannot open '" + path + "' for writing");
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string replicate_id(long index) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "rep%08ld", index + 1);
  return buf;
}

struct ComputeOptions {
  std::string studies;
  std::string pairs;
  std::string method;
  std::string scenario;
  std::string mode = "plugin";
  std::string output = "-";
};

struct SimulateOptions {
  std::string config;
  long replicates = 0;
  std::uint64_t seed = 1;
  std::string emit = "summaries";
  std::string output = "-";
  std::string pairs_output;
};

struct ValidateOptions {
  std::string config;
  std::vector<std::string> methods;
  long replicates = 0;
  std::uint64_t seed = 1;
  double tolerance_se = 3.0;
};

int run_compute(const ComputeOptions& options) {
  using namespace metacov;
  const Method method = io::parse_method(options.method);
  const ParamMode mode = io::parse_mode(options.mode);
  OutputTarget output(options.output);

  if (options.scenario == "multi-arm") {
    if (method == Method::two_outcome) {
      throw io::ParseError("method two-outcome requires --scenario multi-outcome");
    }
    if (!options.pairs.empty()) {
      throw io::ParseError("--pairs applies only to --scenario multi-outcome");
    }
    auto studies_file = open_input(options.studies);
    const auto studies = io::parse_multiarm_studies(studies_file, mode, options.studies);
    for (const auto& named : studies) {
      try {
        const StudyEffects result = assemble_cov_matrix(named.study, method, mode);
        io::write_study_record(output.stream(), named.study_id, method, options.scenario, mode,
                               result.effects, result.cov);
      } catch (const std::exception& e) {
        throw ComputeError("study '" + named.study_id + "': " + e.what());
      }
    }
    return 0;
  }
  if (options.scenario == "multi-outcome") {
    if (method != Method::two_outcome) {
      throw io::ParseError("--scenario multi-outcome requires --method two-outcome");
    }
    if (options.pairs.empty()) {
      throw io::ParseError("--scenario multi-outcome requires --pairs");
    }
    auto studies_file = open_input(options.studies);
    auto pairs_file = open_input(options.pairs);
    const auto studies = io::parse_two_outcome_studies(studies_file, pairs_file, mode,
                                                       options.studies, options.pairs);
    for (const auto& named : studies) {
      try {
        const StudyEffects result = assemble_cov_matrix(named.study, method, mode);
        io::write_study_record(output.stream(), named.study_id, method, options.scenario, mode,
                               result.effects, result.cov);
      } catch (const std::exception& e) {
        throw ComputeError("study '" + named.study_id + "': " + e.what());
      }
    }
    return 0;
  }
  throw io::ParseError("unknown scenario '" + options.scenario + "'");
}

int run_simulate(const SimulateOptions& options) {
  using namespace metacov;
  auto config_file = open_input(options.config);
  const io::DesignConfig design = io::parse_design_config(config_file, options.config);
  if (options.replicates < mc::kMinReplicates) {
    throw io::ParseError("replicates must be at least " + std::to_string(mc::kMinReplicates));
  }
  const mc::SimConfig config(design.design, options.replicates, options.seed, design.noise);
  OutputTarget output(options.output);

  if (options.emit == "matrix") {
    io::write_moments_record(output.stream(), design.scenario, config,
                             mc::empirical_g_moments(config));
    return 0;
  }

  if (design.scenario == "multi-arm") {
    io::write_multiarm_summary_header(output.stream());
    for (long r = 0; r < config.replicates; ++r) {
      io::write_multiarm_summary_rows(output.stream(), replicate_id(r),
                                      mc::simulate_multiarm_study(config, r));
    }
    return 0;
  }
  if (options.pairs_output.empty()) {
    throw io::ParseError("multi-outcome summaries need --pairs-output");
  }
  OutputTarget pairs_output(options.pairs_output);
  io::write_two_outcome_summary_header(output.stream());
  io::write_pairs_header(pairs_output.stream());
  const auto& two_design = std::get<TwoOutcomeStudy>(config.design);
  for (long r = 0; r < config.replicates; ++r) {
    const std::string study_id = replicate_id(r);
    io::write_two_outcome_summary_rows(output.stream(), study_id,
                                       mc::simulate_two_outcome_study(config, r));
    io::write_pairs_row(pairs_output.stream(), study_id, two_design);
  }
  return 0;
}

int run_validate(const ValidateOptions& options) {
  using namespace metacov;
  auto config_file = open_input(options.config);
  const io::DesignConfig design = io::parse_design_config(config_file, options.config);
  if (options.replicates < mc::kMinReplicates) {
    throw io::ParseError("replicates must be at least " + std::to_string(mc::kMinReplicates));
  }
  std::vector<Method> methods;
  for (const std::string& name : options.methods) {
    const Method method = io::parse_method(name);
    const bool multiarm_method = method != Method::two_outcome;
    if (multiarm_method != (design.scenario == "multi-arm")) {
      throw io::ParseError("method " + name + " does not apply to scenario " + design.scenario);
    }
    methods.push_back(method);
  }
  const mc::SimConfig config(design.design, options.replicates, options.seed, design.noise);
  const mc::ValidationReport report = mc::validate(config, methods, options.tolerance_se);
  io::write_validation_report(std::cout, report, design.scenario, options.seed);
  return report.pass ? 0 : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"within-study covariance matrices for standardized mean differences"};
  app.require_subcommand(1);

  ComputeOptions compute_options;
  CLI::App* compute = app.add_subcommand(
      "compute", "Effect sizes and covariance matrices from study summary CSVs");
  compute->add_option("--studies", compute_options.studies, "studies CSV path")->required();
  compute->add_option("--pairs", compute_options.pairs,
                      "pairs CSV path (multi-outcome scenario)");
  compute->add_option("--method", compute_options.method, "novel | wei | two-outcome")
      ->required();
  compute->add_option("--scenario", compute_options.scenario, "multi-arm | multi-outcome")
      ->required();
  compute->add_option("--mode", compute_options.mode, "truth | plugin (default plugin)");
  compute->add_option("--output", compute_options.output, "output path or - for stdout");

  SimulateOptions simulate_options;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Draw replicate summaries from a truth design");
  simulate->add_option("--config", simulate_options.config, "design config path")->required();
  simulate->add_option("--replicates", simulate_options.replicates, "number of replicates")
      ->required();
  simulate->add_option("--seed", simulate_options.seed, "master seed (default 1)");
  simulate->add_option("--emit", simulate_options.emit,
                       "summaries | matrix (default summaries)");
  simulate->add_option("--output", simulate_options.output, "output path or - for stdout");
  simulate->add_option("--pairs-output", simulate_options.pairs_output,
                       "pairs CSV path (multi-outcome summaries)");

  ValidateOptions validate_options;
  CLI::App* validate = app.add_subcommand(
      "validate", "Score analytic covariances against the simulation oracle");
  validate->add_option("--config", validate_options.config, "design config path")->required();
  validate
      ->add_option("--methods", validate_options.methods,
                   "comma-separated list of novel | wei | two-outcome")
      ->required()
      ->delimiter(',');
  validate->add_option("--replicates", validate_options.replicates, "number of replicates")
      ->required();
  validate->add_option("--seed", validate_options.seed, "master seed (default 1)");
  validate->add_option("--tolerance-se", validate_options.tolerance_se,
                       "pass threshold in MC standard errors (default 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (compute->parsed()) return run_compute(compute_options);
    if (simulate->parsed()) return run_simulate(simulate_options);
    return run_validate(validate_options);
  } catch (const metacov::io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputeError;
  }
}
