#include "metacov/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

namespace metacov::io {
namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void fail_at(const std::string& source, std::size_t row, const std::string& column,
                          const std::string& message) {
  throw ParseError(source + " row " + std::to_string(row) + ", column '" + column +
                   "': " + message);
}

long parse_integer(const std::string& field, const std::string& source, std::size_t row,
                   const std::string& column) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    fail_at(source, row, column, "expected an integer, got '" + field + "'");
  }
  return value;
}

double parse_real(const std::string& field, const std::string& source, std::size_t row,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty() || !std::isfinite(value)) {
    fail_at(source, row, column, "expected a finite number, got '" + field + "'");
  }
  return value;
}

struct CsvReader {
  CsvReader(std::istream& in, std::vector<std::string> expected_header, std::string source_name)
      : stream(in), header(std::move(expected_header)), source(std::move(source_name)) {
    std::string line;
    if (!std::getline(stream, line)) {
      throw ParseError(source + ": empty file, expected header '" + join(header) + "'");
    }
    if (split(trim_line(line), ',') != header) {
      throw ParseError(source + ": header must be exactly '" + join(header) + "'");
    }
    row = 1;
  }

  /// Next data row, or false at end of input.  Trailing blank lines are
  /// tolerated; short or long rows are not.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(stream, line)) {
      ++row;
      line = trim_line(line);
      if (line.empty()) continue;
      fields = split(line, ',');
      if (fields.size() != header.size()) {
        throw ParseError(source + " row " + std::to_string(row) + ": expected " +
                         std::to_string(header.size()) + " fields, got " +
                         std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  static std::string trim_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  static std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    return out;
  }

  std::istream& stream;
  std::vector<std::string> header;
  std::string source;
  std::size_t row = 1;
};

int parse_group_size(const std::string& field, const std::string& source, std::size_t row,
                     const std::string& column) {
  const long n = parse_integer(field, source, row, column);
  if (n < 2) {
    fail_at(source, row, column, "group size must be an integer >= 2, got '" + field + "'");
  }
  return static_cast<int>(n);
}

double parse_sd(const std::string& field, const std::string& source, std::size_t row,
                const std::string& column) {
  const double sd = parse_real(field, source, row, column);
  if (!(sd > 0.0)) {
    fail_at(source, row, column, "sd must be positive, got '" + field + "'");
  }
  return sd;
}

std::string escape_json(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void write_double_array(std::ostream& out, const std::vector<double>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_double(values[i]);
  }
  out << ']';
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Method parse_method(const std::string& text) {
  if (text == "novel") return Method::multi_arm_novel;
  if (text == "wei") return Method::multi_arm_wei;
  if (text == "two-outcome") return Method::two_outcome;
  throw ParseError("unknown method '" + text + "' (expected novel, wei or two-outcome)");
}

ParamMode parse_mode(const std::string& text) {
  if (text == "truth") return ParamMode::truth;
  if (text == "plugin") return ParamMode::plugin;
  throw ParseError("unknown mode '" + text + "' (expected truth or plugin)");
}

const char* to_string(ParamMode mode) noexcept {
  return mode == ParamMode::truth ? "truth" : "plugin";
}

mc::NoiseModel parse_noise(const std::string& text) {
  if (text == "normal") return mc::NoiseModel::gaussian;
  if (text == "shifted-exponential") return mc::NoiseModel::shifted_exponential;
  throw ParseError("unknown generator '" + text + "' (expected normal or shifted-exponential)");
}

const char* to_string(mc::NoiseModel noise) noexcept {
  return noise == mc::NoiseModel::gaussian ? "normal" : "shifted-exponential";
}

std::vector<NamedMultiArmStudy> parse_multiarm_studies(std::istream& in, ParamMode mode,
                                                       const std::string& source) {
  CsvReader reader(in, {"study_id", "arm_id", "n", "mean", "sd"}, source);

  struct Builder {
    std::optional<GroupSummary> control;
    std::vector<GroupSummary> arms;
    std::vector<std::string> arm_ids;
    std::size_t first_row = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Builder> builders;

  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::string study_id = trim(fields[0]);
    const std::string arm_id = trim(fields[1]);
    if (study_id.empty()) fail_at(source, reader.row, "study_id", "must not be empty");
    if (arm_id.empty()) fail_at(source, reader.row, "arm_id", "must not be empty");
    const int n = parse_group_size(fields[2], source, reader.row, "n");
    const double mean = parse_real(fields[3], source, reader.row, "mean");
    const double sd = parse_sd(fields[4], source, reader.row, "sd");

    if (!builders.count(study_id)) {
      order.push_back(study_id);
      builders[study_id].first_row = reader.row;
    }
    Builder& builder = builders[study_id];
    if (arm_id == "control") {
      if (builder.control) {
        fail_at(source, reader.row, "arm_id",
                "study '" + study_id + "' has more than one control row");
      }
      builder.control.emplace(n, mean, sd);
    } else {
      if (std::find(builder.arm_ids.begin(), builder.arm_ids.end(), arm_id) !=
          builder.arm_ids.end()) {
        fail_at(source, reader.row, "arm_id",
                "duplicate arm '" + arm_id + "' in study '" + study_id + "'");
      }
      builder.arm_ids.push_back(arm_id);
      builder.arms.emplace_back(n, mean, sd);
    }
  }

  std::vector<NamedMultiArmStudy> studies;
  studies.reserve(order.size());
  for (const std::string& study_id : order) {
    Builder& builder = builders[study_id];
    if (!builder.control) {
      throw ParseError(source + ": study '" + study_id + "' has no control arm");
    }
    if (builder.arms.empty()) {
      throw ParseError(source + ": study '" + study_id + "' has no treatment arms");
    }
    std::optional<double> sigma;
    if (mode == ParamMode::truth) {
      sigma = builder.control->sd;
      for (const GroupSummary& arm : builder.arms) {
        if (arm.sd != *sigma) {
          throw ParseError(source + ": study '" + study_id +
                           "': truth mode requires one common sd across all arms");
        }
      }
    }
    try {
      studies.push_back({study_id, MultiArmStudy(*builder.control, builder.arms, sigma)});
    } catch (const DomainError& e) {
      throw ParseError(source + ": study '" + study_id + "': " + e.what());
    }
  }
  if (studies.empty()) {
    throw ParseError(source + ": no study rows");
  }
  return studies;
}

std::vector<NamedTwoOutcomeStudy> parse_two_outcome_studies(std::istream& studies_in,
                                                            std::istream& pairs_in, ParamMode mode,
                                                            const std::string& studies_source,
                                                            const std::string& pairs_source) {
  CsvReader reader(studies_in, {"study_id", "outcome_id", "arm", "n", "mean", "sd"},
                   studies_source);

  struct OutcomeSlot {
    std::optional<GroupSummary> treatment;
    std::optional<GroupSummary> control;
  };
  struct Builder {
    std::vector<std::string> outcome_ids;
    std::map<std::string, OutcomeSlot> outcomes;
  };
  std::vector<std::string> order;
  std::map<std::string, Builder> builders;

  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::string study_id = trim(fields[0]);
    const std::string outcome_id = trim(fields[1]);
    const std::string arm = trim(fields[2]);
    if (study_id.empty()) fail_at(studies_source, reader.row, "study_id", "must not be empty");
    if (outcome_id.empty()) fail_at(studies_source, reader.row, "outcome_id", "must not be empty");
    if (arm != "t" && arm != "c") {
      fail_at(studies_source, reader.row, "arm", "must be 't' or 'c', got '" + arm + "'");
    }
    const int n = parse_group_size(fields[3], studies_source, reader.row, "n");
    const double mean = parse_real(fields[4], studies_source, reader.row, "mean");
    const double sd = parse_sd(fields[5], studies_source, reader.row, "sd");

    if (!builders.count(study_id)) order.push_back(study_id);
    Builder& builder = builders[study_id];
    if (!builder.outcomes.count(outcome_id)) {
      builder.outcome_ids.push_back(outcome_id);
      if (builder.outcome_ids.size() > 2) {
        fail_at(studies_source, reader.row, "outcome_id",
                "study '" + study_id + "' has more than two outcomes");
      }
    }
    OutcomeSlot& slot = builder.outcomes[outcome_id];
    std::optional<GroupSummary>& target = arm == "t" ? slot.treatment : slot.control;
    if (target) {
      fail_at(studies_source, reader.row, "arm",
              "duplicate row for study '" + study_id + "', outcome '" + outcome_id + "', arm '" +
                  arm + "'");
    }
    target.emplace(n, mean, sd);
  }
  for (const std::string& study_id : order) {
    const Builder& builder = builders[study_id];
    if (builder.outcome_ids.size() != 2) {
      throw ParseError(studies_source + ": study '" + study_id + "' needs exactly two outcomes");
    }
    for (const auto& [outcome_id, slot] : builder.outcomes) {
      if (!slot.treatment || !slot.control) {
        throw ParseError(studies_source + ": study '" + study_id + "', outcome '" + outcome_id +
                         "': both arms (t and c) are required");
      }
      if (mode == ParamMode::truth && slot.treatment->sd != slot.control->sd) {
        throw ParseError(studies_source + ": study '" + study_id + "', outcome '" + outcome_id +
                         "': truth mode requires one common sd per outcome");
      }
    }
  }
  if (order.empty()) {
    throw ParseError(studies_source + ": no study rows");
  }

  // Pairs table: orientation (outcome_a, outcome_b) comes from here.
  CsvReader pairs(pairs_in,
                  {"study_id", "outcome_a", "outcome_b", "rho", "overlap_t", "overlap_c", "k"},
                  pairs_source);
  struct PairRow {
    std::string outcome_a;
    std::string outcome_b;
    double rho;
    int overlap_t;
    int overlap_c;
    std::optional<double> k;
  };
  std::map<std::string, PairRow> pair_rows;
  while (pairs.next(fields)) {
    const std::string study_id = trim(fields[0]);
    if (!builders.count(study_id)) {
      fail_at(pairs_source, pairs.row, "study_id", "unknown study '" + study_id + "'");
    }
    if (pair_rows.count(study_id)) {
      fail_at(pairs_source, pairs.row, "study_id",
              "duplicate pairs row for study '" + study_id + "'");
    }
    PairRow row;
    row.outcome_a = trim(fields[1]);
    row.outcome_b = trim(fields[2]);
    const Builder& builder = builders[study_id];
    for (const std::string* outcome : {&row.outcome_a, &row.outcome_b}) {
      if (!builder.outcomes.count(*outcome)) {
        fail_at(pairs_source, pairs.row, "outcome_a",
                "study '" + study_id + "' has no outcome '" + *outcome + "'");
      }
    }
    if (row.outcome_a == row.outcome_b) {
      fail_at(pairs_source, pairs.row, "outcome_b", "outcomes must differ");
    }
    row.rho = parse_real(fields[3], pairs_source, pairs.row, "rho");
    const long overlap_t = parse_integer(fields[4], pairs_source, pairs.row, "overlap_t");
    const long overlap_c = parse_integer(fields[5], pairs_source, pairs.row, "overlap_c");
    row.overlap_t = static_cast<int>(overlap_t);
    row.overlap_c = static_cast<int>(overlap_c);
    const std::string k_field = trim(fields[6]);
    if (!k_field.empty()) {
      row.k = parse_real(k_field, pairs_source, pairs.row, "k");
    }
    pair_rows.emplace(study_id, std::move(row));
  }

  std::vector<NamedTwoOutcomeStudy> out;
  out.reserve(order.size());
  for (const std::string& study_id : order) {
    const auto found = pair_rows.find(study_id);
    if (found == pair_rows.end()) {
      throw ParseError(pairs_source + ": missing pairs row for study '" + study_id + "'");
    }
    const PairRow& row = found->second;
    const Builder& builder = builders.at(study_id);
    const OutcomeSlot& slot_a = builder.outcomes.at(row.outcome_a);
    const OutcomeSlot& slot_b = builder.outcomes.at(row.outcome_b);
    try {
      out.push_back({study_id, TwoOutcomeStudy({*slot_a.treatment, *slot_a.control},
                                               {*slot_b.treatment, *slot_b.control},
                                               row.overlap_t, row.overlap_c, row.rho, row.k)});
    } catch (const DomainError& e) {
      throw ParseError(pairs_source + ": study '" + study_id + "': " + e.what());
    }
  }
  (void)mode;
  return out;
}

DesignConfig parse_design_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::vector<std::string>> values;
  std::vector<std::string> key_order;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source + " line " + std::to_string(row) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError(source + " line " + std::to_string(row) + ": expected 'key = value'");
    }
    if (!values.count(key)) key_order.push_back(key);
    values[key].push_back(value);
  }

  auto take_single = [&](const std::string& key) -> std::optional<std::string> {
    const auto found = values.find(key);
    if (found == values.end()) return std::nullopt;
    if (found->second.size() != 1) {
      throw ParseError(source + ": key '" + key + "' given more than once");
    }
    return found->second.front();
  };
  auto require_single = [&](const std::string& key) -> std::string {
    const auto value = take_single(key);
    if (!value) throw ParseError(source + ": missing required key '" + key + "'");
    return *value;
  };
  auto tokens_of = [&](const std::string& key, const std::string& value,
                       std::size_t expected) -> std::vector<std::string> {
    std::istringstream stream(value);
    std::vector<std::string> tokens;
    std::string token;
    while (stream >> token) tokens.push_back(token);
    if (tokens.size() != expected) {
      throw ParseError(source + ": key '" + key + "' expects " + std::to_string(expected) +
                       " values, got '" + value + "'");
    }
    return tokens;
  };
  auto number_of = [&](const std::string& key, const std::string& token) {
    return parse_real(token, source, 0, key);
  };
  auto count_of = [&](const std::string& key, const std::string& token) {
    const long n = parse_integer(token, source, 0, key);
    return static_cast<int>(n);
  };

  const std::string scenario = require_single("scenario");
  mc::NoiseModel noise = mc::NoiseModel::gaussian;
  if (const auto generator = take_single("generator")) {
    noise = parse_noise(*generator);
  }

  std::vector<std::string> allowed;
  if (scenario == "multi-arm") {
    allowed = {"scenario", "generator", "sigma", "control", "arm"};
  } else if (scenario == "multi-outcome") {
    allowed = {"scenario", "generator", "rho", "overlap_t", "overlap_c",
               "outcome_a", "outcome_b", "k"};
  } else {
    throw ParseError(source + ": scenario must be multi-arm or multi-outcome, got '" + scenario +
                     "'");
  }
  for (const std::string& key : key_order) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(source + ": unknown key '" + key + "' for scenario " + scenario);
    }
  }

  try {
    if (scenario == "multi-arm") {
      const double sigma = number_of("sigma", require_single("sigma"));
      const auto control_tokens = tokens_of("control", require_single("control"), 2);
      const GroupSummary control(count_of("control", control_tokens[0]),
                                 number_of("control", control_tokens[1]), sigma);
      const auto arm_lines = values.find("arm");
      if (arm_lines == values.end()) {
        throw ParseError(source + ": missing required key 'arm'");
      }
      std::vector<GroupSummary> arms;
      for (const std::string& value : arm_lines->second) {
        const auto tokens = tokens_of("arm", value, 2);
        arms.emplace_back(count_of("arm", tokens[0]), number_of("arm", tokens[1]), sigma);
      }
      return DesignConfig{MultiArmStudy(control, std::move(arms), sigma), noise, scenario};
    }

    auto outcome_of = [&](const std::string& key) {
      const auto tokens = tokens_of(key, require_single(key), 5);
      const double sigma = number_of(key, tokens[4]);
      return OutcomePair{
          GroupSummary(count_of(key, tokens[0]), number_of(key, tokens[1]), sigma),
          GroupSummary(count_of(key, tokens[2]), number_of(key, tokens[3]), sigma)};
    };
    const OutcomePair outcome_a = outcome_of("outcome_a");
    const OutcomePair outcome_b = outcome_of("outcome_b");
    const double rho = number_of("rho", require_single("rho"));
    const int overlap_t = count_of("overlap_t", require_single("overlap_t"));
    const int overlap_c = count_of("overlap_c", require_single("overlap_c"));
    std::optional<double> k;
    if (const auto k_value = take_single("k")) {
      k = number_of("k", *k_value);
    }
    return DesignConfig{TwoOutcomeStudy(outcome_a, outcome_b, overlap_t, overlap_c, rho, k),
                        noise, scenario};
  } catch (const DomainError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

void write_study_record(std::ostream& out, const std::string& study_id, Method method,
                        const std::string& scenario, ParamMode mode, const EffectVector& effects,
                        const CovMatrix& cov) {
  out << "{\"study_id\":\"" << escape_json(study_id) << "\",\"scenario\":\"" << scenario
      << "\",\"method\":\"" << to_string(method) << "\",\"mode\":\"" << to_string(mode)
      << "\",\"v\":" << effects.df.value() << ",\"j_factor\":" << format_double(effects.j_factor)
      << ",\"g\":";
  write_double_array(out, effects.g);
  out << ",\"cov\":";
  write_double_array(out, cov.row_major());
  out << "}\n";
}

void write_moments_record(std::ostream& out, const std::string& scenario,
                          const mc::SimConfig& config, const mc::VectorMoments& moments) {
  const int dim = moments.covariance.dim;
  std::vector<double> mean, mean_se, cov, cov_se;
  for (const mc::McEstimate& estimate : moments.mean) {
    mean.push_back(estimate.value);
    mean_se.push_back(estimate.std_error);
  }
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      cov.push_back(moments.covariance.at(r, c).value);
      cov_se.push_back(moments.covariance.at(r, c).std_error);
    }
  }
  out << "{\"record\":\"empirical_g_moments\",\"scenario\":\"" << scenario
      << "\",\"replicates\":" << config.replicates << ",\"seed\":" << config.master_seed
      << ",\"generator\":\"" << to_string(config.noise) << "\",\"dim\":" << dim << ",\"mean_g\":";
  write_double_array(out, mean);
  out << ",\"mean_g_se\":";
  write_double_array(out, mean_se);
  out << ",\"cov_g\":";
  write_double_array(out, cov);
  out << ",\"cov_g_se\":";
  write_double_array(out, cov_se);
  out << "}\n";
}

void write_validation_report(std::ostream& out, const mc::ValidationReport& report,
                             const std::string& scenario, std::uint64_t seed) {
  out << "validation scenario=" << scenario << " replicates=" << report.replicates
      << " seed=" << seed << " tolerance_se=" << format_double(report.tolerance_se) << "\n";
  if (report.methods.empty()) {
    out << "overall PASS\n";
    return;
  }
  const std::size_t n_entries = report.methods.front().entries.size();
  for (std::size_t e = 0; e < n_entries; ++e) {
    const mc::ValidationEntry& lead = report.methods.front().entries[e];
    out << "entry=(" << lead.row << "," << lead.col << ") mc=" << format_double(lead.mc_value)
        << " se=" << format_double(lead.mc_std_error);
    for (const mc::MethodValidation& scored : report.methods) {
      const mc::ValidationEntry& entry = scored.entries[e];
      out << " | method=" << to_string(scored.method)
          << " analytic=" << format_double(entry.analytic) << " z=" << format_double(entry.z)
          << (entry.pass ? " pass" : " FAIL");
    }
    out << "\n";
  }
  for (const mc::MethodValidation& scored : report.methods) {
    std::size_t n_pass = 0;
    for (const mc::ValidationEntry& entry : scored.entries) {
      n_pass += entry.pass ? 1 : 0;
    }
    out << "method=" << to_string(scored.method) << " entries_pass=" << n_pass << "/"
        << scored.entries.size() << " -> " << (scored.pass ? "PASS" : "FAIL") << "\n";
  }
  out << "overall " << (report.pass ? "PASS" : "FAIL") << "\n";
}

void write_multiarm_summary_header(std::ostream& out) { out << "study_id,arm_id,n,mean,sd\n"; }

void write_multiarm_summary_rows(std::ostream& out, const std::string& study_id,
                                 const mc::MultiArmReplicate& replicate) {
  out << study_id << ",control," << replicate.control.n << ','
      << format_double(replicate.control.mean) << ',' << format_double(replicate.control.sd)
      << '\n';
  for (std::size_t i = 0; i < replicate.arms.size(); ++i) {
    const GroupSummary& arm = replicate.arms[i];
    out << study_id << ",arm" << i + 1 << ',' << arm.n << ',' << format_double(arm.mean) << ','
        << format_double(arm.sd) << '\n';
  }
}

void write_two_outcome_summary_header(std::ostream& out) {
  out << "study_id,outcome_id,arm,n,mean,sd\n";
}

void write_two_outcome_summary_rows(std::ostream& out, const std::string& study_id,
                                    const mc::TwoOutcomeReplicate& replicate) {
  auto write_row = [&](const char* outcome, const char* arm, const GroupSummary& group) {
    out << study_id << ',' << outcome << ',' << arm << ',' << group.n << ','
        << format_double(group.mean) << ',' << format_double(group.sd) << '\n';
  };
  write_row("a", "t", replicate.treatment_a);
  write_row("a", "c", replicate.control_a);
  write_row("b", "t", replicate.treatment_b);
  write_row("b", "c", replicate.control_b);
}

void write_pairs_header(std::ostream& out) {
  out << "study_id,outcome_a,outcome_b,rho,overlap_t,overlap_c,k\n";
}

void write_pairs_row(std::ostream& out, const std::string& study_id,
                     const TwoOutcomeStudy& design) {
  out << study_id << ",a,b," << format_double(design.rho()) << ',' << design.overlap_treatment()
      << ',' << design.overlap_control() << ','
      << (design.k_factor() ? format_double(*design.k_factor()) : "") << '\n';
}

}  // namespace metacov::io
