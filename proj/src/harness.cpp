#include "linbandit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "linbandit/parallel.hpp"

namespace linbandit {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string qualified(const std::string& section, const std::string& key) {
  return section + "." + key;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("invalid integer for key '" + key + "': '" + text + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    throw ConfigError("invalid number for key '" + key + "': '" + text + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean for key '" + key + "': '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char separator) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, separator)) {
    part = trim(part);
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

Eigen::VectorXd parse_vector(const std::string& key, const std::string& text) {
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  const auto parts = split(normalized, ' ');
  if (parts.empty()) throw ConfigError("empty vector for key '" + key + "'");
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = parse_double(key, parts[i]);
  }
  return v;
}

SetSpec parse_env(const std::string& key, const std::string& text) {
  const auto spec = parse_set_spec(trim(text));
  if (!spec) throw ConfigError("invalid action-set generator for key '" + key + "': '" + text + "'");
  return *spec;
}

NoiseKind parse_noise(const std::string& key, const std::string& text) {
  const auto kind = parse_noise_kind(trim(text));
  if (!kind) throw ConfigError("invalid noise law for key '" + key + "': '" + text + "'");
  return *kind;
}

PolicyKind parse_kind(const std::string& key, const std::string& text) {
  const auto kind = parse_policy_kind(trim(text));
  if (!kind) throw ConfigError("invalid policy kind for key '" + key + "': '" + text + "'");
  return *kind;
}

void parse_experiment(const pt::ptree& section, ExperimentConfig& config) {
  for (const auto& [key, node] : section) {
    const std::string name = qualified("experiment", key);
    const std::string& value = node.data();
    if (key == "dim") {
      config.dim = parse_int<Eigen::Index>(name, value);
    } else if (key == "horizon") {
      config.horizon = parse_int<std::int64_t>(name, value);
    } else if (key == "replications") {
      config.replications = parse_int<std::int64_t>(name, value);
    } else if (key == "seed") {
      config.seed = parse_int<std::uint64_t>(name, value);
    } else if (key == "threads") {
      config.threads = parse_int<int>(name, value);
    } else if (key == "env") {
      config.sets = parse_env(name, value);
    } else if (key == "arms") {
      config.sets.arms.clear();
      for (const auto& arm : split(value, '|')) config.sets.arms.push_back(parse_vector(name, arm));
    } else if (key == "noise") {
      config.noise = parse_noise(name, value);
    } else if (key == "theta") {
      const std::string mode = trim(value);
      if (mode == "uniform_sphere") {
        config.theta_mode = ThetaMode::kUniformSphere;
      } else if (mode == "uniform_ball") {
        config.theta_mode = ThetaMode::kUniformBall;
      } else if (mode == "fixed") {
        config.theta_mode = ThetaMode::kFixed;
      } else {
        throw ConfigError("invalid theta mode for key '" + name + "': '" + value + "'");
      }
    } else if (key == "theta_value") {
      config.theta = parse_vector(name, value);
    } else if (key == "output") {
      config.output = trim(value);
    } else {
      throw ConfigError("unknown key '" + name + "'");
    }
  }
}

PolicySpec parse_policy(const std::string& label, const pt::ptree& section) {
  PolicySpec spec;
  spec.label = label;
  const std::string prefix = "policy:" + label;
  bool kind_given = false;
  for (const auto& [key, node] : section) {
    const std::string name = qualified(prefix, key);
    const std::string& value = node.data();
    if (key == "kind") {
      spec.config.kind = parse_kind(name, value);
      kind_given = true;
    } else if (key == "constant_c") {
      spec.config.bonus_constant = parse_double(name, value);
    } else if (key == "smooth") {
      spec.config.schedule.smooth = parse_bool(name, value);
    } else if (key == "oful_delta") {
      spec.config.oful_delta = parse_double(name, value);
    } else if (key == "argmax_slack") {
      if (trim(value) == "auto") {
        spec.config.argmax_slack.reset();
      } else {
        spec.config.argmax_slack = parse_double(name, value);
      }
    } else if (key == "restarts") {
      spec.config.restarts = parse_int<int>(name, value);
    } else if (key == "max_iterations") {
      spec.config.max_iterations = parse_int<long>(name, value);
    } else {
      throw ConfigError("unknown key '" + name + "'");
    }
  }
  if (!kind_given) {
    // The label doubles as the kind when it names one.
    if (const auto kind = parse_policy_kind(label)) {
      spec.config.kind = *kind;
    } else {
      throw ConfigError("missing key '" + qualified(prefix, "kind") + "'");
    }
  }
  return spec;
}

void parse_elliptical(const pt::ptree& section, EllipticalConfig& config) {
  for (const auto& [key, node] : section) {
    const std::string name = qualified("elliptical", key);
    const std::string& value = node.data();
    if (key == "trials") {
      config.trials = parse_int<std::int64_t>(name, value);
    } else if (key == "horizon") {
      config.horizon = parse_int<std::int64_t>(name, value);
    } else if (key == "dim") {
      config.dim = parse_int<Eigen::Index>(name, value);
    } else if (key == "seed") {
      config.seed = parse_int<std::uint64_t>(name, value);
    } else if (key == "tolerance") {
      config.tolerance = parse_double(name, value);
    } else {
      throw ConfigError("unknown key '" + name + "'");
    }
  }
}

void parse_tail(const pt::ptree& section, TailConfig& config) {
  for (const auto& [key, node] : section) {
    const std::string name = qualified("tail", key);
    const std::string& value = node.data();
    if (key == "delta") {
      config.delta = parse_double(name, value);
    } else if (key == "replications") {
      config.replications = parse_int<std::int64_t>(name, value);
    } else if (key == "round") {
      config.round = parse_int<std::int64_t>(name, value);
    } else if (key == "dim") {
      config.dim = parse_int<Eigen::Index>(name, value);
    } else if (key == "seed") {
      config.seed = parse_int<std::uint64_t>(name, value);
    } else if (key == "noise") {
      config.noise = parse_noise(name, value);
    } else if (key == "ratio_limit") {
      config.ratio_limit = parse_double(name, value);
    } else {
      throw ConfigError("unknown key '" + name + "'");
    }
  }
}

void parse_scaling(const pt::ptree& section, ScalingConfig& config) {
  for (const auto& [key, node] : section) {
    const std::string name = qualified("scaling", key);
    const std::string& value = node.data();
    if (key == "dims") {
      config.dims.clear();
      for (const auto& part : split(value, ',')) config.dims.push_back(parse_int<Eigen::Index>(name, part));
    } else if (key == "horizons") {
      config.horizons.clear();
      for (const auto& part : split(value, ',')) {
        config.horizons.push_back(parse_int<std::int64_t>(name, part));
      }
    } else if (key == "replications") {
      config.replications = parse_int<std::int64_t>(name, value);
    } else if (key == "seed") {
      config.seed = parse_int<std::uint64_t>(name, value);
    } else if (key == "policy") {
      config.policy = parse_kind(name, value);
    } else if (key == "constant_c") {
      config.bonus_constant = parse_double(name, value);
    } else if (key == "env") {
      config.sets = parse_env(name, value);
    } else if (key == "noise") {
      config.noise = parse_noise(name, value);
    } else if (key == "ratio_limit") {
      config.ratio_limit = parse_double(name, value);
    } else {
      throw ConfigError("unknown key '" + name + "'");
    }
  }
}

bool valid_label(const std::string& label) {
  return !label.empty() && std::all_of(label.begin(), label.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

}  // namespace

void ExperimentConfig::finalize() {
  if (dim < 1) throw ConfigError("key 'experiment.dim' must be positive");
  if (horizon < 1) throw ConfigError("key 'experiment.horizon' must be positive");
  if (replications < 1) throw ConfigError("key 'experiment.replications' must be positive");
  if (threads < 0) throw ConfigError("key 'experiment.threads' must be nonnegative");
  scaling.threads = threads;
  if (policies.empty()) {
    policies.push_back({"vcl_ucb", PolicyConfig{}});
  }
  std::set<std::string> labels;
  for (auto& spec : policies) {
    if (!valid_label(spec.label)) {
      throw ConfigError("policy label '" + spec.label + "' must be alphanumeric, '_' or '-'");
    }
    if (!labels.insert(spec.label).second) {
      throw ConfigError("duplicate policy label '" + spec.label + "'");
    }
    // The level needs ln T > 0; a one-round run uses the T = 2 schedule.
    spec.config.schedule.horizon = std::max<std::int64_t>(horizon, 2);
    spec.config.schedule.dim = static_cast<std::int64_t>(dim);
    try {
      spec.config.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("section 'policy:" + spec.label + "': " + e.what());
    }
  }
  try {
    instance_spec().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("section 'experiment': ") + e.what());
  }
  try {
    elliptical.validate();
    tail.validate();
    scaling.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("section ") + e.what());
  }
}

InstanceSpec ExperimentConfig::instance_spec() const {
  InstanceSpec spec;
  spec.dim = dim;
  spec.horizon = horizon;
  spec.theta_mode = theta_mode;
  spec.theta = theta;
  spec.noise = noise;
  spec.sets = sets;
  return spec;
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  ExperimentConfig config;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw ConfigError("key '" + name + "' must live inside a section");
    }
    if (name == "experiment") {
      parse_experiment(section, config);
    } else if (name.rfind("policy:", 0) == 0) {
      config.policies.push_back(parse_policy(name.substr(7), section));
    } else if (name == "elliptical") {
      parse_elliptical(section, config.elliptical);
    } else if (name == "tail") {
      parse_tail(section, config.tail);
    } else if (name == "scaling") {
      parse_scaling(section, config.scaling);
    } else {
      throw ConfigError("unknown section '" + name + "'");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

ExperimentConfig default_config() {
  ExperimentConfig config;
  config.finalize();
  return config;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void aggregate(PolicyResult& result, Eigen::Index dim, std::int64_t horizon) {
  const std::size_t reps = result.records.size();
  const std::size_t rounds = static_cast<std::size_t>(horizon);
  result.mean_curve.assign(rounds, 0.0);
  result.q10_curve.assign(rounds, 0.0);
  result.q50_curve.assign(rounds, 0.0);
  result.q90_curve.assign(rounds, 0.0);
  result.final_regret.clear();
  result.unconverged_rounds = 0;

  std::vector<double> column(reps);
  for (std::size_t t = 0; t < rounds; ++t) {
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      column[r] = result.records[r][t].cumulative_regret;
      sum += column[r];
    }
    result.mean_curve[t] = sum / static_cast<double>(reps);
    result.q10_curve[t] = quantile(column, 0.1);
    result.q50_curve[t] = quantile(column, 0.5);
    result.q90_curve[t] = quantile(column, 0.9);
  }
  for (const auto& episode : result.records) {
    result.final_regret.push_back(episode.back().cumulative_regret);
    for (const auto& record : episode) result.unconverged_rounds += record.converged ? 0 : 1;
  }
  result.final_mean = result.mean_curve.back();
  result.final_median = result.q50_curve.back();
  result.final_q10 = result.q10_curve.back();
  result.final_q90 = result.q90_curve.back();
  const double t = static_cast<double>(std::max<std::int64_t>(horizon, 2));
  const double d = static_cast<double>(dim);
  result.normalized_median = result.final_median / std::sqrt(d * d * t * std::log(t));
}

RunResult run_experiment(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  config.finalize();
  const InstanceSpec spec = config.instance_spec();

  RunResult result;
  result.dim = config.dim;
  result.horizon = config.horizon;
  result.replications = config.replications;
  result.policies.resize(config.policies.size());
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    result.policies[p].label = config.policies[p].label;
    result.policies[p].kind = config.policies[p].config.kind;
    result.policies[p].records.resize(reps);
  }

  parallel_for(config.policies.size() * reps, config.threads, [&](std::size_t job) {
    const std::size_t p = job / reps;
    const std::size_t r = job % reps;
    const Instance instance(spec, replication_seed(config.seed, r + 1));
    Policy policy(config.policies[p].config, spec.dim, instance.seed());
    result.policies[p].records[r] = run_episode(instance, policy);
  });

  for (auto& policy : result.policies) aggregate(policy, config.dim, config.horizon);
  return result;
}

std::string format_double(double value) {
  char buffer[64];
  const int n = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(n));
}

RoundRow to_row(std::int64_t replication, const RoundRecord& record) {
  RoundRow row;
  row.replication = replication;
  row.t = record.t;
  row.omega = record.omega;
  row.alpha = record.alpha;
  row.action_norm = record.action.norm();
  row.reward = record.reward;
  row.instant_regret = record.instant_regret;
  row.cumulative_regret = record.cumulative_regret;
  row.converged = record.converged;
  return row;
}

void write_round_csv(std::ostream& out, const PolicyResult& result) {
  out << kRoundCsvHeader << '\n';
  for (std::size_t r = 0; r < result.records.size(); ++r) {
    for (const auto& record : result.records[r]) {
      const RoundRow row = to_row(static_cast<std::int64_t>(r + 1), record);
      out << row.replication << ',' << row.t << ',' << format_double(row.omega) << ','
          << format_double(row.alpha) << ',' << format_double(row.action_norm) << ','
          << format_double(row.reward) << ',' << format_double(row.instant_regret) << ','
          << format_double(row.cumulative_regret) << ',' << (row.converged ? 1 : 0) << '\n';
    }
  }
}

std::vector<RoundRow> read_round_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRoundCsvHeader) {
    throw std::runtime_error("read_round_csv: unexpected header");
  }
  std::vector<RoundRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw std::runtime_error("read_round_csv: malformed row '" + line + "'");
    auto number = [](const std::string& text) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::runtime_error("read_round_csv: bad number '" + text + "'");
      return v;
    };
    RoundRow row;
    row.replication = std::stoll(fields[0]);
    row.t = std::stoll(fields[1]);
    row.omega = number(fields[2]);
    row.alpha = number(fields[3]);
    row.action_norm = number(fields[4]);
    row.reward = number(fields[5]);
    row.instant_regret = number(fields[6]);
    row.cumulative_regret = number(fields[7]);
    row.converged = fields[8] == "1";
    rows.push_back(row);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const RunResult& result) {
  out << kSummaryCsvHeader << '\n';
  for (const auto& policy : result.policies) {
    out << policy.label << ',' << result.dim << ',' << result.horizon << ','
        << result.replications << ',' << format_double(policy.final_mean) << ','
        << format_double(policy.final_median) << ',' << format_double(policy.final_q10) << ','
        << format_double(policy.final_q90) << ',' << format_double(policy.normalized_median)
        << '\n';
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing output file '" + path.string() + "'");
}

}  // namespace

void write_outputs(const RunResult& result, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + directory.string() +
                             "': " + ec.message());
  }
  for (const auto& policy : result.policies) {
    const auto rounds_path = directory / (policy.label + "_rounds.csv");
    std::ofstream rounds = open_output(rounds_path);
    write_round_csv(rounds, policy);
    close_output(rounds, rounds_path);

    const auto curve_path = directory / (policy.label + "_curve.csv");
    std::ofstream curve = open_output(curve_path);
    curve << "t,mean,q10,q50,q90\n";
    for (std::size_t t = 0; t < policy.mean_curve.size(); ++t) {
      curve << (t + 1) << ',' << format_double(policy.mean_curve[t]) << ','
            << format_double(policy.q10_curve[t]) << ',' << format_double(policy.q50_curve[t])
            << ',' << format_double(policy.q90_curve[t]) << '\n';
    }
    close_output(curve, curve_path);
  }
  const auto summary_path = directory / "summary.csv";
  std::ofstream summary = open_output(summary_path);
  write_summary_csv(summary, result);
  close_output(summary, summary_path);
}

}  // namespace linbandit
