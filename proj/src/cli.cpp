#include "satisfice/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "CLI11.hpp"

namespace satisfice::cli {
namespace {

// Thrown for bad flags or inconsistent configuration; maps to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string join_numbers(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(values[i]);
  }
  return out;
}

struct RunOptions {
  std::string policy = "rs";
  std::vector<double> probs;
  std::size_t k = 0;
  bool random_probs = false;
  std::string aspiration;
  std::optional<double> rmin;
  std::optional<double> rmax;
  Count rperiod = 100;
  double c = 1e-5;
  std::optional<double> d;
  Count horizon = 100000;
  Count runs = 200;
  std::uint64_t seed = 42;
  std::string out;
  std::string log = "geometric";
  std::string format = "csv";
  std::string id = "run";
  std::string tie_break = "lowest";
  unsigned threads = 0;
};

// Triangle wave between r_min and r_max with the given period in steps.
AspirationSchedule triangle_schedule(double r_min, double r_max, Count period) {
  return AspirationSchedule::variable(
      [=](Count step) {
        const double phase = static_cast<double>((step - 1) % period) /
                             static_cast<double>(period);
        const double shape = 1.0 - std::abs(2.0 * phase - 1.0);
        return std::clamp(r_min + (r_max - r_min) * shape, r_min, r_max);
      },
      r_min, r_max);
}

ExperimentConfig build_config(const RunOptions& opt, std::string& schedule) {
  ExperimentConfig config;
  const auto kind = parse_policy(opt.policy);
  if (!kind) throw UsageError("unknown policy '" + opt.policy + "'");

  if (opt.random_probs) {
    if (!opt.probs.empty()) throw UsageError("--probs conflicts with --random-probs");
    if (opt.k < 2) throw UsageError("--random-probs needs --k >= 2");
    config.env = RandomProbs{opt.k};
  } else {
    if (opt.probs.empty()) throw UsageError("give --probs or --k with --random-probs");
    if (opt.k != 0 && opt.k != opt.probs.size()) {
      throw UsageError("--k does not match the number of --probs");
    }
    config.env = FixedProbs{opt.probs};
  }

  PolicySpec& policy = config.policy;
  policy.kind = *kind;
  policy.c = opt.c;
  policy.d = opt.d;
  if (opt.tie_break == "lowest") {
    policy.tie_break = TieBreak::kLowestIndex;
  } else if (opt.tie_break == "random") {
    policy.tie_break = TieBreak::kUniformRandom;
  } else {
    throw UsageError("--tie-break must be lowest or random");
  }

  const bool variable = opt.rmin.has_value() || opt.rmax.has_value();
  if (variable) {
    if (!opt.rmin || !opt.rmax) throw UsageError("--rmin and --rmax go together");
    if (!opt.aspiration.empty()) {
      throw UsageError("--aspiration conflicts with --rmin/--rmax");
    }
    if (opt.rperiod < 1) throw UsageError("--rperiod must be >= 1");
    policy.aspiration = triangle_schedule(*opt.rmin, *opt.rmax, opt.rperiod);
    schedule = "triangle[" + format_number(*opt.rmin) + "," +
               format_number(*opt.rmax) + "]/" + std::to_string(opt.rperiod);
  } else if (opt.aspiration.empty() || opt.aspiration == "optimal") {
    policy.aspiration = OptimalAspiration{};
  } else {
    double level = 0.0;
    const char* first = opt.aspiration.data();
    const char* last = first + opt.aspiration.size();
    const auto [ptr, ec] = std::from_chars(first, last, level);
    if (ec != std::errc() || ptr != last) {
      throw UsageError("--aspiration must be 'optimal' or a number");
    }
    policy.aspiration = ConstantAspiration{level};
  }

  config.horizon = opt.horizon;
  config.runs = opt.runs;
  config.base_seed = opt.seed;
  config.threads = opt.threads;
  if (opt.log == "geometric") {
    config.log = LogSchedule::geometric();
  } else if (opt.log == "all") {
    config.log = LogSchedule::every_step();
  } else {
    throw UsageError("--log must be geometric or all");
  }

  try {
    config.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return config;
}

// Opens `path` or falls back to `fallback` when the path is empty.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw std::runtime_error("cannot open output file " + path);
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  std::string schedule;
  ExperimentConfig config;
  try {
    config = build_config(opt, schedule);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::vector<StepAggregate> aggregates;
  try {
    aggregates = run_experiment(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  auto rows = to_rows(opt.id, opt.policy, aggregates);
  sort_rows(rows);
  const std::string canonical = canonical_config(config, schedule);
  try {
    OutputTarget target(opt.out, out);
    if (opt.format == "json") {
      nlohmann::json doc;
      doc["experiment_id"] = opt.id;
      doc["seed"] = config.base_seed;
      doc["config_hash"] = config_hash(canonical);
      doc["config"] = canonical;
      doc["rows"] = rows_json(rows);
      target.stream() << doc.dump(2) << '\n';
    } else {
      const std::vector<std::string> comments{
          "experiment_id=" + opt.id + " seed=" +
          std::to_string(config.base_seed) +
          " config_hash=" + config_hash(canonical) + " config=" + canonical};
      write_csv(target.stream(), rows, comments);
    }
    if (!target.stream()) throw std::runtime_error("write failed");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cmd_bound(const std::vector<double>& probs, std::optional<double> rmin,
              std::optional<double> rmax, std::ostream& out,
              std::ostream& err) {
  try {
    if (rmin.has_value() != rmax.has_value()) {
      throw UsageError("--rmin and --rmax go together");
    }
    BernoulliBandit env(probs);
    const BoundReport report =
        rmin ? regret_upper_bound_variable(env.probs(), *rmin, *rmax)
             : regret_upper_bound(env.probs());
    nlohmann::json doc = bound_report_json(report);
    if (rmin) {
      doc["r_min"] = *rmin;
      doc["r_max"] = *rmax;
    } else {
      doc["aspiration"] = optimal_aspiration(env.probs());
    }
    out << doc.dump(2) << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return 2;
}

int cmd_repro(const std::string& figure_name, const std::string& scale_name,
              std::uint64_t seed, const std::string& out_dir, unsigned threads,
              std::ostream& out, std::ostream& err) {
  Figure figure{};
  if (figure_name == "fig1") {
    figure = Figure::kFig1;
  } else if (figure_name == "fig2") {
    figure = Figure::kFig2;
  } else if (figure_name == "fig3") {
    figure = Figure::kFig3;
  } else {
    err << "error: figure must be fig1, fig2 or fig3\n";
    return 2;
  }
  Scale scale{};
  if (scale_name == "desk") {
    scale = Scale::kDesk;
  } else if (scale_name == "paper") {
    scale = Scale::kPaper;
  } else {
    err << "error: --scale must be desk or paper\n";
    return 2;
  }

  try {
    const auto plan = repro_plan(figure, scale, seed, threads);
    const auto rows = run_plan(plan);
    std::vector<std::string> comments;
    for (const auto& e : plan) {
      const std::string canonical = canonical_config(e.config);
      comments.push_back("experiment_id=" + e.experiment_id + " policy=" +
                         e.policy_label + " seed=" + std::to_string(seed) +
                         " config_hash=" + config_hash(canonical) +
                         " config=" + canonical);
    }
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / (figure_name + ".csv");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + path.string());
    write_csv(file, rows, comments);
    if (!file) throw std::runtime_error("write failed for " + path.string());
    out << path.string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::vector<ResultRow> to_rows(std::string_view experiment_id,
                               std::string_view policy,
                               std::span<const StepAggregate> aggregates) {
  std::vector<ResultRow> rows;
  rows.reserve(aggregates.size());
  for (const auto& a : aggregates) {
    rows.push_back({std::string(experiment_id), std::string(policy), a.step,
                    a.accuracy, a.mean_regret, a.bound});
  }
  return rows;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     return std::tie(a.experiment_id, a.policy, a.step) <
                            std::tie(b.experiment_id, b.policy, b.step);
                   });
}

void write_csv(std::ostream& out, std::span<const ResultRow> rows,
               std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment_id << ',' << r.policy << ',' << r.step << ','
        << format_number(r.accuracy) << ',' << format_number(r.mean_regret)
        << ',';
    if (r.bound) out << format_number(*r.bound);
    out << '\n';
  }
}

nlohmann::json rows_json(std::span<const ResultRow> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"experiment_id", r.experiment_id},
                   {"policy", r.policy},
                   {"step", r.step},
                   {"accuracy", r.accuracy},
                   {"mean_regret", r.mean_regret},
                   {"bound", r.bound ? nlohmann::json(*r.bound) : nullptr}});
  }
  return arr;
}

nlohmann::json bound_report_json(const BoundReport& report) {
  nlohmann::json phi = nlohmann::json::array();
  for (double p : report.phi) {
    phi.push_back(std::isinf(p) ? nlohmann::json(nullptr) : nlohmann::json(p));
  }
  return {{"arms", report.arms},
          {"phi", phi},
          {"gap", report.gap},
          {"per_arm_limit", report.per_arm_limit},
          {"total", report.total}};
}

std::string config_hash(std::string_view canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string canonical_config(const ExperimentConfig& config,
                             std::string_view schedule) {
  std::ostringstream os;
  if (const auto* fixed = std::get_if<FixedProbs>(&config.env)) {
    os << "env=fixed:" << join_numbers(fixed->probs);
  } else {
    os << "env=uniform:" << std::get<RandomProbs>(config.env).arms;
  }
  const PolicySpec& p = config.policy;
  os << ";policy=" << policy_name(p.kind) << ";aspiration=";
  if (std::holds_alternative<OptimalAspiration>(p.aspiration)) {
    os << "optimal";
  } else if (const auto* c = std::get_if<ConstantAspiration>(&p.aspiration)) {
    os << format_number(c->level);
  } else {
    const auto& s = std::get<AspirationSchedule>(p.aspiration);
    os << "variable[" << format_number(s.min()) << ',' << format_number(s.max())
       << ']';
    if (!schedule.empty()) os << ':' << schedule;
  }
  if (p.kind == PolicyKind::kEpsilonGreedy) {
    os << ";c=" << format_number(p.c)
       << ";d=" << (p.d ? format_number(*p.d) : std::string("gap"));
  }
  os << ";tie=" << (p.tie_break == TieBreak::kLowestIndex ? "lowest" : "random")
     << ";horizon=" << config.horizon << ";runs=" << config.runs
     << ";seed=" << config.base_seed;
  os << ";log=" << config.log.name();
  return os.str();
}

std::vector<ReproExperiment> repro_plan(Figure figure, Scale scale,
                                        std::uint64_t seed, unsigned threads) {
  const Count runs = scale == Scale::kPaper ? 1000 : 200;
  auto horizon = [&](Count paper_horizon) {
    return scale == Scale::kPaper ? paper_horizon
                                  : std::min<Count>(paper_horizon, 100000);
  };
  auto base = [&](EnvSpec env, Count paper_horizon) {
    ExperimentConfig c;
    c.env = std::move(env);
    c.horizon = horizon(paper_horizon);
    c.runs = runs;
    c.base_seed = seed;
    c.threads = threads;
    c.policy.kind = PolicyKind::kRS;
    c.policy.aspiration = OptimalAspiration{};
    return c;
  };

  std::vector<ReproExperiment> plan;
  switch (figure) {
    case Figure::kFig1:
      plan.push_back({"fig1_p0.51_0.49", "rs",
                      base(FixedProbs{{0.51, 0.49}}, 1000000)});
      plan.push_back({"fig1_p0.501_0.499", "rs",
                      base(FixedProbs{{0.501, 0.499}}, 1000000)});
      break;
    case Figure::kFig2:
      plan.push_back({"fig2_k10", "rs", base(RandomProbs{10}, 1000000)});
      break;
    case Figure::kFig3: {
      const ExperimentConfig rs = base(RandomProbs{100}, 10000);
      plan.push_back({"fig3_k100", "rs", rs});
      ExperimentConfig ucb = rs;
      ucb.policy.kind = PolicyKind::kUCB1Tuned;
      plan.push_back({"fig3_k100", "ucb1t", ucb});
      ExperimentConfig ps = rs;
      ps.policy.kind = PolicyKind::kPS;
      plan.push_back({"fig3_k100", "ps", ps});
      for (double c : {1e-6, 1e-5, 1e-4}) {
        ExperimentConfig eg = rs;
        eg.policy.kind = PolicyKind::kEpsilonGreedy;
        eg.policy.c = c;
        eg.policy.d.reset();
        plan.push_back({"fig3_k100", "egreedy_c" + format_number(c), eg});
      }
      break;
    }
  }
  return plan;
}

std::vector<ResultRow> run_plan(std::span<const ReproExperiment> plan) {
  std::vector<ResultRow> rows;
  for (const auto& e : plan) {
    const auto aggregates = run_experiment(e.config);
    auto part = to_rows(e.experiment_id, e.policy_label, aggregates);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  sort_rows(rows);
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Satisficing bandit simulations and regret bounds"};
  app.require_subcommand(1);
  // Only the top-level app reads config files; fallthrough lets --config
  // appear after the subcommand. Keys go under a [run] section.
  app.set_config("--config", "", "INI/TOML file; put run flags under [run]");
  app.fallthrough();

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment and print CSV");
  run->add_option("--policy", run_opt.policy, "rs, ps, greedy, ucb1, ucb1t, egreedy or s0");
  run->add_option("--probs", run_opt.probs, "Comma-separated reward probabilities")
      ->delimiter(',');
  run->add_option("--k", run_opt.k, "Number of arms");
  run->add_flag("--random-probs", run_opt.random_probs,
                "Draw probabilities uniformly on [0,1) per run");
  run->add_option("--aspiration", run_opt.aspiration,
                  "'optimal' (uses the true probabilities) or a constant R");
  run->add_option("--rmin", run_opt.rmin, "Lower bound of a triangle-wave R(t)");
  run->add_option("--rmax", run_opt.rmax, "Upper bound of a triangle-wave R(t)");
  run->add_option("--rperiod", run_opt.rperiod, "Period in steps of the R(t) wave");
  run->add_option("--c", run_opt.c, "epsilon_n-greedy c");
  run->add_option("--d", run_opt.d, "epsilon_n-greedy d (default: true gap)");
  run->add_option("--horizon", run_opt.horizon, "Steps per run");
  run->add_option("--runs", run_opt.runs, "Independent runs");
  run->add_option("--seed", run_opt.seed, "Base seed");
  run->add_option("--out", run_opt.out, "Output file (default stdout)");
  run->add_option("--log", run_opt.log, "geometric or all");
  run->add_option("--format", run_opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--id", run_opt.id, "experiment_id column value");
  run->add_option("--tie-break", run_opt.tie_break, "lowest or random");
  run->add_option("--threads", run_opt.threads, "Worker threads (0 = all cores)");

  std::vector<double> bound_probs;
  std::optional<double> bound_rmin;
  std::optional<double> bound_rmax;
  auto* bound = app.add_subcommand("bound", "Print the RS regret bound as JSON");
  bound->add_option("--probs", bound_probs, "Comma-separated reward probabilities")
      ->delimiter(',')
      ->required();
  bound->add_option("--rmin", bound_rmin, "Lower aspiration bound");
  bound->add_option("--rmax", bound_rmax, "Upper aspiration bound");

  std::string figure;
  std::string scale = "desk";
  std::uint64_t repro_seed = 42;
  std::string out_dir = ".";
  unsigned repro_threads = 0;
  auto* repro = app.add_subcommand("repro", "Regenerate a figure's CSV data");
  repro->add_option("figure", figure, "fig1, fig2 or fig3")->required();
  repro->add_option("--scale", scale, "desk or paper");
  repro->add_option("--seed", repro_seed, "Base seed");
  repro->add_option("--out-dir", out_dir, "Directory for <figure>.csv");
  repro->add_option("--threads", repro_threads, "Worker threads (0 = all cores)");

  std::vector<std::string> argv_storage{"satisfice"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  if (*run) return cmd_run(run_opt, out, err);
  if (*bound) return cmd_bound(bound_probs, bound_rmin, bound_rmax, out, err);
  return cmd_repro(figure, scale, repro_seed, out_dir, repro_threads, out, err);
}

}  // namespace satisfice::cli
