#pragma once

// Command-line front end: `run`, `bound` and `repro` subcommands plus the
// CSV / JSON writers they share.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "satisfice/simulation.hpp"
#include "satisfice/theory.hpp"

namespace satisfice::cli {

inline constexpr std::string_view kCsvHeader =
    "experiment_id,policy,step,accuracy,mean_regret,bound";

struct ResultRow {
  std::string experiment_id;
  std::string policy;
  Count step = 0;
  double accuracy = 0.0;
  double mean_regret = 0.0;
  std::optional<double> bound;
};

// Shortest round-trip decimal, independent of the global locale.
std::string format_number(double value);

std::vector<ResultRow> to_rows(std::string_view experiment_id,
                               std::string_view policy,
                               std::span<const StepAggregate> aggregates);

// Orders rows by (experiment_id, policy, step).
void sort_rows(std::vector<ResultRow>& rows);

// Writes each comment as a `# ` line, then the header and rows, `\n` endings.
void write_csv(std::ostream& out, std::span<const ResultRow> rows,
               std::span<const std::string> comments);

nlohmann::json rows_json(std::span<const ResultRow> rows);

// Keys: arms, phi, gap, per_arm_limit, total. Infinite phi becomes null.
nlohmann::json bound_report_json(const BoundReport& report);

// FNV-1a over the canonical description, as 16 hex digits.
std::string config_hash(std::string_view canonical);

// Stable `key=value;...` description of an experiment. `schedule` describes
// a variable aspiration schedule, which the config cannot print itself.
std::string canonical_config(const ExperimentConfig& config,
                             std::string_view schedule = {});

enum class Figure { kFig1, kFig2, kFig3 };
enum class Scale { kPaper, kDesk };

struct ReproExperiment {
  std::string experiment_id;
  std::string policy_label;
  ExperimentConfig config;
};

// Experiments behind one figure. Desk scale caps the horizon at 1e5 and uses
// 200 runs; paper scale uses 1000 runs.
std::vector<ReproExperiment> repro_plan(Figure figure, Scale scale,
                                        std::uint64_t seed, unsigned threads);

// Runs every experiment of a plan and returns sorted rows.
std::vector<ResultRow> run_plan(std::span<const ReproExperiment> plan);

// Entry point. args excludes the program name. Returns the process exit code:
// 0 success, 1 runtime failure, 2 usage or configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace satisfice::cli
