#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "casc/cascade.hpp"
#include "casc/evaluation.hpp"
#include "casc/features.hpp"
#include "casc/graph.hpp"
#include "casc/regression.hpp"
#include "casc/synthgen.hpp"

namespace casc {

// Resolved run configuration shared by every subcommand. Validation
// happens before any file is touched.
struct PipelineConfig {
  std::string graph_path;
  std::string cascades_path;
  std::string features_path;  // output of `features`, input of fit/eval/bins
  std::string out_dir;        // coefficients, reports, bin CSVs
  std::string report_path;    // explicit report target for `eval`

  FeatureConfig feat;
  double train_frac = 0.75;
  std::uint64_t seed = 42;
  std::vector<ModelVariant> variants{ModelVariant::Baseline, ModelVariant::WithDensity,
                                     ModelVariant::WithDepth};
  OrphanPolicy orphan_policy = OrphanPolicy::ReparentToRoot;
  unsigned threads = 0;  // 0: hardware concurrency
  int density_bins = 10;
  bool clamp_predictions = false;  // floor predictions at p(t_i) when scoring

  EdgeFileFormat graph_fmt;
  CascadeFileFormat cascade_fmt;
};

void validate(const PipelineConfig& cfg);

// Prints the resolved configuration, one key per line.
void print_config(const PipelineConfig& cfg, std::ostream& os);

// Every command throws ConfigError / DataError / NumericError; the CLI
// maps those to exit codes. `log` receives progress and summary lines.

// Load the graph and/or cascade file and report ingestion stats.
void cmd_ingest_check(const PipelineConfig& cfg, std::ostream& log);

// Stream cascades against the graph and write the feature TSV. Only the
// graph and a bounded window of cascades are ever resident.
void cmd_features(const PipelineConfig& cfg, std::ostream& log);

// Fit requested variants on the train split, persist coefficient files.
void cmd_fit(const PipelineConfig& cfg, std::ostream& log);

// Score persisted coefficients on the test split; refuses coefficients
// whose config fingerprint does not match the feature file.
void cmd_eval(const PipelineConfig& cfg, std::ostream& log);

// Fit + eval with one shared split; writes coefficients and report.
void cmd_fit_eval(const PipelineConfig& cfg, std::ostream& log);

// Bin summaries per axis (CSV) and Spearman coefficients on stdout.
void cmd_bins(const PipelineConfig& cfg, std::ostream& log, std::ostream& results);

// Generate a synthetic corpus (graph.tsv, cascades.tsv, truth.tsv).
void cmd_simulate(const PipelineConfig& cfg, const SynthConfig& synth, std::ostream& log);

}  // namespace casc
