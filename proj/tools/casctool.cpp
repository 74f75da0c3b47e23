// casctool: reconstruct retweet cascades over a follower graph, extract
// early-adopter structural features (link density, diffusion depth), fit
// the three log-linear popularity models and evaluate them. All outputs
// are plain TSV/CSV with a config fingerprint header.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "casc/pipeline.hpp"
#include "casc/util.hpp"

namespace {

using casc::PipelineConfig;
using casc::SynthConfig;

// exit codes: 0 ok, 2 config error, 3 data error, 4 numerical error
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDataError = 3;
constexpr int kNumericError = 4;

struct FlagState {
  std::string variants = "all";
  std::string density_pairs = "ordered";
  std::string orphan_policy = "reparent";
  std::string graph_columns = "follower,followee";
};

void add_common_flags(CLI::App* cmd, PipelineConfig& cfg, FlagState& flags) {
  cmd->add_option("--ti", cfg.feat.t_i, "indicating time t_i in seconds")
      ->capture_default_str();
  cmd->add_option("--tr", cfg.feat.t_r, "reference time t_r in seconds")
      ->capture_default_str();
  cmd->add_option("--min-early", cfg.feat.min_early,
                  "minimum early popularity for a row to be included")
      ->capture_default_str();
  cmd->add_option("--density-pairs", flags.density_pairs,
                  "count possible links as ordered or unordered pairs")
      ->check(CLI::IsMember({"ordered", "unordered"}))
      ->capture_default_str();
  cmd->add_flag("--exclude-root", cfg.feat.exclude_root,
                "exclude the submitter from the density node set");
  cmd->add_option("--density-floor", cfg.feat.density_floor,
                  "ln-density floor for zero-link prefixes")
      ->capture_default_str();
  cmd->add_option("--train-frac", cfg.train_frac, "training fraction of the split")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "seed for the train/test split or the simulator")
      ->capture_default_str();
  cmd->add_option("--variants", flags.variants,
                  "comma list of baseline,with_density,with_depth (or 'all')")
      ->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "worker threads for feature extraction (0 = auto)")
      ->capture_default_str();
  cmd->add_option("--density-bins", cfg.density_bins, "equal-width bins over [0,1]")
      ->capture_default_str();
  cmd->add_flag("--clamp-predictions", cfg.clamp_predictions,
                "floor scored predictions at the observed early popularity");
  cmd->add_option("--orphan-policy", flags.orphan_policy,
                  "events with unknown parents: reparent to root, or drop")
      ->check(CLI::IsMember({"reparent", "drop"}))
      ->capture_default_str();
  // format adapter hooks
  cmd->add_option("--graph-delim", cfg.graph_fmt.delimiter, "graph file field delimiter");
  cmd->add_option("--graph-columns", flags.graph_columns,
                  "graph column order: follower,followee or followee,follower");
  cmd->add_flag("--graph-extra-fields", cfg.graph_fmt.allow_extra_fields,
                "tolerate extra trailing fields in graph lines");
  cmd->add_option("--cascade-delim", cfg.cascade_fmt.delimiter, "cascade file field delimiter");
  cmd->add_option("--root-marker", cfg.cascade_fmt.root_marker,
                  "parent field value marking the root record");
  cmd->add_flag("--cascade-extra-fields", cfg.cascade_fmt.allow_extra_fields,
                "tolerate extra trailing fields in cascade lines");
}

void resolve_flags(const FlagState& flags, PipelineConfig& cfg) {
  cfg.feat.pairs = flags.density_pairs == "unordered" ? casc::DensityPairs::Unordered
                                                      : casc::DensityPairs::Ordered;
  cfg.orphan_policy = flags.orphan_policy == "drop" ? casc::OrphanPolicy::Drop
                                                    : casc::OrphanPolicy::ReparentToRoot;
  if (flags.graph_columns == "followee,follower")
    cfg.graph_fmt.swap_columns = true;
  else if (flags.graph_columns != "follower,followee")
    throw casc::ConfigError("bad --graph-columns value '" + flags.graph_columns + "'");
  cfg.variants.clear();
  if (flags.variants == "all") {
    cfg.variants = {casc::ModelVariant::Baseline, casc::ModelVariant::WithDensity,
                    casc::ModelVariant::WithDepth};
  } else {
    for (auto name : casc::split_fields(flags.variants, ','))
      cfg.variants.push_back(casc::parse_variant(name));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retweet-cascade popularity toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "options file; keys live in [subcommand] sections, flags override");

  PipelineConfig cfg;
  FlagState flags;
  SynthConfig synth;
  bool bundled = false;

  auto* ingest = app.add_subcommand("ingest-check", "load inputs and report ingestion stats");
  ingest->add_option("--graph", cfg.graph_path, "follower graph TSV");
  ingest->add_option("--cascades", cfg.cascades_path, "cascade event TSV");
  add_common_flags(ingest, cfg, flags);

  auto* features = app.add_subcommand("features", "extract per-tweet structural features");
  features->add_option("--graph", cfg.graph_path, "follower graph TSV")->required();
  features->add_option("--cascades", cfg.cascades_path, "cascade event TSV")->required();
  features->add_option("--out", cfg.features_path, "feature TSV to write")->required();
  add_common_flags(features, cfg, flags);

  auto* fit = app.add_subcommand("fit", "fit model variants on the train split");
  fit->add_option("--features", cfg.features_path, "feature TSV")->required();
  fit->add_option("--out-dir", cfg.out_dir, "directory for coefficient files")->required();
  add_common_flags(fit, cfg, flags);

  auto* eval = app.add_subcommand("eval", "score persisted coefficients on the test split");
  eval->add_option("--features", cfg.features_path, "feature TSV")->required();
  eval->add_option("--coeffs-dir", cfg.out_dir, "directory with coefficient files")->required();
  eval->add_option("--out", cfg.report_path, "report TSV to write");
  add_common_flags(eval, cfg, flags);

  auto* fiteval = app.add_subcommand("fit-eval", "fit and score with one shared split");
  fiteval->add_option("--features", cfg.features_path, "feature TSV")->required();
  fiteval->add_option("--out-dir", cfg.out_dir, "directory for coefficients and report")
      ->required();
  add_common_flags(fiteval, cfg, flags);

  auto* bins = app.add_subcommand("bins", "final-popularity bin summaries and correlations");
  bins->add_option("--features", cfg.features_path, "feature TSV")->required();
  bins->add_option("--out-dir", cfg.out_dir, "directory for bin CSVs")->required();
  add_common_flags(bins, cfg, flags);

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic corpus with truth");
  simulate->add_option("--out-dir", cfg.out_dir, "corpus output directory")->required();
  simulate->add_flag("--bundled", bundled, "use the pinned fixed-seed corpus config");
  simulate->add_option("--nodes", synth.n_nodes, "graph size")->capture_default_str();
  simulate->add_option("--communities", synth.n_communities, "community count")
      ->capture_default_str();
  simulate->add_option("--p-in", synth.p_in, "within-community edge probability")
      ->capture_default_str();
  simulate->add_option("--p-out", synth.p_out, "between-community edge probability")
      ->capture_default_str();
  simulate->add_option("--p-in-spread", synth.p_in_spread,
                       "relative fan of p_in across communities")
      ->capture_default_str();
  simulate->add_option("--count", synth.cascade_count, "cascades to simulate")
      ->capture_default_str();
  simulate->add_option("--lambda", synth.transmission, "base adoption probability")
      ->capture_default_str();
  simulate->add_option("--boost", synth.structure_boost, "diversity coupling strength")
      ->capture_default_str();
  simulate->add_option("--max-time", synth.max_sim_time, "simulation horizon in seconds")
      ->capture_default_str();
  simulate->add_option("--mean-gap", synth.mean_gap_s, "mean inter-event gap in seconds")
      ->capture_default_str();
  add_common_flags(simulate, cfg, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    resolve_flags(flags, cfg);
    if (bundled) {
      synth = casc::bundled_corpus_config();
      if (simulate->count("--seed")) synth.seed = cfg.seed;
    } else if (simulate->parsed()) {
      synth.seed = cfg.seed;
    }
    casc::validate(cfg);
    casc::print_config(cfg, std::cerr);

    if (ingest->parsed()) casc::cmd_ingest_check(cfg, std::cerr);
    if (features->parsed()) casc::cmd_features(cfg, std::cerr);
    if (fit->parsed()) casc::cmd_fit(cfg, std::cerr);
    if (eval->parsed()) casc::cmd_eval(cfg, std::cerr);
    if (fiteval->parsed()) casc::cmd_fit_eval(cfg, std::cerr);
    if (bins->parsed()) casc::cmd_bins(cfg, std::cerr, std::cout);
    if (simulate->parsed()) casc::cmd_simulate(cfg, synth, std::cerr);
    return kOk;
  } catch (const casc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const casc::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericError;
  } catch (const casc::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
