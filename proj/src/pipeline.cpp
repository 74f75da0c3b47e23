#include "casc/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "casc/util.hpp"

namespace casc {

namespace fs = std::filesystem;

void validate(const PipelineConfig& cfg) {
  validate(cfg.feat);
  if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0))
    throw ConfigError("train fraction must be in (0,1)");
  if (cfg.variants.empty()) throw ConfigError("at least one model variant required");
  if (cfg.density_bins < 2) throw ConfigError("density bins must be >= 2");
}

void print_config(const PipelineConfig& cfg, std::ostream& os) {
  os << "config:\n";
  if (!cfg.graph_path.empty()) os << "  graph = " << cfg.graph_path << "\n";
  if (!cfg.cascades_path.empty()) os << "  cascades = " << cfg.cascades_path << "\n";
  if (!cfg.features_path.empty()) os << "  features = " << cfg.features_path << "\n";
  if (!cfg.out_dir.empty()) os << "  out_dir = " << cfg.out_dir << "\n";
  os << "  " << config_fingerprint(cfg.feat) << "\n";
  os << "  train_frac = " << fmt_double(cfg.train_frac) << "\n";
  os << "  seed = " << cfg.seed << "\n";
  os << "  orphan_policy = "
     << (cfg.orphan_policy == OrphanPolicy::ReparentToRoot ? "reparent" : "drop") << "\n";
  os << "  clamp_predictions = " << (cfg.clamp_predictions ? "1" : "0") << "\n";
  os << "  variants =";
  for (auto v : cfg.variants) os << ' ' << variant_name(v);
  os << "\n";
}

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string(what) + " path not set");
  if (!fs::exists(path)) throw DataError(std::string(what) + " file not found: " + path);
}

void log_graph_stats(const GraphLoadStats& st, const FollowerGraph& g, std::ostream& log) {
  log << "graph: " << g.node_count() << " nodes, " << g.edge_count()
      << " edges (input lines " << st.data_lines << ", duplicates " << st.duplicate_edges
      << ", self-loops dropped " << st.self_loops << ")\n";
}

void log_cascade_stats(const CascadeLoadStats& st, std::ostream& log) {
  log << "cascades: " << st.cascades << " loaded, " << st.events << " events"
      << " (repaired parents " << st.repaired_parents << ", dropped orphans "
      << st.dropped_orphans << ", clamped offsets " << st.clamped_offsets
      << ", skipped rootless " << st.skipped_no_root << ", duplicate roots "
      << st.duplicate_roots << ", self-retweets " << st.self_retweets << ")\n";
}

std::vector<FeatureRow> included_rows(const FeatureFile& file) {
  std::vector<FeatureRow> rows;
  rows.reserve(file.rows.size());
  for (const auto& row : file.rows)
    if (row.included()) rows.push_back(row);
  return rows;
}

std::vector<FeatureRow> valid_rows(std::span<const FeatureRow> rows, ModelVariant v) {
  std::vector<FeatureRow> out;
  out.reserve(rows.size());
  for (const auto& row : rows)
    if (row_valid_for(v, row)) out.push_back(row);
  return out;
}

fs::path coeffs_path(const PipelineConfig& cfg, ModelVariant v) {
  return fs::path(cfg.out_dir) / (std::string(variant_name(v)) + ".coeffs");
}

}  // namespace

void cmd_ingest_check(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.graph_path.empty() && cfg.cascades_path.empty())
    throw ConfigError("ingest-check needs a graph and/or cascade path");
  auto ids = std::make_shared<IdMap>();
  if (!cfg.graph_path.empty()) {
    require_file(cfg.graph_path, "graph");
    GraphLoadStats gst;
    FollowerGraph g = load_graph(cfg.graph_path, cfg.graph_fmt, &gst, ids);
    log_graph_stats(gst, g, log);
  }
  if (!cfg.cascades_path.empty()) {
    require_file(cfg.cascades_path, "cascades");
    CascadeReader reader(cfg.cascades_path, ids, cfg.orphan_policy, cfg.cascade_fmt);
    while (reader.next()) {
    }
    log_cascade_stats(reader.stats(), log);
  }
  log << "ingest-check: ok\n";
}

void cmd_features(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.features_path.empty()) throw ConfigError("features output path not set");
  require_file(cfg.graph_path, "graph");
  require_file(cfg.cascades_path, "cascades");

  auto ids = std::make_shared<IdMap>();
  GraphLoadStats gst;
  FollowerGraph g = load_graph(cfg.graph_path, cfg.graph_fmt, &gst, ids);
  log_graph_stats(gst, g, log);

  std::ofstream out(cfg.features_path);
  if (!out) throw DataError("cannot write feature file: " + cfg.features_path);
  write_feature_header(out, cfg.feat);

  // bounded window: the graph plus at most kWindow cascades are resident
  constexpr std::size_t kWindow = 256;
  const unsigned threads = resolve_threads(cfg.threads);
  CascadeReader reader(cfg.cascades_path, ids, cfg.orphan_policy, cfg.cascade_fmt);
  std::vector<Cascade> window;
  window.reserve(kWindow);
  std::uint64_t total = 0, included = 0;
  while (true) {
    window.clear();
    while (window.size() < kWindow) {
      auto c = reader.next();
      if (!c) break;
      window.push_back(std::move(*c));
    }
    if (window.empty()) break;
    auto rows = extract_features(g, window, cfg.feat, threads);
    for (const auto& row : rows) {
      write_feature_row(out, row);
      ++total;
      if (row.included()) ++included;
    }
  }
  if (total == 0) throw DataError("no cascades in " + cfg.cascades_path);
  log_cascade_stats(reader.stats(), log);
  log << "features: " << total << " rows (" << included << " included, " << total - included
      << " excluded) -> " << cfg.features_path << "\n";
}

namespace {

struct FitEvalData {
  FeatureFile file;
  SplitResult parts;
};

FitEvalData load_and_split(const PipelineConfig& cfg) {
  require_file(cfg.features_path, "features");
  FitEvalData data;
  data.file = read_features(cfg.features_path);
  auto rows = included_rows(data.file);
  data.parts = split(rows, cfg.train_frac, cfg.seed);
  return data;
}

}  // namespace

void cmd_fit(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.out_dir.empty()) throw ConfigError("fit output directory not set");
  auto data = load_and_split(cfg);
  fs::create_directories(cfg.out_dir);
  const std::string fp = config_fingerprint(data.file.config);

  std::vector<std::string> failures;
  for (ModelVariant v : cfg.variants) {
    auto train = valid_rows(data.parts.train, v);
    try {
      ModelCoefficients m = fit_ols(v, train, fp);
      save_coefficients(coeffs_path(cfg, v), m);
      log << "fit " << variant_name(v) << ": n_train=" << m.n_train << " coeffs=";
      for (std::size_t i = 0; i < m.coeffs.size(); ++i)
        log << (i ? "," : "") << fmt_double(m.coeffs[i]);
      log << "\n";
    } catch (const NumericError& e) {
      failures.emplace_back(e.what());
      log << "fit " << variant_name(v) << ": FAILED (" << e.what() << ")\n";
    }
  }
  if (!failures.empty())
    throw NumericError(std::to_string(failures.size()) + " variant fit(s) failed: " +
                       failures.front());
}

namespace {

void run_eval(const PipelineConfig& cfg, const FitEvalData& data,
              const std::vector<ModelCoefficients>& models, std::ostream& log) {
  const std::string fp = config_fingerprint(data.file.config);
  std::vector<EvalReport> reports;
  for (const auto& m : models) {
    if (m.fingerprint != fp)
      throw ConfigError(std::string("coefficients for '") + variant_name(m.variant) +
                        "' were fitted under a different feature config (" + m.fingerprint +
                        " vs " + fp + ")");
    auto test = valid_rows(data.parts.test, m.variant);
    reports.push_back(score(m, test, cfg.seed, cfg.clamp_predictions));
  }

  std::string report_path = cfg.report_path;
  if (report_path.empty())
    report_path = (fs::path(cfg.out_dir) / "report.tsv").string();
  std::ofstream out(report_path);
  if (!out) throw DataError("cannot write report: " + report_path);
  write_report(out, reports, fp, cfg.train_frac);

  std::ostringstream block;
  write_report(block, reports, fp, cfg.train_frac);
  log << block.str();
  log << "report -> " << report_path << "\n";
}

}  // namespace

void cmd_eval(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.out_dir.empty() && cfg.report_path.empty())
    throw ConfigError("eval needs an output directory or report path");
  auto data = load_and_split(cfg);
  std::vector<ModelCoefficients> models;
  for (ModelVariant v : cfg.variants) models.push_back(load_coefficients(coeffs_path(cfg, v)));
  run_eval(cfg, data, models, log);
}

void cmd_fit_eval(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.out_dir.empty()) throw ConfigError("fit-eval output directory not set");
  auto data = load_and_split(cfg);
  fs::create_directories(cfg.out_dir);
  const std::string fp = config_fingerprint(data.file.config);

  std::vector<ModelCoefficients> models;
  std::vector<std::string> failures;
  for (ModelVariant v : cfg.variants) {
    auto train = valid_rows(data.parts.train, v);
    try {
      ModelCoefficients m = fit_ols(v, train, fp);
      save_coefficients(coeffs_path(cfg, v), m);
      models.push_back(std::move(m));
    } catch (const NumericError& e) {
      failures.emplace_back(e.what());
      log << "fit " << variant_name(v) << ": FAILED (" << e.what() << ")\n";
    }
  }
  if (!models.empty()) run_eval(cfg, data, models, log);
  if (!failures.empty())
    throw NumericError(std::to_string(failures.size()) + " variant fit(s) failed: " +
                       failures.front());
}

void cmd_bins(const PipelineConfig& cfg, std::ostream& log, std::ostream& results) {
  validate(cfg);
  if (cfg.out_dir.empty()) throw ConfigError("bins output directory not set");
  require_file(cfg.features_path, "features");
  FeatureFile file = read_features(cfg.features_path);
  auto rows = included_rows(file);
  if (rows.empty()) throw DataError("no included rows in " + cfg.features_path);
  fs::create_directories(cfg.out_dir);
  const std::string fp = config_fingerprint(file.config);

  const auto density_bins = bin_summary(rows, BinAxis::Density, cfg.density_bins);
  const auto depth_bins = bin_summary(rows, BinAxis::Depth, cfg.density_bins);
  const auto density_path = fs::path(cfg.out_dir) / "bins_density.csv";
  const auto depth_path = fs::path(cfg.out_dir) / "bins_depth.csv";
  {
    std::ofstream out(density_path);
    if (!out) throw DataError("cannot write " + density_path.string());
    write_bins_csv(out, density_bins, fp);
  }
  {
    std::ofstream out(depth_path);
    if (!out) throw DataError("cannot write " + depth_path.string());
    write_bins_csv(out, depth_bins, fp);
  }

  auto rho_s = spearman(rows, BinAxis::Density);
  auto dep_s = spearman(rows, BinAxis::Depth);
  results << "spearman_density\t" << (rho_s ? fmt_double(*rho_s) : "undefined") << "\n";
  results << "spearman_depth\t" << (dep_s ? fmt_double(*dep_s) : "undefined") << "\n";
  log << "bins -> " << density_path.string() << ", " << depth_path.string() << "\n";
}

void cmd_simulate(const PipelineConfig& cfg, const SynthConfig& synth, std::ostream& log) {
  validate(cfg);
  validate(synth);
  if (cfg.out_dir.empty()) throw ConfigError("simulate output directory not set");
  FollowerGraph g = gen_graph(synth);
  auto cascades = gen_cascades(g, synth);
  auto truth = truth_features(g, cascades, cfg.feat);
  write_corpus(cfg.out_dir, g, cascades, truth, synth, cfg.feat);
  std::uint64_t events = 0;
  for (const auto& c : cascades) events += c.events.size();
  log << "simulate: " << g.node_count() << " nodes, " << g.edge_count() << " edges, "
      << cascades.size() << " cascades, " << events << " events -> " << cfg.out_dir << "\n";
}

}  // namespace casc
