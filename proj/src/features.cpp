#include "casc/features.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "casc/util.hpp"

namespace casc {

void validate(const FeatureConfig& cfg) {
  if (cfg.t_i < 0) throw ConfigError("t_i must be >= 0");
  if (cfg.t_i >= cfg.t_r) throw ConfigError("t_i must be strictly less than t_r");
  if (cfg.min_early < 0) throw ConfigError("min_early must be >= 0");
  if (!(cfg.density_floor > 0)) throw ConfigError("density floor must be > 0");
}

std::optional<double> link_density(const FollowerGraph& g, const CascadePrefix& pre,
                                   const FeatureConfig& cfg) {
  std::vector<NodeId> members;
  members.reserve(pre.adopters.size());
  for (NodeId u : pre.adopters) {
    if (cfg.exclude_root && u == pre.root) continue;
    members.push_back(u);
  }
  const double n = static_cast<double>(members.size());
  if (members.size() < 2) return std::nullopt;

  // adopters unknown to the graph have no recorded links either way
  std::erase_if(members, [&](NodeId u) { return u >= g.node_count(); });
  const auto links = static_cast<double>(g.count_links_among(members));
  const double possible =
      cfg.pairs == DensityPairs::Ordered ? n * (n - 1.0) : n * (n - 1.0) / 2.0;
  return links / possible;
}

std::int64_t diffusion_depth(const CascadePrefix& pre) {
  const std::size_t n = pre.adopters.size();
  std::vector<std::int32_t> depth(n, -1);
  depth[pre.index_of(pre.root)] = 0;
  std::vector<std::size_t> chain;
  std::int64_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (depth[i] >= 0) {
      best = std::max<std::int64_t>(best, depth[i]);
      continue;
    }
    chain.clear();
    std::size_t j = i;
    while (depth[j] < 0) {
      chain.push_back(j);
      if (chain.size() > n) throw DataError("cycle in prefix forest");
      j = pre.index_of(pre.parent_of[j]);
      if (j == CascadePrefix::npos) throw DataError("prefix parent outside adopter set");
    }
    std::int32_t d = depth[j];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) depth[*it] = ++d;
    best = std::max<std::int64_t>(best, d);
  }
  return best;
}

FeatureRow feature_row(const FollowerGraph& g, const Cascade& c, const FeatureConfig& cfg) {
  validate(cfg);
  FeatureRow row;
  row.tweet_id = c.tweet_id;
  row.early_pop = popularity_at(c, cfg.t_i);
  row.final_pop = popularity_at(c, cfg.t_r);

  CascadePrefix pre = prefix_at(c, cfg.t_i);
  row.n_adopters = static_cast<std::int64_t>(pre.adopters.size());
  row.depth = diffusion_depth(pre);
  if (auto rho = link_density(g, pre, cfg)) row.density = *rho;

  if (row.early_pop < cfg.min_early) {
    row.excluded_reason = "no early adoption";
    return row;
  }
  row.ln_early = std::log(static_cast<double>(row.early_pop));
  row.ln_final = std::log(static_cast<double>(row.final_pop));
  if (row.density_defined())
    row.ln_density = std::log(row.density == 0.0 ? cfg.density_floor : row.density);
  return row;
}

std::vector<FeatureRow> extract_features(const FollowerGraph& g,
                                         const std::vector<Cascade>& cascades,
                                         const FeatureConfig& cfg, unsigned threads) {
  validate(cfg);
  std::vector<FeatureRow> rows(cascades.size());
  const std::size_t n = cascades.size();
  unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = feature_row(g, cascades[i], cfg);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto work = [&] {
    try {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        rows[i] = feature_row(g, cascades[i], cfg);
      }
    } catch (...) {
      std::scoped_lock lock(error_mu);
      if (!first_error) first_error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

std::string config_fingerprint(const FeatureConfig& cfg) {
  std::string fp;
  fp += "ti=" + std::to_string(cfg.t_i);
  fp += ";tr=" + std::to_string(cfg.t_r);
  fp += ";min_early=" + std::to_string(cfg.min_early);
  fp += ";pairs=";
  fp += cfg.pairs == DensityPairs::Ordered ? "ordered" : "unordered";
  fp += ";exclude_root=";
  fp += cfg.exclude_root ? "1" : "0";
  fp += ";floor=" + fmt_double(cfg.density_floor);
  return fp;
}

FeatureConfig parse_fingerprint(std::string_view fp) {
  FeatureConfig cfg;
  for (std::string_view kv : split_fields(fp, ';')) {
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw DataError("bad config fingerprint: " + std::string(fp));
    std::string_view key = kv.substr(0, eq), val = kv.substr(eq + 1);
    bool ok = true;
    if (key == "ti") ok = parse_i64(val, cfg.t_i);
    else if (key == "tr") ok = parse_i64(val, cfg.t_r);
    else if (key == "min_early") ok = parse_i64(val, cfg.min_early);
    else if (key == "pairs") {
      if (val == "ordered") cfg.pairs = DensityPairs::Ordered;
      else if (val == "unordered") cfg.pairs = DensityPairs::Unordered;
      else ok = false;
    } else if (key == "exclude_root") cfg.exclude_root = (val == "1");
    else if (key == "floor") ok = parse_double(val, cfg.density_floor);
    else ok = false;
    if (!ok) throw DataError("bad config fingerprint entry '" + std::string(kv) + "'");
  }
  return cfg;
}

static constexpr char kFeatureColumns[] =
    "tweet_id\tn_adopters\tearly_pop\tfinal_pop\tdensity\tdepth\texcluded_reason";

void write_feature_header(std::ostream& os, const FeatureConfig& cfg) {
  os << "# config: " << config_fingerprint(cfg) << "\n" << kFeatureColumns << "\n";
}

void write_feature_row(std::ostream& os, const FeatureRow& row) {
  os << row.tweet_id << '\t' << row.n_adopters << '\t' << row.early_pop << '\t'
     << row.final_pop << '\t' << fmt_double(row.density) << '\t' << row.depth << '\t'
     << row.excluded_reason << "\n";
}

FeatureFile read_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature file: " + path.string());
  const std::string path_str = path.string();

  std::string line;
  std::size_t line_no = 0;
  FeatureFile file;
  bool have_config = false, have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.starts_with("# config: ")) {
      file.config = parse_fingerprint(std::string_view(line).substr(10));
      have_config = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (!have_header) {
      if (line != kFeatureColumns)
        throw ParseError(path_str, line_no, "unexpected feature header");
      have_header = true;
      continue;
    }
    auto fields = split_fields(line, '\t');
    if (fields.size() != 7)
      throw ParseError(path_str, line_no, "expected 7 fields, got " + std::to_string(fields.size()));
    FeatureRow row;
    row.tweet_id = std::string(fields[0]);
    if (!parse_i64(fields[1], row.n_adopters) || !parse_i64(fields[2], row.early_pop) ||
        !parse_i64(fields[3], row.final_pop) || !parse_i64(fields[5], row.depth))
      throw ParseError(path_str, line_no, "bad integer field");
    if (fields[4] == "nan")
      row.density = std::numeric_limits<double>::quiet_NaN();
    else if (!parse_double(fields[4], row.density))
      throw ParseError(path_str, line_no, "bad density field");
    row.excluded_reason = std::string(fields[6]);
    if (row.included()) {
      if (row.early_pop < 1 || row.final_pop < 1)
        throw ParseError(path_str, line_no, "included row with non-positive popularity");
      row.ln_early = std::log(static_cast<double>(row.early_pop));
      row.ln_final = std::log(static_cast<double>(row.final_pop));
      if (row.density_defined())
        row.ln_density =
            std::log(row.density == 0.0 ? file.config.density_floor : row.density);
    }
    file.rows.push_back(std::move(row));
  }
  if (!have_config) throw DataError(path_str + ": missing config fingerprint header");
  if (!have_header) throw DataError(path_str + ": missing column header");
  return file;
}

}  // namespace casc
