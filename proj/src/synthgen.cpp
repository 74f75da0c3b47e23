#include "casc/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <random>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "casc/util.hpp"

namespace casc {

namespace {

constexpr std::uint64_t kGraphSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kCascadeSalt = 0xc2b2ae3d27d4eb4fULL;
constexpr std::int64_t kBasePostTime = 1309478400;  // corpus epoch
constexpr std::int64_t kPostSpacing = 3600;

// uniform in the open interval (0,1); mt19937_64 output is fully specified
// by the standard, so corpora are reproducible across platforms
double u01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exp_gap(std::mt19937_64& rng, double mean) { return -std::log(u01(rng)) * mean; }

// Bernoulli(p) sweep over [a,b) \ {skip} via geometric gaps.
template <typename Emit>
void sample_segment(NodeId skip, std::uint64_t a, std::uint64_t b, double p,
                    std::mt19937_64& rng, Emit&& emit) {
  if (p <= 0.0 || a >= b) return;
  if (p >= 1.0) {
    for (std::uint64_t j = a; j < b; ++j)
      if (j != skip) emit(static_cast<NodeId>(j));
    return;
  }
  const double log1mp = std::log1p(-p);
  double j = static_cast<double>(a) - 1.0;
  while (true) {
    j += 1.0 + std::floor(std::log(u01(rng)) / log1mp);
    if (j >= static_cast<double>(b)) return;
    auto v = static_cast<std::uint64_t>(j);
    if (v != skip) emit(static_cast<NodeId>(v));
  }
}

}  // namespace

void validate(const SynthConfig& cfg) {
  if (cfg.n_nodes == 0) throw ConfigError("n_nodes must be >= 1");
  if (cfg.n_communities == 0) throw ConfigError("n_communities must be >= 1");
  if (cfg.n_communities > cfg.n_nodes) throw ConfigError("more communities than nodes");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(cfg.p_in) || !prob(cfg.p_out)) throw ConfigError("edge probabilities must be in [0,1]");
  if (cfg.p_in_spread < 0.0 || cfg.p_in_spread > 1.0)
    throw ConfigError("p_in_spread must be in [0,1]");
  if (!prob(cfg.transmission)) throw ConfigError("transmission must be in [0,1]");
  if (cfg.structure_boost < 0) throw ConfigError("structure_boost must be >= 0");
  if (cfg.max_sim_time <= 0) throw ConfigError("max_sim_time must be > 0");
  if (!(cfg.mean_gap_s > 0)) throw ConfigError("mean_gap_s must be > 0");
}

std::string synth_fingerprint(const SynthConfig& cfg) {
  std::string fp;
  fp += "nodes=" + std::to_string(cfg.n_nodes);
  fp += ";communities=" + std::to_string(cfg.n_communities);
  fp += ";p_in=" + fmt_double(cfg.p_in);
  fp += ";p_out=" + fmt_double(cfg.p_out);
  if (cfg.p_in_spread > 0) fp += ";p_in_spread=" + fmt_double(cfg.p_in_spread);
  fp += ";count=" + std::to_string(cfg.cascade_count);
  fp += ";lambda=" + fmt_double(cfg.transmission);
  fp += ";boost=" + fmt_double(cfg.structure_boost);
  fp += ";max_time=" + std::to_string(cfg.max_sim_time);
  fp += ";mean_gap=" + fmt_double(cfg.mean_gap_s);
  fp += ";seed=" + std::to_string(cfg.seed);
  return fp;
}

std::uint32_t community_of(NodeId u, std::uint32_t n_nodes, std::uint32_t n_communities) {
  const std::uint32_t block = (n_nodes + n_communities - 1) / n_communities;
  return std::min(u / block, n_communities - 1);
}

// Within-density of community c: p_in fanned by a low-discrepancy factor
// in [1 - spread, 1 + spread], fixed by the community index alone.
static double community_p_in(const SynthConfig& cfg, std::uint32_t c) {
  if (cfg.p_in_spread == 0.0) return cfg.p_in;
  constexpr double kGolden = 0.6180339887498949;
  const double frac = std::fmod(static_cast<double>(c + 1) * kGolden, 1.0);
  const double factor = 1.0 + cfg.p_in_spread * (2.0 * frac - 1.0);
  return std::clamp(cfg.p_in * factor, 0.0, 1.0);
}

FollowerGraph gen_graph(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed ^ kGraphSalt);
  const std::uint64_t n = cfg.n_nodes;
  const std::uint32_t block = (cfg.n_nodes + cfg.n_communities - 1) / cfg.n_communities;

  std::vector<std::pair<NodeId, NodeId>> edges;
  const double exp_out_deg = cfg.p_in * block + cfg.p_out * static_cast<double>(n);
  edges.reserve(static_cast<std::size_t>(std::min(exp_out_deg * n * 1.1, 2e8)));

  for (NodeId u = 0; u < cfg.n_nodes; ++u) {
    const std::uint32_t c = community_of(u, cfg.n_nodes, cfg.n_communities);
    const std::uint64_t lo = static_cast<std::uint64_t>(c) * block;
    const std::uint64_t hi = std::min<std::uint64_t>(lo + block, n);
    auto emit = [&](NodeId v) { edges.emplace_back(u, v); };
    sample_segment(u, 0, lo, cfg.p_out, rng, emit);
    sample_segment(u, lo, hi, community_p_in(cfg, c), rng, emit);
    sample_segment(u, hi, n, cfg.p_out, rng, emit);
  }
  return FollowerGraph::from_edges(cfg.n_nodes, std::move(edges), IdMap::identity(cfg.n_nodes));
}

std::vector<Cascade> gen_cascades(const FollowerGraph& g, const SynthConfig& cfg) {
  validate(cfg);
  const auto n = static_cast<std::uint32_t>(g.node_count());
  if (n == 0) throw DataError("gen_cascades: empty graph");

  // reverse adjacency: who gets exposed when v adopts
  std::vector<std::vector<NodeId>> followers(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.out(u)) followers[v].push_back(u);

  std::mt19937_64 rng(cfg.seed ^ kCascadeSalt);

  struct Trial {
    double t;
    std::uint64_t seq;
    NodeId user;
    NodeId parent;
    bool operator>(const Trial& o) const { return std::tie(t, seq) > std::tie(o.t, o.seq); }
  };
  std::priority_queue<Trial, std::vector<Trial>, std::greater<>> pq;

  std::vector<std::uint8_t> adopted(n, 0);
  std::vector<double> adopt_time(n, 0.0);
  std::vector<NodeId> touched;
  std::vector<std::uint8_t> comm_seen(cfg.n_communities, 0);
  std::vector<std::uint32_t> comm_touched;
  std::uint32_t n_comms = 0;

  std::vector<Cascade> cascades;
  cascades.reserve(cfg.cascade_count);

  for (std::uint32_t ci = 0; ci < cfg.cascade_count; ++ci) {
    Cascade c;
    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "c%06u", ci);
    c.tweet_id = idbuf;
    c.post_time = kBasePostTime + static_cast<std::int64_t>(ci) * kPostSpacing;
    c.root = static_cast<NodeId>(rng() % n);

    std::uint64_t seq = 0;
    auto mark = [&](NodeId u, double t) {
      adopted[u] = 1;
      adopt_time[u] = t;
      touched.push_back(u);
      const std::uint32_t cu = community_of(u, n, cfg.n_communities);
      if (!comm_seen[cu]) {
        comm_seen[cu] = 1;
        comm_touched.push_back(cu);
        ++n_comms;
      }
    };
    // the forwarded copy is the one seen first: the earliest-adopted followee
    auto attribution = [&](NodeId f, NodeId fallback) {
      NodeId best = fallback;
      double best_t = adopt_time[fallback];
      for (NodeId v : g.out(f)) {
        if (adopted[v] && adopt_time[v] < best_t) {
          best = v;
          best_t = adopt_time[v];
        }
      }
      return best;
    };
    auto run_trials = [&](NodeId x, double now) {
      const double diversity = static_cast<double>(n_comms) / cfg.n_communities;
      const double lam =
          std::min(1.0, cfg.transmission * (1.0 + cfg.structure_boost * diversity));
      for (NodeId f : followers[x]) {
        if (adopted[f]) continue;
        if (u01(rng) < lam) pq.push({now + exp_gap(rng, cfg.mean_gap_s), seq++, f, x});
      }
    };

    mark(c.root, 0.0);
    run_trials(c.root, 0.0);
    while (!pq.empty()) {
      Trial trial = pq.top();
      pq.pop();
      if (trial.t > static_cast<double>(cfg.max_sim_time)) break;
      if (adopted[trial.user]) continue;  // lost the race to an earlier exposure
      const NodeId parent = attribution(trial.user, trial.parent);
      mark(trial.user, trial.t);
      c.events.push_back({trial.user, parent, static_cast<std::int64_t>(std::floor(trial.t))});
      run_trials(trial.user, trial.t);
    }

    while (!pq.empty()) pq.pop();
    for (NodeId u : touched) adopted[u] = 0;
    touched.clear();
    for (std::uint32_t cu : comm_touched) comm_seen[cu] = 0;
    comm_touched.clear();
    n_comms = 0;

    cascades.push_back(std::move(c));
  }
  return cascades;
}

std::vector<FeatureRow> truth_features(const FollowerGraph& g,
                                       const std::vector<Cascade>& cascades,
                                       const FeatureConfig& fcfg) {
  validate(fcfg);
  std::unordered_set<std::uint64_t> edge_set;
  edge_set.reserve(static_cast<std::size_t>(g.edge_count()) * 2);
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (NodeId v : g.out(u))
      edge_set.insert((static_cast<std::uint64_t>(u) << 32) | v);
  auto follows = [&](NodeId a, NodeId b) {
    return edge_set.contains((static_cast<std::uint64_t>(a) << 32) | b);
  };

  std::vector<FeatureRow> rows;
  rows.reserve(cascades.size());
  for (const auto& c : cascades) {
    FeatureRow row;
    row.tweet_id = c.tweet_id;
    for (const auto& ev : c.events) {
      if (ev.offset_s <= fcfg.t_i) ++row.early_pop;
      if (ev.offset_s <= fcfg.t_r) ++row.final_pop;
    }

    std::unordered_map<NodeId, NodeId> first_parent;
    for (const auto& ev : c.events)
      if (ev.offset_s <= fcfg.t_i) first_parent.try_emplace(ev.user, ev.parent);

    std::vector<NodeId> adopters{c.root};
    for (const auto& [u, p] : first_parent)
      if (u != c.root) adopters.push_back(u);
    std::sort(adopters.begin(), adopters.end());
    adopters.erase(std::unique(adopters.begin(), adopters.end()), adopters.end());
    row.n_adopters = static_cast<std::int64_t>(adopters.size());

    std::int64_t depth = 0;
    for (NodeId u : adopters) {
      std::int64_t hops = 0;
      NodeId w = u;
      while (w != c.root) {
        w = first_parent.at(w);
        if (++hops > row.n_adopters) throw DataError("truth_features: cyclic parents");
      }
      depth = std::max(depth, hops);
    }
    row.depth = depth;

    std::vector<NodeId> members;
    for (NodeId u : adopters) {
      if (fcfg.exclude_root && u == c.root) continue;
      members.push_back(u);
    }
    if (members.size() >= 2) {
      std::uint64_t links = 0;
      for (NodeId a : members)
        for (NodeId b : members)
          if (a != b && follows(a, b)) ++links;
      const auto m = static_cast<double>(members.size());
      const double possible =
          fcfg.pairs == DensityPairs::Ordered ? m * (m - 1.0) : m * (m - 1.0) / 2.0;
      row.density = static_cast<double>(links) / possible;
    }

    if (row.early_pop < fcfg.min_early) {
      row.excluded_reason = "no early adoption";
    } else {
      row.ln_early = std::log(static_cast<double>(row.early_pop));
      row.ln_final = std::log(static_cast<double>(row.final_pop));
      if (row.density_defined())
        row.ln_density = std::log(row.density == 0.0 ? fcfg.density_floor : row.density);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_corpus(const std::filesystem::path& dir, const FollowerGraph& g,
                  const std::vector<Cascade>& cascades, const std::vector<FeatureRow>& truth,
                  const SynthConfig& cfg, const FeatureConfig& fcfg) {
  std::filesystem::create_directories(dir);
  const auto& ids = *g.ids();

  {
    std::ofstream out(dir / "graph.tsv");
    if (!out) throw DataError("cannot write " + (dir / "graph.tsv").string());
    out << "# synth: " << synth_fingerprint(cfg) << "\n";
    for (NodeId u = 0; u < g.node_count(); ++u)
      for (NodeId v : g.out(u)) out << ids.name(u) << '\t' << ids.name(v) << "\n";
  }
  {
    std::ofstream out(dir / "cascades.tsv");
    if (!out) throw DataError("cannot write " + (dir / "cascades.tsv").string());
    out << "# synth: " << synth_fingerprint(cfg) << "\n";
    for (const auto& c : cascades) {
      out << c.tweet_id << '\t' << ids.name(c.root) << "\t-\t" << c.post_time << "\n";
      for (const auto& ev : c.events)
        out << c.tweet_id << '\t' << ids.name(ev.user) << '\t' << ids.name(ev.parent) << '\t'
            << c.post_time + ev.offset_s << "\n";
    }
  }
  {
    std::ofstream out(dir / "truth.tsv");
    if (!out) throw DataError("cannot write " + (dir / "truth.tsv").string());
    write_feature_header(out, fcfg);
    for (const auto& row : truth) write_feature_row(out, row);
  }
}

SynthConfig bundled_corpus_config() {
  SynthConfig cfg;
  cfg.p_in_spread = 0.8;  // heterogeneous community densities
  cfg.seed = 1729;
  return cfg;
}

}  // namespace casc
