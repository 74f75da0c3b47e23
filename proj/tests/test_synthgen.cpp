#include <cmath>
#include <sstream>

#include "casc/synthgen.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace casc;

TEST_CASE("p_in=1 p_out=0 gives two directed cliques") {
  SynthConfig cfg;
  cfg.n_nodes = 6;
  cfg.n_communities = 2;
  cfg.p_in = 1.0;
  cfg.p_out = 0.0;
  cfg.seed = 5;
  FollowerGraph g = gen_graph(cfg);
  CHECK(g.edge_count() == 12);  // two 3-cliques, ordered pairs
  for (NodeId u = 0; u < 6; ++u)
    for (NodeId v = 0; v < 6; ++v) {
      if (u == v) continue;
      const bool same = community_of(u, 6, 2) == community_of(v, 6, 2);
      CHECK(g.has_edge(u, v) == same);
    }
}

TEST_CASE("p_in=p_out=0 gives an empty edge set") {
  SynthConfig cfg;
  cfg.n_nodes = 10;
  cfg.n_communities = 2;
  cfg.p_in = 0.0;
  cfg.p_out = 0.0;
  CHECK(gen_graph(cfg).edge_count() == 0);
}

TEST_CASE("empirical edge rates stay within 5 sigma of p_in / p_out") {
  SynthConfig cfg;
  cfg.n_nodes = 200;
  cfg.n_communities = 4;
  cfg.p_in = 0.2;
  cfg.p_out = 0.01;
  cfg.seed = 99;
  FollowerGraph g = gen_graph(cfg);

  std::uint64_t in_edges = 0, out_edges = 0, in_pairs = 0, out_pairs = 0;
  for (NodeId u = 0; u < cfg.n_nodes; ++u)
    for (NodeId v = 0; v < cfg.n_nodes; ++v) {
      if (u == v) continue;
      const bool same = community_of(u, cfg.n_nodes, cfg.n_communities) ==
                        community_of(v, cfg.n_nodes, cfg.n_communities);
      (same ? in_pairs : out_pairs)++;
      if (g.has_edge(u, v)) (same ? in_edges : out_edges)++;
    }
  auto check_rate = [](std::uint64_t hits, std::uint64_t trials, double p) {
    const double mean = static_cast<double>(trials) * p;
    const double sd = std::sqrt(static_cast<double>(trials) * p * (1 - p));
    CHECK(std::abs(static_cast<double>(hits) - mean) <= 5.0 * sd);
  };
  check_rate(in_edges, in_pairs, cfg.p_in);
  check_rate(out_edges, out_pairs, cfg.p_out);
}

TEST_CASE("lambda=0 spreads nothing") {
  SynthConfig cfg;
  cfg.n_nodes = 50;
  cfg.n_communities = 5;
  cfg.p_in = 0.3;
  cfg.p_out = 0.05;
  cfg.cascade_count = 20;
  cfg.transmission = 0.0;
  FollowerGraph g = gen_graph(cfg);
  for (const auto& c : gen_cascades(g, cfg)) CHECK(c.events.empty());
}

TEST_CASE("lambda=1 boost=0 floods a follower star at depth 1") {
  // node 0 is followed by everyone else; no other edges
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 1; u < 8; ++u) edges.emplace_back(u, 0);
  FollowerGraph g = FollowerGraph::from_edges(8, std::move(edges));

  SynthConfig cfg;
  cfg.n_nodes = 8;
  cfg.n_communities = 1;
  cfg.cascade_count = 40;
  cfg.transmission = 1.0;
  cfg.structure_boost = 0.0;
  cfg.max_sim_time = 1LL << 40;
  cfg.seed = 3;
  auto cascades = gen_cascades(g, cfg);
  bool saw_root0 = false;
  for (const auto& c : cascades) {
    if (c.root != 0) {
      CHECK(c.events.empty());  // nobody follows anyone else
      continue;
    }
    saw_root0 = true;
    CHECK(c.events.size() == 7);
    for (const auto& ev : c.events) CHECK(ev.parent == 0);
  }
  CHECK(saw_root0);
}

TEST_CASE("generated parents adopted earlier over real edges") {
  SynthConfig cfg;
  cfg.n_nodes = 300;
  cfg.n_communities = 6;
  cfg.p_in = 0.1;
  cfg.p_out = 0.01;
  cfg.cascade_count = 60;
  cfg.transmission = 0.15;
  cfg.structure_boost = 3.0;
  cfg.seed = 12;
  FollowerGraph g = gen_graph(cfg);
  auto cascades = gen_cascades(g, cfg);

  std::uint64_t events = 0;
  for (const auto& c : cascades) {
    std::unordered_map<NodeId, std::size_t> first_pos;
    for (std::size_t i = 0; i < c.events.size(); ++i) {
      const auto& ev = c.events[i];
      ++events;
      // the adopter follows the parent
      CHECK(g.has_edge(ev.user, ev.parent));
      if (ev.parent != c.root) {
        REQUIRE(first_pos.contains(ev.parent));
        CHECK(first_pos.at(ev.parent) < i);
      }
      CHECK_FALSE(first_pos.contains(ev.user));  // no re-adoption
      first_pos[ev.user] = i;
      if (i) CHECK(c.events[i - 1].offset_s <= ev.offset_s);
    }
  }
  CHECK(events > 100);  // the config actually spreads
}

TEST_CASE("same config and seed reproduce the corpus bit for bit") {
  SynthConfig cfg;
  cfg.n_nodes = 150;
  cfg.n_communities = 5;
  cfg.p_in = 0.15;
  cfg.p_out = 0.01;
  cfg.cascade_count = 30;
  cfg.transmission = 0.2;
  cfg.structure_boost = 2.0;
  cfg.seed = 77;
  FeatureConfig fcfg;

  oracle::TempDir d1("casc-synth1"), d2("casc-synth2");
  for (const auto& dir : {d1.path, d2.path}) {
    FollowerGraph g = gen_graph(cfg);
    auto cascades = gen_cascades(g, cfg);
    auto truth = truth_features(g, cascades, fcfg);
    write_corpus(dir, g, cascades, truth, cfg, fcfg);
  }
  for (const char* name : {"graph.tsv", "cascades.tsv", "truth.tsv"})
    CHECK(oracle::slurp(d1.path / name) == oracle::slurp(d2.path / name));
}

TEST_CASE("serialized corpus reloads to the generated structures") {
  SynthConfig cfg;
  cfg.n_nodes = 200;
  cfg.n_communities = 8;
  cfg.p_in = 0.2;
  cfg.p_out = 0.01;
  cfg.cascade_count = 500;
  cfg.transmission = 0.12;
  cfg.structure_boost = 2.0;
  cfg.seed = 31;
  FeatureConfig fcfg;

  FollowerGraph g = gen_graph(cfg);
  auto cascades = gen_cascades(g, cfg);
  auto truth = truth_features(g, cascades, fcfg);
  oracle::TempDir dir("casc-synth");
  write_corpus(dir.path, g, cascades, truth, cfg, fcfg);

  auto ids = std::make_shared<IdMap>();
  FollowerGraph g2 = load_graph(dir.path / "graph.tsv", {}, nullptr, ids);
  CHECK(g2.edge_count() == g.edge_count());
  for (NodeId u = 0; u < 40; ++u)
    for (NodeId v = 0; v < 40; ++v) {
      if (u == v) continue;
      NodeId u2 = *ids->find(std::to_string(u));
      NodeId v2 = *ids->find(std::to_string(v));
      CHECK(g.has_edge(u, v) == g2.has_edge(u2, v2));
    }

  CascadeLoadStats st;
  auto back = load_cascades(dir.path / "cascades.tsv", ids, &st);
  REQUIRE(back.size() == cascades.size());
  CHECK(st.repaired_parents == 0);
  CHECK(st.clamped_offsets == 0);
  for (std::size_t i = 0; i < back.size(); ++i) {
    const Cascade& a = cascades[i];
    const Cascade& b = back[i];
    CHECK(a.tweet_id == b.tweet_id);
    CHECK(a.post_time == b.post_time);
    CHECK(std::to_string(a.root) == ids->name(b.root));
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t e = 0; e < a.events.size(); ++e) {
      CHECK(std::to_string(a.events[e].user) == ids->name(b.events[e].user));
      CHECK(std::to_string(a.events[e].parent) == ids->name(b.events[e].parent));
      CHECK(a.events[e].offset_s == b.events[e].offset_s);
    }
  }
}

TEST_CASE("bundled corpus has the advertised shape") {
  SynthConfig cfg = bundled_corpus_config();
  CHECK(cfg.cascade_count >= 2000);
  CHECK(cfg.structure_boost > 0);
  validate(cfg);
}
