// Test-only oracles: independent brute-force routes for everything the
// production code computes cleverly. These deliberately share no logic
// with the library implementations they check.
#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unistd.h>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "casc/cascade.hpp"
#include "casc/graph.hpp"

namespace oracle {

using casc::Cascade;
using casc::CascadePrefix;
using casc::FollowerGraph;
using casc::NodeId;

inline std::uint64_t edge_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

struct RandomGraph {
  FollowerGraph graph;
  std::unordered_set<std::uint64_t> edge_set;  // the raw deduplicated pairs
  NodeId n = 0;
};

// Erdos-Renyi-ish directed graph, kept alongside a hash-set mirror of its
// edges for exact membership checks.
inline RandomGraph random_graph(NodeId n, double p, std::mt19937_64& rng) {
  RandomGraph out;
  out.n = n;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = 0; b < n; ++b) {
      if (a == b) continue;
      if (u(rng) < p) {
        edges.emplace_back(a, b);
        out.edge_set.insert(edge_key(a, b));
      }
    }
  out.graph = FollowerGraph::from_edges(n, std::move(edges));
  return out;
}

// O(n^2) double loop over ordered member pairs.
inline std::uint64_t brute_count_links(const std::unordered_set<std::uint64_t>& edges,
                                       const std::vector<NodeId>& members) {
  std::uint64_t links = 0;
  for (NodeId a : members)
    for (NodeId b : members)
      if (a != b && edges.contains(edge_key(a, b))) ++links;
  return links;
}

// Linear scan popularity.
inline std::int64_t brute_popularity(const Cascade& c, std::int64_t t) {
  std::int64_t k = 0;
  for (const auto& ev : c.events)
    if (ev.offset_s <= t) ++k;
  return k;
}

// Adopter set by filtering events.
inline std::set<NodeId> brute_adopters(const Cascade& c, std::int64_t t_i) {
  std::set<NodeId> s{c.root};
  for (const auto& ev : c.events)
    if (ev.offset_s <= t_i) s.insert(ev.user);
  return s;
}

// Exhaustive per-adopter path walk over the prefix forest.
inline std::int64_t brute_depth(const CascadePrefix& pre) {
  std::int64_t best = 0;
  for (std::size_t i = 0; i < pre.adopters.size(); ++i) {
    std::int64_t hops = 0;
    std::size_t j = i;
    while (pre.adopters[j] != pre.root) {
      j = pre.index_of(pre.parent_of[j]);
      ++hops;
    }
    best = std::max(best, hops);
  }
  return best;
}

inline double brute_density(const std::unordered_set<std::uint64_t>& edges,
                            const std::vector<NodeId>& members, bool ordered = true) {
  const auto n = static_cast<double>(members.size());
  const double possible = ordered ? n * (n - 1.0) : n * (n - 1.0) / 2.0;
  return static_cast<double>(brute_count_links(edges, members)) / possible;
}

// Random structurally-valid cascade: each event's parent is the root or an
// earlier event's user.
inline Cascade random_cascade(NodeId n_users, std::size_t n_events, std::mt19937_64& rng,
                              std::int64_t max_offset = 10000) {
  Cascade c;
  c.tweet_id = "r" + std::to_string(rng() % 1000000);
  c.root = static_cast<NodeId>(rng() % n_users);
  c.post_time = 1309478400;
  std::vector<NodeId> pool{c.root};
  std::vector<std::int64_t> offsets(n_events);
  for (auto& o : offsets) o = static_cast<std::int64_t>(rng() % (max_offset + 1));
  std::sort(offsets.begin(), offsets.end());
  for (std::size_t i = 0; i < n_events; ++i) {
    NodeId user = static_cast<NodeId>(rng() % n_users);
    NodeId parent = pool[rng() % pool.size()];
    c.events.push_back({user, parent, offsets[i]});
    pool.push_back(user);
  }
  return c;
}

// OLS via explicit pseudo-inverse: adjugate inversion of X'X (k <= 3) in
// extended precision. Independent of the elimination path in the library.
inline std::vector<double> pinv_ols(const std::vector<std::array<double, 3>>& xs,
                                    const std::vector<double>& ys, int k) {
  long double xtx[3][3] = {}, xty[3] = {};
  for (std::size_t r = 0; r < xs.size(); ++r)
    for (int i = 0; i < k; ++i) {
      xty[i] += static_cast<long double>(xs[r][i]) * ys[r];
      for (int j = 0; j < k; ++j)
        xtx[i][j] += static_cast<long double>(xs[r][i]) * xs[r][j];
    }

  long double inv[3][3] = {};
  if (k == 2) {
    const long double det = xtx[0][0] * xtx[1][1] - xtx[0][1] * xtx[1][0];
    inv[0][0] = xtx[1][1] / det;
    inv[0][1] = -xtx[0][1] / det;
    inv[1][0] = -xtx[1][0] / det;
    inv[1][1] = xtx[0][0] / det;
  } else {
    const long double det =
        xtx[0][0] * (xtx[1][1] * xtx[2][2] - xtx[1][2] * xtx[2][1]) -
        xtx[0][1] * (xtx[1][0] * xtx[2][2] - xtx[1][2] * xtx[2][0]) +
        xtx[0][2] * (xtx[1][0] * xtx[2][1] - xtx[1][1] * xtx[2][0]);
    auto cof = [&](int r0, int r1, int c0, int c1) {
      return xtx[r0][c0] * xtx[r1][c1] - xtx[r0][c1] * xtx[r1][c0];
    };
    inv[0][0] = cof(1, 2, 1, 2) / det;
    inv[0][1] = -cof(0, 2, 1, 2) / det;
    inv[0][2] = cof(0, 1, 1, 2) / det;
    inv[1][0] = -cof(1, 2, 0, 2) / det;
    inv[1][1] = cof(0, 2, 0, 2) / det;
    inv[1][2] = -cof(0, 1, 0, 2) / det;
    inv[2][0] = cof(1, 2, 0, 1) / det;
    inv[2][1] = -cof(0, 2, 0, 1) / det;
    inv[2][2] = cof(0, 1, 0, 1) / det;
  }

  std::vector<double> beta(k);
  for (int i = 0; i < k; ++i) {
    long double s = 0;
    for (int j = 0; j < k; ++j) s += inv[i][j] * xty[j];
    beta[i] = static_cast<double>(s);
  }
  return beta;
}

// Naive O(n^2) average ranks: 1 + #smaller + (#equal - 1)/2.
inline std::vector<double> naive_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t smaller = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++smaller;
      if (v[j] == v[i]) ++equal;
    }
    ranks[i] = 1.0 + static_cast<double>(smaller) + (static_cast<double>(equal) - 1.0) / 2.0;
  }
  return ranks;
}

inline double naive_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ra = naive_ranks(a), rb = naive_ranks(b);
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

// Scratch directory unique to this process, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           (tag + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace oracle
