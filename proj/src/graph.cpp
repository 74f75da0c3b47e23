#include "casc/graph.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "casc/util.hpp"

namespace casc {

FollowerGraph FollowerGraph::from_edges(NodeId node_count,
                                        std::vector<std::pair<NodeId, NodeId>> edges,
                                        std::shared_ptr<IdMap> ids,
                                        GraphLoadStats* stats) {
  GraphLoadStats local;
  GraphLoadStats& st = stats ? *stats : local;

  std::erase_if(edges, [&](const auto& e) {
    if (e.first == e.second) {
      ++st.self_loops;
      return true;
    }
    return false;
  });
  std::sort(edges.begin(), edges.end());
  auto dup_begin = std::unique(edges.begin(), edges.end());
  st.duplicate_edges += static_cast<std::uint64_t>(edges.end() - dup_begin);
  edges.erase(dup_begin, edges.end());
  st.edges_kept = edges.size();

  FollowerGraph g;
  g.ids_ = ids ? std::move(ids) : IdMap::identity(node_count);
  g.offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
  g.adj_.resize(edges.size());
  for (const auto& [u, v] : edges) {
    if (u >= node_count || v >= node_count)
      throw DataError("from_edges: node id exceeds node_count");
    ++g.offsets_[u + 1];
  }
  for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
  for (std::size_t i = 0; i < edges.size(); ++i) g.adj_[i] = edges[i].second;
  return g;
}

bool FollowerGraph::has_edge(NodeId u, NodeId v) const {
  if (u >= node_count() || v >= node_count())
    throw DataError("has_edge: node id out of range");
  auto neigh = out(u);
  return std::binary_search(neigh.begin(), neigh.end(), v);
}

std::span<const NodeId> FollowerGraph::out(NodeId u) const {
  if (u >= node_count()) throw DataError("out: node id out of range");
  return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
}

std::uint64_t FollowerGraph::count_links_among(std::span<const NodeId> members) const {
  std::uint64_t links = 0;
  for (NodeId u : members) {
    auto neigh = out(u);
    if (neigh.size() <= members.size()) {
      for (NodeId v : neigh)
        if (std::binary_search(members.begin(), members.end(), v)) ++links;
    } else {
      for (NodeId v : members) {
        if (v == u) continue;
        if (std::binary_search(neigh.begin(), neigh.end(), v)) ++links;
      }
    }
  }
  return links;
}

FollowerGraph load_graph(const std::filesystem::path& edge_file, const EdgeFileFormat& fmt,
                         GraphLoadStats* stats, std::shared_ptr<IdMap> ids) {
  std::ifstream in(edge_file);
  if (!in) throw DataError("cannot open graph file: " + edge_file.string());
  if (!ids) ids = std::make_shared<IdMap>();

  GraphLoadStats local;
  GraphLoadStats& st = stats ? *stats : local;

  std::vector<std::pair<NodeId, NodeId>> edges;
  std::string line;
  std::size_t line_no = 0;
  const std::string path_str = edge_file.string();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line, fmt.delimiter);
    if (fields.size() < 2 || (!fmt.allow_extra_fields && fields.size() != 2))
      throw ParseError(path_str, line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    std::string_view fa = fields[0], fb = fields[1];
    if (fmt.swap_columns) std::swap(fa, fb);
    if (fa.empty() || fb.empty()) throw ParseError(path_str, line_no, "empty node id");
    NodeId u = ids->intern(fa);
    NodeId v = ids->intern(fb);
    edges.emplace_back(u, v);
    ++st.data_lines;
  }
  if (st.data_lines == 0) throw DataError("empty graph file: " + path_str);
  return FollowerGraph::from_edges(static_cast<NodeId>(ids->size()), std::move(edges), ids, &st);
}

}  // namespace casc
