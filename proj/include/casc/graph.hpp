#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "casc/errors.hpp"
#include "casc/ids.hpp"

namespace casc {

// Canonical edge files are UTF-8 TSV, one `follower<TAB>followee` pair per
// line, `#` comment lines and blank lines skipped. The adapter knobs cover
// exports with other delimiters, swapped columns or trailing extra fields.
struct EdgeFileFormat {
  char delimiter = '\t';
  bool swap_columns = false;
  bool allow_extra_fields = false;
};

struct GraphLoadStats {
  std::uint64_t data_lines = 0;
  std::uint64_t edges_kept = 0;
  std::uint64_t duplicate_edges = 0;
  std::uint64_t self_loops = 0;
};

// Immutable directed follower graph. Edge u->v means "u follows v".
// Out-adjacency is stored sorted per node, so edge existence is a binary
// search and induced-subgraph link counting can intersect against sorted
// member sets. Safe to share across threads after construction.
class FollowerGraph {
 public:
  FollowerGraph() = default;

  // Deduplicates, drops self-loops (counted in stats) and sorts adjacency.
  // `node_count` must cover every id referenced by `edges`.
  static FollowerGraph from_edges(NodeId node_count,
                                  std::vector<std::pair<NodeId, NodeId>> edges,
                                  std::shared_ptr<IdMap> ids = nullptr,
                                  GraphLoadStats* stats = nullptr);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::uint64_t edge_count() const { return adj_.size(); }

  // True iff u follows v. Throws DataError for ids outside the graph.
  bool has_edge(NodeId u, NodeId v) const;

  // Sorted followees of u.
  std::span<const NodeId> out(NodeId u) const;
  std::size_t out_degree(NodeId u) const { return out(u).size(); }

  // Number of ordered pairs (u,v), u != v, both in `members`, with u
  // following v. `members` must be sorted ascending, unique, and within
  // the graph. Per member the smaller of its adjacency and the member set
  // is scanned against the other.
  std::uint64_t count_links_among(std::span<const NodeId> members) const;

  const std::shared_ptr<IdMap>& ids() const { return ids_; }

 private:
  std::vector<std::uint64_t> offsets_;  // node_count + 1
  std::vector<NodeId> adj_;             // sorted followees, grouped by follower
  std::shared_ptr<IdMap> ids_;
};

// Parses an edge file into an immutable graph. Every external id seen in
// the file is interned into `ids` (a fresh map is created when null).
// Malformed lines raise ParseError with the offending line number; a file
// with no edge lines at all raises DataError.
FollowerGraph load_graph(const std::filesystem::path& edge_file,
                         const EdgeFileFormat& fmt = {},
                         GraphLoadStats* stats = nullptr,
                         std::shared_ptr<IdMap> ids = nullptr);

}  // namespace casc
