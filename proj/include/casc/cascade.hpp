#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "casc/errors.hpp"
#include "casc/ids.hpp"

namespace casc {

// One forwarding step: `user` forwarded the copy held by `parent`,
// `offset_s` seconds after the root post.
struct RetweetEvent {
  NodeId user = 0;
  NodeId parent = 0;
  std::int64_t offset_s = 0;
};

// One tweet's forwarding record. Events are sorted by offset, ties keep
// input order. After loading, every event's parent is the root or the user
// of an earlier event.
struct Cascade {
  std::string tweet_id;
  NodeId root = 0;
  std::int64_t post_time = 0;  // absolute unix seconds
  std::vector<RetweetEvent> events;
};

// What to do with an event whose parent is neither the root nor a user
// seen earlier in the cascade.
enum class OrphanPolicy { ReparentToRoot, Drop };

// Canonical cascade files are UTF-8 TSV with lines
// `tweet_id<TAB>user_id<TAB>parent_user_id<TAB>unix_timestamp`; the root
// record uses `-` as parent. Column indices / delimiter / marker are the
// adapter hook for foreign exports.
struct CascadeFileFormat {
  char delimiter = '\t';
  std::string root_marker = "-";
  int col_tweet = 0;
  int col_user = 1;
  int col_parent = 2;
  int col_time = 3;
  bool allow_extra_fields = false;
};

struct CascadeLoadStats {
  std::uint64_t cascades = 0;
  std::uint64_t events = 0;
  std::uint64_t repaired_parents = 0;
  std::uint64_t dropped_orphans = 0;
  std::uint64_t clamped_offsets = 0;
  std::uint64_t skipped_no_root = 0;   // cascades skipped for lack of a root record
  std::uint64_t dropped_lines = 0;     // records discarded with those cascades
  std::uint64_t duplicate_roots = 0;
  std::uint64_t self_retweets = 0;
};

// Streaming reader: yields one cascade at a time, holding only the current
// tweet's records. Requires the file to be grouped by tweet_id (a tweet_id
// reappearing after a different one raises DataError); this is what keeps
// whole-file passes at bounded memory.
class CascadeReader {
 public:
  CascadeReader(const std::filesystem::path& event_file, std::shared_ptr<IdMap> ids,
                OrphanPolicy policy = OrphanPolicy::ReparentToRoot,
                CascadeFileFormat fmt = {});

  // Next cascade, or nullopt at end of file.
  std::optional<Cascade> next();

  const CascadeLoadStats& stats() const { return stats_; }

 private:
  struct RawRecord {
    std::string user;
    std::string parent;  // empty for the root record
    std::int64_t ts = 0;
    bool is_root = false;
  };

  bool fetch_line_(std::string& out);
  std::optional<Cascade> finalize_(std::string tweet_id, std::vector<RawRecord>& block);

  std::ifstream in_;
  std::string path_;
  std::shared_ptr<IdMap> ids_;
  OrphanPolicy policy_;
  CascadeFileFormat fmt_;
  CascadeLoadStats stats_;
  std::size_t line_no_ = 0;
  std::string pending_;
  bool has_pending_ = false;
  std::unordered_set<std::string> seen_ids_;
};

// Loads every cascade in the file. Same parsing and repair rules as the
// streaming reader.
std::vector<Cascade> load_cascades(const std::filesystem::path& event_file,
                                   std::shared_ptr<IdMap> ids,
                                   CascadeLoadStats* stats = nullptr,
                                   OrphanPolicy policy = OrphanPolicy::ReparentToRoot,
                                   CascadeFileFormat fmt = {});

// Number of retweet events with offset <= t (root not counted).
std::int64_t popularity_at(const Cascade& c, std::int64_t t);

// The cascade restricted to events at offset <= t_i: root plus early
// adopters, with each adopter's earliest in-prefix parent link. Adopters
// are distinct users (set semantics).
struct CascadePrefix {
  const Cascade* cascade = nullptr;
  std::int64_t t_i = 0;
  NodeId root = 0;
  std::vector<NodeId> adopters;   // sorted ascending, includes root
  std::vector<NodeId> parent_of;  // aligned with adopters; root maps to itself
  std::uint64_t reparented = 0;   // prefix links redirected to root

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t index_of(NodeId u) const;
  bool is_adopter(NodeId u) const { return index_of(u) != npos; }
};

CascadePrefix prefix_at(const Cascade& c, std::int64_t t_i);

}  // namespace casc
