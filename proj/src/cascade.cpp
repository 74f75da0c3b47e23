#include "casc/cascade.hpp"

#include <algorithm>
#include <unordered_map>

#include "casc/util.hpp"

namespace casc {

CascadeReader::CascadeReader(const std::filesystem::path& event_file,
                             std::shared_ptr<IdMap> ids, OrphanPolicy policy,
                             CascadeFileFormat fmt)
    : in_(event_file), path_(event_file.string()), ids_(std::move(ids)),
      policy_(policy), fmt_(std::move(fmt)) {
  if (!in_) throw DataError("cannot open cascade file: " + path_);
  if (!ids_) throw DataError("CascadeReader: null id map");
}

bool CascadeReader::fetch_line_(std::string& out) {
  if (has_pending_) {
    out = std::move(pending_);
    has_pending_ = false;
    return true;
  }
  while (std::getline(in_, out)) {
    ++line_no_;
    if (out.empty() || out[0] == '#') continue;
    return true;
  }
  return false;
}

std::optional<Cascade> CascadeReader::next() {
  const int max_col = std::max({fmt_.col_tweet, fmt_.col_user, fmt_.col_parent, fmt_.col_time});
  std::string line;
  while (true) {
    std::string block_id;
    std::vector<RawRecord> block;
    while (fetch_line_(line)) {
      auto fields = split_fields(line, fmt_.delimiter);
      if (static_cast<int>(fields.size()) <= max_col ||
          (!fmt_.allow_extra_fields && static_cast<int>(fields.size()) != max_col + 1))
        throw ParseError(path_, line_no_,
                         "expected " + std::to_string(max_col + 1) + " fields, got " +
                             std::to_string(fields.size()));
      std::string_view tweet = fields[fmt_.col_tweet];
      if (tweet.empty()) throw ParseError(path_, line_no_, "empty tweet id");
      if (block.empty()) {
        if (auto [it, fresh] = seen_ids_.emplace(tweet); !fresh)
          throw DataError(path_ + ": cascade file not grouped by tweet_id ('" +
                          std::string(tweet) + "' reappears around line " +
                          std::to_string(line_no_) + ")");
        block_id = std::string(tweet);
      } else if (tweet != block_id) {
        pending_ = std::move(line);
        has_pending_ = true;
        break;
      }
      RawRecord rec;
      rec.user = std::string(fields[fmt_.col_user]);
      std::string_view parent = fields[fmt_.col_parent];
      rec.is_root = (parent == fmt_.root_marker);
      if (!rec.is_root) rec.parent = std::string(parent);
      if (rec.user.empty()) throw ParseError(path_, line_no_, "empty user id");
      if (!parse_i64(fields[fmt_.col_time], rec.ts))
        throw ParseError(path_, line_no_, "bad timestamp '" + std::string(fields[fmt_.col_time]) + "'");
      block.push_back(std::move(rec));
    }
    if (block.empty()) return std::nullopt;  // end of file
    if (auto c = finalize_(std::move(block_id), block)) return c;
    // block had no root record; move on to the next one
  }
}

std::optional<Cascade> CascadeReader::finalize_(std::string tweet_id,
                                                std::vector<RawRecord>& block) {
  const RawRecord* root_rec = nullptr;
  for (const auto& rec : block) {
    if (!rec.is_root) continue;
    if (root_rec) {
      ++stats_.duplicate_roots;
      continue;
    }
    root_rec = &rec;
  }
  if (!root_rec) {
    ++stats_.skipped_no_root;
    stats_.dropped_lines += block.size();
    return std::nullopt;
  }

  Cascade c;
  c.tweet_id = std::move(tweet_id);
  c.root = ids_->intern(root_rec->user);
  c.post_time = root_rec->ts;

  struct PendingEvent {
    NodeId user;
    std::string parent;
    std::int64_t offset;
  };
  std::vector<PendingEvent> pend;
  pend.reserve(block.size());
  for (const auto& rec : block) {
    if (rec.is_root) continue;
    std::int64_t offset = rec.ts - c.post_time;
    if (offset < 0) {
      offset = 0;
      ++stats_.clamped_offsets;
    }
    NodeId user = ids_->intern(rec.user);
    if (user == c.root) ++stats_.self_retweets;
    pend.push_back({user, rec.parent, offset});
  }
  std::stable_sort(pend.begin(), pend.end(),
                   [](const PendingEvent& a, const PendingEvent& b) { return a.offset < b.offset; });

  // Attribution repair: a parent must be the root or the user of an
  // earlier event. Orphans are re-parented to the root or dropped.
  std::unordered_set<NodeId> seen{c.root};
  c.events.reserve(pend.size());
  for (const auto& ev : pend) {
    NodeId parent = c.root;
    bool valid = false;
    if (auto pid = ids_->find(ev.parent)) {
      if (seen.contains(*pid)) {
        parent = *pid;
        valid = true;
      }
    }
    if (!valid) {
      if (policy_ == OrphanPolicy::Drop) {
        ++stats_.dropped_orphans;
        continue;
      }
      ++stats_.repaired_parents;
    }
    c.events.push_back({ev.user, parent, ev.offset});
    seen.insert(ev.user);
  }

  ++stats_.cascades;
  stats_.events += c.events.size();
  return c;
}

std::vector<Cascade> load_cascades(const std::filesystem::path& event_file,
                                   std::shared_ptr<IdMap> ids, CascadeLoadStats* stats,
                                   OrphanPolicy policy, CascadeFileFormat fmt) {
  CascadeReader reader(event_file, std::move(ids), policy, std::move(fmt));
  std::vector<Cascade> out;
  while (auto c = reader.next()) out.push_back(std::move(*c));
  if (stats) *stats = reader.stats();
  return out;
}

std::int64_t popularity_at(const Cascade& c, std::int64_t t) {
  auto it = std::upper_bound(c.events.begin(), c.events.end(), t,
                             [](std::int64_t lhs, const RetweetEvent& e) { return lhs < e.offset_s; });
  return static_cast<std::int64_t>(it - c.events.begin());
}

std::size_t CascadePrefix::index_of(NodeId u) const {
  auto it = std::lower_bound(adopters.begin(), adopters.end(), u);
  if (it == adopters.end() || *it != u) return npos;
  return static_cast<std::size_t>(it - adopters.begin());
}

CascadePrefix prefix_at(const Cascade& c, std::int64_t t_i) {
  CascadePrefix pre;
  pre.cascade = &c;
  pre.t_i = t_i;
  pre.root = c.root;

  // Earliest in-prefix parent link per user.
  std::unordered_map<NodeId, NodeId> first_parent;
  for (const auto& ev : c.events) {
    if (ev.offset_s > t_i) break;  // events sorted by offset
    first_parent.try_emplace(ev.user, ev.parent);
  }

  pre.adopters.reserve(first_parent.size() + 1);
  pre.adopters.push_back(c.root);
  for (const auto& [user, parent] : first_parent)
    if (user != c.root) pre.adopters.push_back(user);
  std::sort(pre.adopters.begin(), pre.adopters.end());
  pre.adopters.erase(std::unique(pre.adopters.begin(), pre.adopters.end()), pre.adopters.end());

  pre.parent_of.resize(pre.adopters.size());
  for (std::size_t i = 0; i < pre.adopters.size(); ++i) {
    NodeId u = pre.adopters[i];
    if (u == c.root) {
      pre.parent_of[i] = c.root;
      continue;
    }
    NodeId p = first_parent.at(u);
    if (p == u || pre.index_of(p) == CascadePrefix::npos) {
      // parent adopts only after t_i (or self-link): attach to root
      p = c.root;
      ++pre.reparented;
    }
    pre.parent_of[i] = p;
  }
  return pre;
}

}  // namespace casc
