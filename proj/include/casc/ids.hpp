#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "casc/errors.hpp"

namespace casc {

// Dense internal user index. External ids are arbitrary strings; they are
// remapped at ingestion so downstream sets stay array-friendly.
using NodeId = std::uint32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};
struct StringEq {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const noexcept { return a == b; }
};

// External-id <-> NodeId bijection. Grows monotonically; an id once
// assigned never changes, so structures built against earlier ids stay
// valid while later ingestion (e.g. cascade logs) extends the universe.
class IdMap {
 public:
  NodeId intern(std::string_view external) {
    auto it = index_.find(external);
    if (it != index_.end()) return it->second;
    NodeId id = static_cast<NodeId>(names_.size());
    names_.emplace_back(external);
    index_.emplace(names_.back(), id);
    return id;
  }

  std::optional<NodeId> find(std::string_view external) const {
    auto it = index_.find(external);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(NodeId id) const {
    if (id >= names_.size()) throw DataError("IdMap: node id out of range");
    return names_[id];
  }

  std::size_t size() const { return names_.size(); }

  // Map whose external names are the decimal node indices themselves.
  static std::shared_ptr<IdMap> identity(std::size_t n) {
    auto m = std::make_shared<IdMap>();
    m->names_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) m->intern(std::to_string(i));
    return m;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId, StringHash, StringEq> index_;
};

}  // namespace casc
