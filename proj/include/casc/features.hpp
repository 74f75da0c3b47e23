#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "casc/cascade.hpp"
#include "casc/graph.hpp"

namespace casc {

// Whether "all possible links" among n adopters means n(n-1) ordered pairs
// (default: followship is directed) or n(n-1)/2 unordered ones. The
// unordered reading keeps the directed link count and halves the
// denominator, so it rescales the density by 2.
enum class DensityPairs { Ordered, Unordered };

struct FeatureConfig {
  std::int64_t t_i = 3600;           // indicating time (observation cutoff), seconds
  std::int64_t t_r = 2592000;        // reference time (prediction horizon), seconds
  std::int64_t min_early = 1;        // inclusion filter on early popularity
  DensityPairs pairs = DensityPairs::Ordered;
  bool exclude_root = false;         // drop the submitter from the density node set
  double density_floor = 1e-6;       // ln-density floor for zero-link prefixes
};

void validate(const FeatureConfig& cfg);  // throws ConfigError

// Per-tweet regression inputs and targets. `density` is NaN when undefined
// (fewer than two nodes to relate); such rows stay out of the density
// model but remain usable by the others. `excluded_reason` is "-" for rows
// that pass the inclusion filter.
struct FeatureRow {
  std::string tweet_id;
  std::int64_t n_adopters = 0;  // distinct early adopters incl. the submitter
  std::int64_t early_pop = 0;   // p(t_i)
  std::int64_t final_pop = 0;   // p(t_r)
  double density = std::numeric_limits<double>::quiet_NaN();
  std::int64_t depth = 0;
  double ln_early = std::numeric_limits<double>::quiet_NaN();
  double ln_density = std::numeric_limits<double>::quiet_NaN();
  double ln_final = std::numeric_limits<double>::quiet_NaN();
  std::string excluded_reason = "-";

  bool included() const { return excluded_reason == "-"; }
  bool density_defined() const { return !std::isnan(density); }
};

// Followship links among the prefix adopters over all possible pairs.
// Returns nullopt when fewer than two nodes remain (lone root, or root
// excluded): density is undefined there. Adopters outside the graph carry
// no links but still count as nodes.
std::optional<double> link_density(const FollowerGraph& g, const CascadePrefix& pre,
                                   const FeatureConfig& cfg = {});

// Longest chain of forwarding hops from the submitter to any adopter
// within the prefix forest. 0 for a root-only prefix.
std::int64_t diffusion_depth(const CascadePrefix& pre);

// All features of one cascade under `cfg`. Pure; safe to fan out across
// cascades with the graph shared read-only.
FeatureRow feature_row(const FollowerGraph& g, const Cascade& c, const FeatureConfig& cfg);

// One row per cascade, in input order. `threads` > 1 maps cascades across
// workers; results are positionally assigned, so output is identical to
// the sequential run.
std::vector<FeatureRow> extract_features(const FollowerGraph& g,
                                         const std::vector<Cascade>& cascades,
                                         const FeatureConfig& cfg, unsigned threads = 1);

// Feature-config fingerprint carried in every output header so that
// artifacts from mismatched configs are refused downstream.
std::string config_fingerprint(const FeatureConfig& cfg);
FeatureConfig parse_fingerprint(std::string_view fp);

// Feature TSV: fingerprint comment, column header, one row per cascade.
void write_feature_header(std::ostream& os, const FeatureConfig& cfg);
void write_feature_row(std::ostream& os, const FeatureRow& row);

struct FeatureFile {
  FeatureConfig config;
  std::vector<FeatureRow> rows;
};
FeatureFile read_features(const std::filesystem::path& path);

}  // namespace casc
