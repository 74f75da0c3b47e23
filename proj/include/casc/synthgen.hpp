#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "casc/cascade.hpp"
#include "casc/features.hpp"
#include "casc/graph.hpp"

namespace casc {

// Synthetic corpus knobs. The planted-partition graph gives denser
// followship inside communities; the cascade simulator couples the
// per-exposure adoption probability to the community diversity of the
// adopters so far, which is what makes early structural diversity causally
// matter for final popularity. `seed` fixes all randomness.
struct SynthConfig {
  std::uint32_t n_nodes = 9600;
  std::uint32_t n_communities = 120;
  double p_in = 0.35;      // edge probability within a community
  double p_out = 2.5e-6;   // edge probability across communities
  // relative fan of p_in across communities (0 = identical communities;
  // 0.8 = within-densities range over p_in * [0.2, 1.8]); deterministic
  // per community index
  double p_in_spread = 0.0;
  std::uint32_t cascade_count = 2500;
  double transmission = 0.5;     // base adoption probability per exposure
  double structure_boost = 4.0;  // coupling of adopter diversity to adoption
  std::int64_t max_sim_time = 2592000;  // seconds
  double mean_gap_s = 2000.0;           // mean exponential inter-event gap
  std::uint64_t seed = 1;
};

void validate(const SynthConfig& cfg);  // throws ConfigError
std::string synth_fingerprint(const SynthConfig& cfg);

// Contiguous equal blocks; the last community absorbs the remainder.
std::uint32_t community_of(NodeId u, std::uint32_t n_nodes, std::uint32_t n_communities);

// Planted-partition directed graph: ordered pair (u,v) gets an edge with
// probability p_in inside a community, p_out across. Sparse probabilities
// are sampled with geometric gap skipping, so generation is linear in the
// number of edges.
FollowerGraph gen_graph(const SynthConfig& cfg);

// Independent-cascade simulation over the follower graph (a user is
// exposed through each followee that adopted). Events carry true parent
// attribution and integer-second offsets; inter-event gaps are exponential
// with mean `mean_gap_s`.
std::vector<Cascade> gen_cascades(const FollowerGraph& g, const SynthConfig& cfg);

// Ground-truth features recomputed from first principles: linear scans for
// popularity, a hash-set double loop for links, parent-chain walks for
// depth. Deliberately shares no code with the production feature path; it
// is the oracle the pipeline is checked against.
std::vector<FeatureRow> truth_features(const FollowerGraph& g,
                                       const std::vector<Cascade>& cascades,
                                       const FeatureConfig& fcfg);

// Writes graph.tsv / cascades.tsv / truth.tsv in the canonical formats, so
// the corpus exercises the real ingestion path.
void write_corpus(const std::filesystem::path& dir, const FollowerGraph& g,
                  const std::vector<Cascade>& cascades, const std::vector<FeatureRow>& truth,
                  const SynthConfig& cfg, const FeatureConfig& fcfg);

// The pinned fixed-seed corpus used by the qualitative regression checks.
SynthConfig bundled_corpus_config();

}  // namespace casc
