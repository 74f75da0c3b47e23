#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "casc/regression.hpp"

namespace casc {

// Deterministic uniform partition at cascade granularity: train gets
// floor(n * train_frac) rows, test the remainder. Same seed, same rows,
// same partition.
struct SplitResult {
  std::vector<FeatureRow> train;
  std::vector<FeatureRow> test;
};
SplitResult split(std::span<const FeatureRow> rows, double train_frac, std::uint64_t seed);

struct EvalReport {
  ModelVariant variant = ModelVariant::Baseline;
  double rmse = 0;
  double mae = 0;
  std::size_t n_test = 0;
  std::uint64_t split_seed = 0;
};

// RMSE and MAE of ln-popularity predictions over the test rows. Every row
// must be valid for the model's variant; the test set must be non-empty.
// `clamp_predictions` floors each prediction at the observed early
// popularity (off by default: the models themselves do not clamp).
EvalReport score(const ModelCoefficients& m, std::span<const FeatureRow> test_rows,
                 std::uint64_t split_seed, bool clamp_predictions = false);

enum class BinAxis { Density, Depth };

struct Bin {
  double lo = 0, hi = 0;  // half-open [lo, hi); the last density bin closes at 1
  double mean_final_pop = 0;
  std::uint64_t count = 0;
};

// Final popularity summarized along one structural axis. Density uses
// n_bins equal-width bins over [0,1]; depth uses one bin per integer
// value. Empty bins are emitted with count 0 and NaN mean. Rows without a
// defined axis value (undefined density, excluded rows) are skipped.
struct BinSummary {
  BinAxis axis = BinAxis::Density;
  std::vector<Bin> bins;
};
BinSummary bin_summary(std::span<const FeatureRow> rows, BinAxis axis, int n_bins);

// Spearman rank correlation (average-rank ties) between the axis value and
// final popularity. nullopt when fewer than 3 usable rows or either side
// is constant.
std::optional<double> spearman(std::span<const FeatureRow> rows, BinAxis axis);

// TSV block per variant, fingerprint first.
void write_report(std::ostream& os, std::span<const EvalReport> reports,
                  const std::string& fingerprint, double train_frac);

// CSV `bin_lo,bin_hi,mean_final_pop,count` for external plotting.
void write_bins_csv(std::ostream& os, const BinSummary& summary, const std::string& fingerprint);

}  // namespace casc
