#include "casc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "casc/util.hpp"

namespace casc {

SplitResult split(std::span<const FeatureRow> rows, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw ConfigError("train fraction must be in (0,1)");
  const std::size_t n = rows.size();
  if (n < 2) throw DataError("split needs at least 2 rows, got " + std::to_string(n));
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_frac));
  if (n_train == 0 || n_train == n)
    throw DataError("degenerate split: " + std::to_string(n_train) + "/" +
                    std::to_string(n - n_train) + " of " + std::to_string(n));

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // explicit Fisher-Yates: the partition must not depend on the standard
  // library's shuffle implementation
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(idx[i], idx[j]);
  }

  SplitResult out;
  out.train.reserve(n_train);
  out.test.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i)
    (i < n_train ? out.train : out.test).push_back(rows[idx[i]]);
  return out;
}

EvalReport score(const ModelCoefficients& m, std::span<const FeatureRow> test_rows,
                 std::uint64_t split_seed, bool clamp_predictions) {
  if (test_rows.empty()) throw DataError("score: empty test set");
  double sq = 0, ab = 0;
  for (const auto& row : test_rows) {
    double pred = predict_ln(m, row);
    if (clamp_predictions) pred = std::max(pred, row.ln_early);
    const double e = pred - row.ln_final;
    sq += e * e;
    ab += std::abs(e);
  }
  const auto n = static_cast<double>(test_rows.size());
  EvalReport rep;
  rep.variant = m.variant;
  rep.rmse = std::sqrt(sq / n);
  rep.mae = ab / n;
  rep.n_test = test_rows.size();
  rep.split_seed = split_seed;
  if (!(rep.rmse >= rep.mae - 1e-12))
    throw NumericError("rmse < mae: arithmetic fault in score()");
  return rep;
}

namespace {

// (value, final popularity) pairs for rows where the axis is defined
std::vector<std::pair<double, double>> axis_values(std::span<const FeatureRow> rows,
                                                   BinAxis axis) {
  std::vector<std::pair<double, double>> vals;
  vals.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.included()) continue;
    if (axis == BinAxis::Density) {
      if (!row.density_defined()) continue;
      vals.emplace_back(row.density, static_cast<double>(row.final_pop));
    } else {
      vals.emplace_back(static_cast<double>(row.depth), static_cast<double>(row.final_pop));
    }
  }
  return vals;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

BinSummary bin_summary(std::span<const FeatureRow> rows, BinAxis axis, int n_bins) {
  if (rows.empty()) throw DataError("bin_summary: no rows");
  auto vals = axis_values(rows, axis);
  if (vals.empty()) throw DataError("bin_summary: no rows with a defined axis value");

  BinSummary out;
  out.axis = axis;
  if (axis == BinAxis::Density) {
    if (n_bins < 2) throw ConfigError("density binning needs n_bins >= 2");
    out.bins.resize(n_bins);
    std::vector<double> sums(n_bins, 0.0);
    for (int b = 0; b < n_bins; ++b) {
      out.bins[b].lo = static_cast<double>(b) / n_bins;
      out.bins[b].hi = static_cast<double>(b + 1) / n_bins;
    }
    for (auto [rho, fin] : vals) {
      int b = std::min(static_cast<int>(rho * n_bins), n_bins - 1);
      b = std::max(b, 0);
      sums[b] += fin;
      ++out.bins[b].count;
    }
    for (int b = 0; b < n_bins; ++b)
      out.bins[b].mean_final_pop = out.bins[b].count
                                       ? sums[b] / static_cast<double>(out.bins[b].count)
                                       : std::numeric_limits<double>::quiet_NaN();
  } else {
    std::int64_t max_depth = 0;
    for (auto [d, fin] : vals) max_depth = std::max(max_depth, static_cast<std::int64_t>(d));
    out.bins.resize(static_cast<std::size_t>(max_depth) + 1);
    std::vector<double> sums(out.bins.size(), 0.0);
    for (std::size_t b = 0; b < out.bins.size(); ++b) {
      out.bins[b].lo = static_cast<double>(b);
      out.bins[b].hi = static_cast<double>(b + 1);
    }
    for (auto [d, fin] : vals) {
      auto b = static_cast<std::size_t>(d);
      sums[b] += fin;
      ++out.bins[b].count;
    }
    for (std::size_t b = 0; b < out.bins.size(); ++b)
      out.bins[b].mean_final_pop = out.bins[b].count
                                       ? sums[b] / static_cast<double>(out.bins[b].count)
                                       : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::optional<double> spearman(std::span<const FeatureRow> rows, BinAxis axis) {
  auto vals = axis_values(rows, axis);
  if (vals.size() < 3) return std::nullopt;
  std::vector<double> a(vals.size()), b(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    a[i] = vals[i].first;
    b[i] = vals[i].second;
  }
  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  const auto n = static_cast<double>(ra.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - ma, db = rb[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0 || vb == 0) return std::nullopt;  // constant axis or constant popularity
  return cov / std::sqrt(va * vb);
}

void write_report(std::ostream& os, std::span<const EvalReport> reports,
                  const std::string& fingerprint, double train_frac) {
  os << "# config: " << fingerprint << ";train_frac=" << fmt_double(train_frac) << "\n";
  os << "variant\trmse\tmae\tn_test\tsplit_seed\n";
  for (const auto& rep : reports)
    os << variant_name(rep.variant) << '\t' << fmt_double(rep.rmse) << '\t'
       << fmt_double(rep.mae) << '\t' << rep.n_test << '\t' << rep.split_seed << "\n";
}

void write_bins_csv(std::ostream& os, const BinSummary& summary, const std::string& fingerprint) {
  os << "# config: " << fingerprint
     << ";axis=" << (summary.axis == BinAxis::Density ? "density" : "depth") << "\n";
  os << "bin_lo,bin_hi,mean_final_pop,count\n";
  for (const auto& bin : summary.bins)
    os << fmt_double(bin.lo) << ',' << fmt_double(bin.hi) << ','
       << fmt_double(bin.mean_final_pop) << ',' << bin.count << "\n";
}

}  // namespace casc
