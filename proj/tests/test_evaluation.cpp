#include <algorithm>
#include <cmath>
#include <sstream>

#include "casc/evaluation.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace casc;

namespace {

FeatureRow row_with(double ln_final, double density = 0.5, std::int64_t depth = 1,
                    std::int64_t final_pop = 10) {
  FeatureRow row;
  row.tweet_id = "t";
  row.early_pop = 2;
  row.final_pop = final_pop;
  row.density = density;
  row.depth = depth;
  row.ln_early = std::log(2.0);
  row.ln_density = std::log(density);
  row.ln_final = ln_final;
  return row;
}

std::vector<FeatureRow> n_rows(std::size_t n) {
  std::vector<FeatureRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = row_with(1.0 + static_cast<double>(i));
    row.tweet_id = "t" + std::to_string(i);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("split honors sizes, determinism and the partition laws") {
  auto rows = n_rows(100);
  auto parts = split(rows, 0.75, 42);
  CHECK(parts.train.size() == 75);
  CHECK(parts.test.size() == 25);

  auto again = split(rows, 0.75, 42);
  for (std::size_t i = 0; i < parts.train.size(); ++i)
    CHECK(parts.train[i].tweet_id == again.train[i].tweet_id);
  for (std::size_t i = 0; i < parts.test.size(); ++i)
    CHECK(parts.test[i].tweet_id == again.test[i].tweet_id);

  std::set<std::string> all;
  for (const auto& row : parts.train) all.insert(row.tweet_id);
  std::size_t train_count = all.size();
  CHECK(train_count == parts.train.size());  // no duplicates
  for (const auto& row : parts.test) all.insert(row.tweet_id);
  CHECK(all.size() == rows.size());  // union is the input, intersection empty

  auto other_seed = split(rows, 0.75, 43);
  bool same = true;
  for (std::size_t i = 0; i < parts.train.size(); ++i)
    same = same && parts.train[i].tweet_id == other_seed.train[i].tweet_id;
  CHECK_FALSE(same);
}

TEST_CASE("split rejects degenerate requests") {
  auto rows = n_rows(4);
  CHECK_THROWS_AS(split(rows, 0.1, 1), DataError);   // empty train
  CHECK_THROWS_AS(split(rows, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(split(rows, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(split(n_rows(1), 0.5, 1), DataError);
}

TEST_CASE("score arithmetic on pinned unit cases") {
  // baseline with gamma = (0,c): prediction is the constant c
  auto with_residuals = [](const std::vector<double>& residuals) {
    std::vector<FeatureRow> rows;
    for (double r : residuals) rows.push_back(row_with(-r));  // pred 0, target -r -> error r
    ModelCoefficients m{ModelVariant::Baseline, {0.0, 0.0}, 2, ""};
    return score(m, rows, 7);
  };

  auto perfect = with_residuals({0, 0, 0});
  CHECK(perfect.rmse == 0.0);
  CHECK(perfect.mae == 0.0);

  auto pm3 = with_residuals({0.3, -0.3});
  CHECK(pm3.rmse == 0.3);
  CHECK(pm3.mae == 0.3);

  auto mixed = with_residuals({1, 0, 0, 0});
  CHECK(mixed.rmse == 0.5);
  CHECK(mixed.mae == 0.25);
  CHECK(mixed.n_test == 4);
  CHECK(mixed.split_seed == 7);

  ModelCoefficients m{ModelVariant::Baseline, {0.0, 0.0}, 2, ""};
  CHECK_THROWS_AS(score(m, {}, 7), DataError);
}

TEST_CASE("clamped scoring floors predictions at the early popularity") {
  // model predicts below ln_early for every row
  ModelCoefficients m{ModelVariant::Baseline, {0.0, -1.0}, 2, ""};
  std::vector<FeatureRow> rows{row_with(std::log(2.0)), row_with(std::log(2.0))};
  auto raw = score(m, rows, 1);
  auto clamped = score(m, rows, 1, true);
  // unclamped error |-1 - ln 2|, clamped error |ln 2 - ln 2| = 0
  CHECK(raw.mae == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-12));
  CHECK(clamped.rmse == 0.0);
  CHECK(clamped.mae == 0.0);
}

TEST_CASE("rmse dominates mae and permutation leaves scores unchanged") {
  std::mt19937_64 rng(83);
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 200; ++i)
    rows.push_back(row_with((rng() % 1000) / 250.0));
  ModelCoefficients m{ModelVariant::Baseline, {0.5, 0.2}, 10, ""};
  auto rep = score(m, rows, 1);
  CHECK(rep.rmse >= rep.mae);

  std::shuffle(rows.begin(), rows.end(), rng);
  auto rep2 = score(m, rows, 1);
  CHECK(rep2.rmse == doctest::Approx(rep.rmse).epsilon(1e-12));
  CHECK(rep2.mae == doctest::Approx(rep.mae).epsilon(1e-12));
}

TEST_CASE("density bins partition [0,1] and depth bins are exact integers") {
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 6; ++i) rows.push_back(row_with(1.0, 0.5, 1, 20));
  auto summary = bin_summary(rows, BinAxis::Density, 10);
  REQUIRE(summary.bins.size() == 10);
  std::uint64_t total = 0;
  for (const auto& bin : summary.bins) total += bin.count;
  CHECK(total == 6);
  CHECK(summary.bins[5].count == 6);  // all mass in [0.5, 0.6)
  CHECK(summary.bins[5].mean_final_pop == 20.0);
  CHECK(summary.bins[4].count == 0);
  CHECK(std::isnan(summary.bins[4].mean_final_pop));

  std::vector<FeatureRow> drows{row_with(1, 0.5, 1, 10), row_with(1, 0.5, 1, 20),
                                row_with(1, 0.5, 2, 30)};
  auto dsum = bin_summary(drows, BinAxis::Depth, 10);
  REQUIRE(dsum.bins.size() == 3);  // depths 0,1,2
  CHECK(dsum.bins[1].count == 2);
  CHECK(dsum.bins[1].mean_final_pop == 15.0);
  CHECK(dsum.bins[2].count == 1);
  CHECK(dsum.bins[2].mean_final_pop == 30.0);
  CHECK(dsum.bins[0].count == 0);
}

TEST_CASE("bin means recombine to the global mean") {
  std::mt19937_64 rng(89);
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 500; ++i) {
    double rho = (rng() % 1001) / 1000.0;
    auto final_pop = static_cast<std::int64_t>(1 + rng() % 1000);
    rows.push_back(row_with(1.0, rho, static_cast<std::int64_t>(rng() % 8), final_pop));
  }
  auto summary = bin_summary(rows, BinAxis::Density, 7);

  // flat-scan oracle per bin
  std::uint64_t total = 0;
  double weighted = 0;
  double global = 0;
  for (const auto& bin : summary.bins) {
    total += bin.count;
    if (bin.count) weighted += bin.mean_final_pop * static_cast<double>(bin.count);
    double sum = 0;
    std::uint64_t cnt = 0;
    for (const auto& row : rows) {
      bool in = row.density >= bin.lo && (row.density < bin.hi || (bin.hi == 1.0 && row.density == 1.0));
      if (in) {
        sum += static_cast<double>(row.final_pop);
        ++cnt;
      }
    }
    CHECK(bin.count == cnt);
    if (cnt) CHECK(bin.mean_final_pop == doctest::Approx(sum / cnt).epsilon(1e-12));
  }
  CHECK(total == rows.size());
  for (const auto& row : rows) global += static_cast<double>(row.final_pop);
  CHECK(weighted / static_cast<double>(rows.size()) ==
        doctest::Approx(global / static_cast<double>(rows.size())).epsilon(1e-9));
}

TEST_CASE("rows without a defined axis value are skipped in summaries") {
  std::vector<FeatureRow> rows{row_with(1.0, 0.25, 1, 10)};
  FeatureRow undef = row_with(1.0, 0.5, 2, 50);
  undef.density = std::numeric_limits<double>::quiet_NaN();
  rows.push_back(undef);
  FeatureRow excluded = row_with(1.0, 0.5, 2, 50);
  excluded.excluded_reason = "no early adoption";
  rows.push_back(excluded);

  auto dens = bin_summary(rows, BinAxis::Density, 4);
  std::uint64_t total = 0;
  for (const auto& bin : dens.bins) total += bin.count;
  CHECK(total == 1);

  auto dep = bin_summary(rows, BinAxis::Depth, 4);
  total = 0;
  for (const auto& bin : dep.bins) total += bin.count;
  CHECK(total == 2);  // undefined density still has a depth
}

TEST_CASE("spearman endpoints and tie handling match the naive oracle") {
  std::vector<FeatureRow> inc, dec;
  for (int i = 0; i < 10; ++i) {
    inc.push_back(row_with(1.0, 0.05 + 0.09 * i, i, 10 + i));
    dec.push_back(row_with(1.0, 0.05 + 0.09 * i, i, 100 - i));
  }
  CHECK(*spearman(inc, BinAxis::Density) == doctest::Approx(1.0));
  CHECK(*spearman(inc, BinAxis::Depth) == doctest::Approx(1.0));
  CHECK(*spearman(dec, BinAxis::Density) == doctest::Approx(-1.0));

  std::mt19937_64 rng(97);
  std::vector<FeatureRow> rows;
  std::vector<double> axis, fin;
  for (int i = 0; i < 50; ++i) {
    double rho = (rng() % 20) / 20.0;  // plenty of ties
    auto final_pop = static_cast<std::int64_t>(1 + rng() % 30);
    rows.push_back(row_with(1.0, rho, 1, final_pop));
    axis.push_back(rho);
    fin.push_back(static_cast<double>(final_pop));
  }
  auto got = spearman(rows, BinAxis::Density);
  REQUIRE(got.has_value());
  CHECK(*got == doctest::Approx(oracle::naive_spearman(axis, fin)).epsilon(1e-12));
}

TEST_CASE("spearman is undefined for constant axes or tiny samples") {
  std::vector<FeatureRow> rows{row_with(1, 0.5, 1, 10), row_with(1, 0.5, 1, 20),
                               row_with(1, 0.5, 1, 30)};
  CHECK_FALSE(spearman(rows, BinAxis::Density).has_value());  // constant density
  CHECK_FALSE(spearman(n_rows(2), BinAxis::Depth).has_value());
}

TEST_CASE("report and bins writers emit the documented shapes") {
  std::vector<EvalReport> reps{{ModelVariant::Baseline, 0.7, 0.5, 25, 42}};
  std::ostringstream os;
  write_report(os, reps, "ti=1;tr=2", 0.75);
  const std::string out = os.str();
  CHECK(out.find("# config: ti=1;tr=2;train_frac=0.75") != std::string::npos);
  CHECK(out.find("variant\trmse\tmae\tn_test\tsplit_seed") != std::string::npos);
  CHECK(out.find("baseline\t0.7\t0.5\t25\t42") != std::string::npos);

  BinSummary summary;
  summary.axis = BinAxis::Depth;
  summary.bins = {{0, 1, 5.5, 2}};
  std::ostringstream cs;
  write_bins_csv(cs, summary, "ti=1;tr=2");
  CHECK(cs.str().find("bin_lo,bin_hi,mean_final_pop,count") != std::string::npos);
  CHECK(cs.str().find("0,1,5.5,2") != std::string::npos);
}
