#include "casc/regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "casc/util.hpp"

namespace casc {

const char* variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::Baseline: return "baseline";
    case ModelVariant::WithDensity: return "with_density";
    case ModelVariant::WithDepth: return "with_depth";
  }
  return "?";
}

ModelVariant parse_variant(std::string_view name) {
  if (name == "baseline") return ModelVariant::Baseline;
  if (name == "with_density" || name == "density") return ModelVariant::WithDensity;
  if (name == "with_depth" || name == "depth") return ModelVariant::WithDepth;
  throw ConfigError("unknown model variant '" + std::string(name) + "'");
}

const std::vector<std::string>& predictor_names(ModelVariant v) {
  static const std::vector<std::string> base{"ln_early_pop", "intercept"};
  static const std::vector<std::string> dens{"ln_early_pop", "ln_density", "intercept"};
  static const std::vector<std::string> depth{"ln_early_pop", "depth", "intercept"};
  switch (v) {
    case ModelVariant::Baseline: return base;
    case ModelVariant::WithDensity: return dens;
    case ModelVariant::WithDepth: return depth;
  }
  return base;
}

DesignRow design_row(ModelVariant v, const FeatureRow& row) {
  if (!row.included()) throw DataError("design_row: excluded row '" + row.tweet_id + "'");
  if (!std::isfinite(row.ln_early) || !std::isfinite(row.ln_final))
    throw DataError("design_row: non-finite log popularity for '" + row.tweet_id + "'");
  DesignRow d;
  d.y = row.ln_final;
  switch (v) {
    case ModelVariant::Baseline:
      d.x = {row.ln_early, 1.0, 0.0};
      break;
    case ModelVariant::WithDensity:
      if (!std::isfinite(row.ln_density))
        throw DataError("design_row: undefined density for '" + row.tweet_id + "'");
      d.x = {row.ln_early, row.ln_density, 1.0};
      break;
    case ModelVariant::WithDepth:
      d.x = {row.ln_early, static_cast<double>(row.depth), 1.0};
      break;
  }
  return d;
}

bool row_valid_for(ModelVariant v, const FeatureRow& row) {
  if (!row.included()) return false;
  if (!std::isfinite(row.ln_early) || !std::isfinite(row.ln_final)) return false;
  if (v == ModelVariant::WithDensity && !std::isfinite(row.ln_density)) return false;
  return true;
}

ModelCoefficients fit_ols(ModelVariant v, std::span<const FeatureRow> rows,
                          std::string fingerprint) {
  const int k = arity(v);
  if (static_cast<int>(rows.size()) < k)
    throw NumericError("fit of '" + std::string(variant_name(v)) + "' needs at least " +
                       std::to_string(k) + " rows, got " + std::to_string(rows.size()));

  long double xtx[3][3] = {};
  long double xty[3] = {};
  double col_min[3], col_max[3];
  std::fill_n(col_min, 3, std::numeric_limits<double>::infinity());
  std::fill_n(col_max, 3, -std::numeric_limits<double>::infinity());

  for (const auto& row : rows) {
    DesignRow d = design_row(v, row);
    for (int i = 0; i < k; ++i) {
      col_min[i] = std::min(col_min[i], d.x[i]);
      col_max[i] = std::max(col_max[i], d.x[i]);
      xty[i] += static_cast<long double>(d.x[i]) * d.y;
      for (int j = 0; j < k; ++j)
        xtx[i][j] += static_cast<long double>(d.x[i]) * d.x[j];
    }
  }

  const auto& names = predictor_names(v);
  for (int i = 0; i < k - 1; ++i)
    if (col_min[i] == col_max[i])
      throw NumericError("singular fit for '" + std::string(variant_name(v)) + "': column '" +
                         names[i] + "' is constant");

  // Gaussian elimination with partial pivoting on [X'X | X'y].
  long double a[3][4];
  long double scale = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      a[i][j] = xtx[i][j];
      scale = std::max(scale, std::abs(a[i][j]));
    }
    a[i][k] = xty[i];
  }
  if (scale == 0) scale = 1;
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= scale * 1e-13L)
      throw NumericError("singular fit for '" + std::string(variant_name(v)) + "': column '" +
                         names[col] + "' is linearly dependent on the others");
    if (pivot != col)
      for (int j = 0; j <= k; ++j) std::swap(a[pivot][j], a[col][j]);
    for (int r = col + 1; r < k; ++r) {
      long double f = a[r][col] / a[col][col];
      for (int j = col; j <= k; ++j) a[r][j] -= f * a[col][j];
    }
  }
  long double beta[3] = {};
  for (int i = k - 1; i >= 0; --i) {
    long double s = a[i][k];
    for (int j = i + 1; j < k; ++j) s -= a[i][j] * beta[j];
    beta[i] = s / a[i][i];
  }

  // Normal-equation residual must be orthogonal to every predictor.
  long double gmax = 0, ymax = 0;
  for (int i = 0; i < k; ++i) {
    long double gi = xty[i];
    for (int j = 0; j < k; ++j) gi -= xtx[i][j] * beta[j];
    gmax = std::max(gmax, std::abs(gi));
    ymax = std::max(ymax, std::abs(xty[i]));
  }
  if (gmax > 1e-8L * (ymax > 0 ? ymax : 1.0L))
    throw NumericError("ill-conditioned fit for '" + std::string(variant_name(v)) +
                       "': residual not orthogonal to predictors");

  ModelCoefficients m;
  m.variant = v;
  m.coeffs.resize(k);
  for (int i = 0; i < k; ++i) {
    m.coeffs[i] = static_cast<double>(beta[i]);
    if (!std::isfinite(m.coeffs[i]))
      throw NumericError("non-finite coefficient in '" + std::string(variant_name(v)) + "' fit");
  }
  m.n_train = rows.size();
  m.fingerprint = std::move(fingerprint);
  return m;
}

double predict_ln(const ModelCoefficients& m, const FeatureRow& row) {
  if (m.coeffs.size() != static_cast<std::size_t>(arity(m.variant)))
    throw DataError("coefficient count does not match variant arity");
  DesignRow d = design_row(m.variant, row);
  double s = 0;
  for (std::size_t i = 0; i < m.coeffs.size(); ++i) s += d.x[i] * m.coeffs[i];
  return s;
}

double predict_popularity(const ModelCoefficients& m, const FeatureRow& row) {
  return std::exp(predict_ln(m, row));
}

void save_coefficients(const std::filesystem::path& path, const ModelCoefficients& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write coefficients file: " + path.string());
  out << "variant=" << variant_name(m.variant) << "\n";
  out << "coeffs=";
  for (std::size_t i = 0; i < m.coeffs.size(); ++i) {
    if (i) out << ',';
    out << fmt_double(m.coeffs[i]);
  }
  out << "\n";
  out << "n_train=" << m.n_train << "\n";
  out << "config=" << m.fingerprint << "\n";
}

ModelCoefficients load_coefficients(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open coefficients file: " + path.string());
  const std::string path_str = path.string();
  ModelCoefficients m;
  bool have_variant = false, have_coeffs = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path_str, line_no, "expected key=value");
    std::string_view key = std::string_view(line).substr(0, eq);
    std::string_view val = std::string_view(line).substr(eq + 1);
    if (key == "variant") {
      m.variant = parse_variant(val);
      have_variant = true;
    } else if (key == "coeffs") {
      for (auto f : split_fields(val, ',')) {
        double c;
        if (!parse_double(f, c)) throw ParseError(path_str, line_no, "bad coefficient");
        m.coeffs.push_back(c);
      }
      have_coeffs = true;
    } else if (key == "n_train") {
      std::uint64_t n;
      if (!parse_u64(val, n)) throw ParseError(path_str, line_no, "bad n_train");
      m.n_train = n;
    } else if (key == "config") {
      m.fingerprint = std::string(val);
    } else {
      throw ParseError(path_str, line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_variant || !have_coeffs)
    throw DataError(path_str + ": missing variant or coeffs");
  if (m.coeffs.size() != static_cast<std::size_t>(arity(m.variant)))
    throw DataError(path_str + ": coefficient count does not match variant arity");
  return m;
}

}  // namespace casc
