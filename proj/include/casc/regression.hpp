#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "casc/errors.hpp"
#include "casc/features.hpp"

namespace casc {

// The three log-linear predictors of final popularity:
//   baseline      ln p(t_r) ~ g1 ln p(t_i) + g2
//   with_density  ln p(t_r) ~ a1 ln p(t_i) + a2 ln rho(t_i) + a3
//   with_depth    ln p(t_r) ~ b1 ln p(t_i) + b2 d(t_i) + b3
// Depth enters linearly, not logged.
enum class ModelVariant { Baseline, WithDensity, WithDepth };

constexpr int arity(ModelVariant v) { return v == ModelVariant::Baseline ? 2 : 3; }
const char* variant_name(ModelVariant v);
ModelVariant parse_variant(std::string_view name);  // throws ConfigError
const std::vector<std::string>& predictor_names(ModelVariant v);

struct DesignRow {
  std::array<double, 3> x{};  // first arity() entries used; last is the intercept 1
  double y = 0.0;
};

// Predictors and target for one included row. Throws DataError for
// excluded rows, non-finite inputs, or a density-variant row with
// undefined density.
DesignRow design_row(ModelVariant v, const FeatureRow& row);

// True iff design_row would accept the row.
bool row_valid_for(ModelVariant v, const FeatureRow& row);

struct ModelCoefficients {
  ModelVariant variant = ModelVariant::Baseline;
  std::vector<double> coeffs;  // ordered as in the formulas above
  std::size_t n_train = 0;
  std::string fingerprint;  // feature config the model was fitted under
};

// Ordinary least squares via the normal equations (at most 3x3), solved
// with partial pivoting in extended precision. Throws NumericError when
// the normal matrix is rank deficient, naming the degenerate column, or
// when the residual fails the orthogonality bound |X'(y-Xb)| <= 1e-8 |X'y|.
ModelCoefficients fit_ols(ModelVariant v, std::span<const FeatureRow> rows,
                          std::string fingerprint = "");

// ln-popularity estimate for one row; exp() of it is the popularity scale.
double predict_ln(const ModelCoefficients& m, const FeatureRow& row);
double predict_popularity(const ModelCoefficients& m, const FeatureRow& row);

// Key-value coefficient file: variant, ordered coeffs, n_train and the
// feature-config fingerprint, so predictions refuse mismatched configs.
void save_coefficients(const std::filesystem::path& path, const ModelCoefficients& m);
ModelCoefficients load_coefficients(const std::filesystem::path& path);

}  // namespace casc
