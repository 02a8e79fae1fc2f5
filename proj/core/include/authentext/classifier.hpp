#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "authentext/gbdt.hpp"
#include "authentext/naive_bayes.hpp"
#include "authentext/sgd_linear.hpp"
#include "authentext/sparse.hpp"

namespace authentext {

enum class ModelKind { naive_bayes, sgd_linear, gbdt };

std::string_view model_kind_name(ModelKind kind) noexcept;
/// Error(usage) listing the valid kinds.
ModelKind model_kind_from_name(std::string_view name);

using TrainedClassifier = std::variant<NaiveBayesModel, SgdLinearModel, GbdtModel>;

ModelKind kind_of(const TrainedClassifier& model) noexcept;
std::size_t feature_count(const TrainedClassifier& model) noexcept;

/// P(label = 1 | row) for every row; Error(mismatch) on a column count that
/// differs from the model's.
std::vector<double> predict_proba(const TrainedClassifier& model, const SparseMatrix& X);

inline constexpr int kModelFormatVersion = 1;

/// {format_version, kind, parameters} as canonical JSON. Doubles are written
/// in shortest round-trip form, so load(save(m)) scores bit-identically.
std::string save_model(const TrainedClassifier& model);

/// Error(version) for a foreign format_version or a kind other than
/// `expected`; Error(parse) for truncated or malformed documents.
TrainedClassifier load_model(std::string_view bytes, std::optional<ModelKind> expected = std::nullopt);

}  // namespace authentext
