#include "authentext/classifier.hpp"

#include "authentext/error.hpp"
#include "codec.hpp"

namespace authentext {

std::string_view model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::naive_bayes:
      return "naive_bayes";
    case ModelKind::sgd_linear:
      return "sgd_linear";
    case ModelKind::gbdt:
      return "gbdt";
  }
  return "?";
}

ModelKind model_kind_from_name(std::string_view name) {
  for (ModelKind k : {ModelKind::naive_bayes, ModelKind::sgd_linear, ModelKind::gbdt}) {
    if (name == model_kind_name(k)) return k;
  }
  throw Error(ErrorCode::usage, "unknown model kind '" + std::string(name) +
                                    "' (valid kinds: naive_bayes, sgd_linear, gbdt)");
}

ModelKind kind_of(const TrainedClassifier& model) noexcept {
  return static_cast<ModelKind>(model.index());
}

std::size_t feature_count(const TrainedClassifier& model) noexcept {
  return std::visit(
      [](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, GbdtModel>) {
          return m.n_features;
        } else {
          return m.n_features();
        }
      },
      model);
}

std::vector<double> predict_proba(const TrainedClassifier& model, const SparseMatrix& X) {
  if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) {
    const auto posteriors = nb_posteriors(*nb, X);
    std::vector<double> out;
    out.reserve(posteriors.size());
    for (const auto& p : posteriors) out.push_back(p[1]);
    return out;
  }
  if (const auto* sgd = std::get_if<SgdLinearModel>(&model)) return sgd_predict_proba(*sgd, X);
  return gbdt_predict_proba(std::get<GbdtModel>(model), X);
}

std::string save_model(const TrainedClassifier& model) {
  const detail::json doc = {{"format_version", kModelFormatVersion},
                            {"kind", model_kind_name(kind_of(model))},
                            {"parameters", detail::model_parameters(model)}};
  return detail::canonical(doc);
}

TrainedClassifier load_model(std::string_view bytes, std::optional<ModelKind> expected) {
  const auto doc = detail::parse_json(bytes, "model");
  detail::check_format_version(doc, kModelFormatVersion, "model");
  detail::Reader r(doc, "", ErrorCode::parse);
  r.raw("format_version");
  const std::string kind_name = r.string("kind");
  ModelKind kind;
  try {
    kind = model_kind_from_name(kind_name);
  } catch (const Error&) {
    throw Error(ErrorCode::version, "unsupported model kind '" + kind_name + "'");
  }
  if (expected && *expected != kind) {
    throw Error(ErrorCode::version, "model kind is " + kind_name + ", expected " +
                                        std::string(model_kind_name(*expected)));
  }
  auto model = detail::model_from_parameters(kind, r.raw("parameters"));
  r.finish();
  return model;
}

}  // namespace authentext
