#include "mdd/io.hpp"

#include <json.hpp>

#include "mdd/errors.hpp"

#ifndef MDD_VERSION
#define MDD_VERSION "0.1.0"
#endif

namespace mdd {

using nlohmann::json;

namespace {

double number(const json& params, const char* key) {
  if (!params.contains(key) || !params.at(key).is_number())
    throw ConfigError(std::string("missing numeric parameter '") + key + "'");
  return params.at(key).get<double>();
}

}  // namespace

json to_json(const Family& f) {
  json params = json::object();
  switch (f.tag()) {
    case FamilyTag::Normal: params = {{"mean", f.param(0)}, {"var", f.param(1)}}; break;
    case FamilyTag::Gamma: params = {{"shape", f.param(0)}, {"rate", f.param(1)}}; break;
    case FamilyTag::Beta: params = {{"alpha", f.param(0)}, {"beta", f.param(1)}}; break;
    case FamilyTag::Exponential:
    case FamilyTag::Poisson: params = {{"rate", f.param(0)}}; break;
    case FamilyTag::Binomial:
      params = {{"trials", static_cast<int>(f.param(0))}, {"prob", f.param(1)}};
      break;
    case FamilyTag::ImproperFlat: break;
  }
  return {{"family", std::string(to_string(f.tag()))}, {"params", params}};
}

Family family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family")) throw ConfigError("family object needs a 'family' field");
  const FamilyTag tag = family_tag_from_string(j.at("family").get<std::string>());
  const json params = j.value("params", json::object());
  switch (tag) {
    case FamilyTag::Normal: return Family::normal(number(params, "mean"), number(params, "var"));
    case FamilyTag::Gamma: return Family::gamma(number(params, "shape"), number(params, "rate"));
    case FamilyTag::Beta: return Family::beta(number(params, "alpha"), number(params, "beta"));
    case FamilyTag::Exponential: return Family::exponential(number(params, "rate"));
    case FamilyTag::Poisson: return Family::poisson(number(params, "rate"));
    case FamilyTag::Binomial:
      return Family::binomial(static_cast<int>(number(params, "trials")), number(params, "prob"));
    case FamilyTag::ImproperFlat: return Family::improper_flat();
  }
  throw ConfigError("unknown family");
}

json to_json(const ConjugateModel& model) {
  json j = {{"model", std::string(to_string(model.tag()))},
            {"informative", to_json(model.informative())},
            {"c", model.c()}};
  if (model.tag() == ModelTag::NN) j["sigma2"] = model.sigma2();
  if (model.tag() == ModelTag::BB) j["trials"] = model.trials();
  return j;
}

ConjugateModel model_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("model must be a JSON object");
  for (const char* key : {"model", "informative", "c"})
    if (!j.contains(key)) throw ConfigError(std::string("model JSON is missing '") + key + "'");
  std::optional<double> sigma2;
  if (j.contains("sigma2")) sigma2 = j.at("sigma2").get<double>();
  return ConjugateModel(model_tag_from_string(j.at("model").get<std::string>()),
                        family_from_json(j.at("informative")), j.at("c").get<double>(), sigma2,
                        j.value("trials", 1));
}

json to_json(const HellingerValue& h) {
  return {{"value", h.value}, {"method", std::string(to_string(h.method))}};
}

std::string version_string() { return MDD_VERSION; }

}  // namespace mdd
