#pragma once

#include <json.hpp>
#include <string>

#include "mdd/conjugate.hpp"
#include "mdd/family.hpp"
#include "mdd/hellinger.hpp"

namespace mdd {

// {"family":"normal","params":{"mean":0.0,"var":1.0}}; parameter names are
// mean/var, shape/rate, alpha/beta, rate, trials/prob.
nlohmann::json to_json(const Family& f);
Family family_from_json(const nlohmann::json& j);

// {"model":"NN","informative":{...},"c":100,"sigma2":10} (+ "trials" for BB).
nlohmann::json to_json(const ConjugateModel& model);
ConjugateModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HellingerValue& h);

/// Version string baked in at configure time (git describe when available).
std::string version_string();

}  // namespace mdd
