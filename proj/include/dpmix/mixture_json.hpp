#pragma once

#include <string>

#include <json.hpp>

#include "dpmix/core.hpp"

namespace dpmix {

// Serialization of MixtureDensity to the schema
//   {"weights": [...], "means": [[...]], "covs": [[[...]]]}
// weights, means, covs must have equal outer length; each cov is a d x d
// symmetric positive-definite matrix.

nlohmann::json mixture_to_json(const MixtureDensity& f);
MixtureDensity mixture_from_json(const nlohmann::json& j);

MixtureDensity load_mixture(const std::string& path);
void save_mixture(const std::string& path, const MixtureDensity& f);

}  // namespace dpmix
