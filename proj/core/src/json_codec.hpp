#pragma once

// Private JSON mappings shared by the model file header and the feature
// directory index.

#include <json.hpp>

#include "soundguard/cmvn.hpp"
#include "soundguard/features.hpp"
#include "soundguard/segmenter.hpp"

namespace soundguard::detail {

nlohmann::json ToJson(const FeatureConfig& c);
FeatureConfig FeatureConfigFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const CmvnStats& s);
CmvnStats CmvnFromJson(const nlohmann::json& j);

}  // namespace soundguard::detail
