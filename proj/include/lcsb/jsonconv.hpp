#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "lcsb/regress.hpp"
#include "lcsb/surrogate.hpp"

namespace lcsb {

// Rejects unknown keys so config typos fail loudly.
void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& where);

nlohmann::json regressor_config_to_json(const RegressorConfig& c);
RegressorConfig regressor_config_from_json(const nlohmann::json& j, bool strict);

nlohmann::json augmentation_to_json(const Augmentation& a);
Augmentation augmentation_from_json(const nlohmann::json& j, bool strict);

nlohmann::json surrogate_config_to_json(const SurrogateConfig& c);
SurrogateConfig surrogate_config_from_json(const nlohmann::json& j, bool strict);

}  // namespace lcsb
