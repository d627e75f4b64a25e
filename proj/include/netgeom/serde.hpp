#pragma once

#include <string>

#include "json.hpp"
#include "netgeom/network.hpp"
#include "netgeom/schedule.hpp"

// JSON forms used by checkpoints and experiment configs. All parsers throw
// ConfigError with the offending key in the message.

namespace netgeom {

nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j, const std::string& key);

nlohmann::json layer_spec_to_json(const LayerSpec& spec);
LayerSpec layer_spec_from_json(const nlohmann::json& j, const std::string& key);

std::string init_scheme_name(InitScheme s);
InitScheme init_scheme_from_name(const std::string& name);

}  // namespace netgeom
