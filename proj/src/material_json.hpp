#pragma once

#include <string>

#include <json.hpp>

#include "haptic/error.hpp"
#include "haptic/materials.hpp"

namespace haptic {

using ordered_json = nlohmann::ordered_json;

// Record fields: name, E_pa (required), nu, rho_kg_m3, eta_pa_s.
Material material_from_record(const ordered_json& rec, const std::string& entry, ErrorCode code);
ordered_json material_to_record(const Material& m);

}  // namespace haptic
