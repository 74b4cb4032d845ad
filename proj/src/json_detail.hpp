#pragma once

// Internal json <-> struct helpers shared by io.cpp and config.cpp.

#include <json.hpp>

#include "emsim/ensemble.hpp"

namespace emsim::detail {

using ordered_json = nlohmann::ordered_json;

ordered_json cdf_to_json(const EmpiricalCdf& cdf);
EmpiricalCdf cdf_from_json(const ordered_json& arr);
ordered_json ensemble_config_to_json(const EnsembleConfig& c);
EnsembleConfig ensemble_config_from_json(const ordered_json& j);

} // namespace emsim::detail
