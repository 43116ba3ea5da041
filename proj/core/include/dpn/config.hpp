// Config validation and the declarative config file.
//
// The file is JSON with keys named exactly after the GridConfig fields
// (demand probabilities flat at the top level, battery/solar/ga as
// nested objects). See README for the documented schema.

#ifndef DPN_CONFIG_HPP
#define DPN_CONFIG_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "dpn/types.hpp"

namespace dpn {

// Empty result means the config satisfies every invariant; otherwise a
// complete list of violations, each prefixed with the field path.
std::vector<std::string> validate_config(const GridConfig& config);

// Parses a config file. Throws std::runtime_error with a field-path
// diagnostic on malformed input; validation errors are reported through
// validate_config by the caller.
GridConfig load_config_file(const std::filesystem::path& path);
GridConfig parse_config_text(const std::string& json_text);

std::string config_to_json(const GridConfig& config);

} // namespace dpn

#endif // DPN_CONFIG_HPP
