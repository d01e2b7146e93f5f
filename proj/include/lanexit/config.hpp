#pragma once

#include <iosfwd>
#include <string>

#include "lanexit/scenario.hpp"

namespace lanexit {

/// Reads an INI scenario file. Relative track file paths resolve against
/// `base_dir`. Syntax problems throw Error(kParse) with the line number;
/// bad values throw Error(kValidation) naming `section.key`.
ScenarioConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

/// Reads only the [model] section (defaults for missing keys).
DepthErrorModel parse_model_section(std::istream& in);
DepthErrorModel load_model(const std::string& path);

}  // namespace lanexit
