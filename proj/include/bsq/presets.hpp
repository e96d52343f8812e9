#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bsq/symbol.hpp"

namespace bsq {

struct PresetParam {
  std::string name;
  std::string default_value;
  std::string doc;
};

struct PresetInfo {
  std::string name;
  std::string doc;
  std::vector<PresetParam> params;
};

const std::vector<PresetInfo>& preset_catalog();

/// Parameter values are expression text; plain numbers are constants.
/// Throws ConfigError for unknown presets or parameters.
PauliSymbol make_preset(std::string_view name,
                        const std::map<std::string, std::string>& params = {});

}  // namespace bsq
