#pragma once

#include <string>
#include <vector>

#include "uavsim/simkernel.hpp"

namespace uavsim {

// Flat key = value configuration ('#' starts a comment). Unknown keys are
// rejected by name; missing keys keep the built-in defaults. Numeric
// values accept plain decimals or a/b fractions (e.g. hover_ratio = 1/6).
SimConfig default_config();

SimConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides = {});

SimConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

// Applies one "key=value" assignment to an existing config.
void apply_override(SimConfig& cfg, const std::string& assignment);

// Named presets; "desk" shrinks the catalog and caches for fast runs.
void apply_preset(SimConfig& cfg, const std::string& name);

// Lists every accepted configuration key.
std::vector<std::string> config_keys();

} // namespace uavsim
