#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rmtrans/ensemble.hpp"

namespace rmtrans {

// Resolved run configuration: the ensemble config with every default
// materialized, plus the preset it came from and any soft warnings.
struct ParsedConfig {
    EnsembleConfig ensemble;
    std::string preset = "isolated";
    std::vector<std::string> warnings;
};

// Flat "key: value" документ; '#' starts a comment. Lists are whitespace or
// comma separated and accept an "N*x" repeat shorthand. Unknown keys are
// rejected with the offending line number. Overrides (e.g. from command-line
// flags) are applied after the document, before preset expansion and
// validation.
ParsedConfig parse_config(const std::string& text);
ParsedConfig parse_config(const std::string& text,
                          const std::vector<std::pair<std::string, std::string>>& overrides);

// The built-in experiment presets: `isolated` spreads the transition spectrum
// by 10 typical widths, `overlapping` by half a width; `custom` uses the
// document's explicit transition spectrum and coupling values.
std::vector<std::string> preset_names();

}  // namespace rmtrans
