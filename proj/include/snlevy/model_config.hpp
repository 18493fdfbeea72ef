#pragma once

#include <map>
#include <string>
#include <vector>

#include "snlevy/levy_model.hpp"

namespace snlevy {
namespace config {

// Parsed model description plus tolerance overrides.
struct ModelConfig {
    LevyModel model;
    std::map<std::string, double> tolerances;
    std::string source; // file path or gallery:<name>
};

// Load a model from a JSON file:
//   { "family": "cramer_lundberg_exp",
//     "parameters": { "c": 1.0, "lambda": 1.0, "mu": 2.0 },
//     "tolerances": { "quad_rel": 1e-10 } }          // optional
// Families: brownian, cramer_lundberg_exp, piecewise_power, piecewise_exp,
// custom_density_table.  Throws ConfigError on malformed input.
ModelConfig load_model_file(const std::string& path);

// "gallery:<name>" or plain file path.
ModelConfig resolve_model(const std::string& spec);

// Built-in gallery.
std::vector<std::string> gallery_names();
LevyModel gallery_model(const std::string& name);

// Two-column CSV (x, pi(x)) for custom_density_table.
JumpMeasure load_density_csv(const std::string& path);

} // namespace config
} // namespace snlevy
