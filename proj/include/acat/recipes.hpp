#pragma once

#include <map>
#include <string>
#include <vector>

namespace acat {

inline constexpr const char* kLibraryVersion = "0.1.0";

using RecipeParams = std::map<std::string, std::string>;

struct RecipeOutput {
  std::string csv;
  std::string manifest;  // JSON: recipe, resolved params, version, timestamp, summary
};

const std::vector<std::string>& recipe_names();

// key=value lines; blank lines and lines starting with '#' are skipped.
// Malformed lines are a UsageError.
RecipeParams parse_params(const std::string& text);

// Unknown recipe, unknown key, missing required key or an unparsable value
// is a UsageError. InvariantViolation propagates from the modules.
RecipeOutput run_recipe(const std::string& name, const RecipeParams& params);

}  // namespace acat
