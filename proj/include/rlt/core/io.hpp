#pragma once

#include <json.hpp>
#include <string>

#include "rlt/core/grid_function.hpp"
#include "rlt/core/grid_set.hpp"

namespace rlt {

using json = nlohmann::json;

json to_json(const GridSet& s);
GridSet grid_set_from_json(const json& j);
json to_json(const GridFunction& f);
GridFunction grid_function_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace rlt
