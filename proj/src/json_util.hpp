#pragma once

// Field accessors for hand-written JSON documents that report the path of
// the offending field on failure.

#include <string>
#include <vector>

#include "json.hpp"
#include "palp/model_io.hpp"

namespace palp::detail {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what);

const json& field(const json& obj, const char* key, const std::string& path);
const json& array_field(const json& obj, const char* key, const std::string& path);
void require_array(const json& j, const std::string& path);

int as_int(const json& j, const std::string& path);
double as_double(const json& j, const std::string& path);
std::string as_string(const json& j, const std::string& path);
std::vector<int> as_int_vector(const json& j, const std::string& path);
std::vector<double> as_double_vector(const json& j, const std::string& path);

inline std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

}  // namespace palp::detail
