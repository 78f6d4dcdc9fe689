#include "json_util.hpp"

#include <cmath>

namespace palp::detail {

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(what + ": " + e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw FormatError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(path + "." + key + ": missing field");
  return *it;
}

void require_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path + ": expected an array");
}

const json& array_field(const json& obj, const char* key, const std::string& path) {
  const json& j = field(obj, key, path);
  require_array(j, path + "." + key);
  return j;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FormatError(path + ": expected an integer");
  return j.get<int>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw FormatError(path + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw FormatError(path + ": non-finite number");
  return v;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw FormatError(path + ": expected a string");
  return j.get<std::string>();
}

std::vector<int> as_int_vector(const json& j, const std::string& path) {
  require_array(j, path);
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int(j[i], at_index(path, i)));
  return out;
}

std::vector<double> as_double_vector(const json& j, const std::string& path) {
  require_array(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], at_index(path, i)));
  return out;
}

}  // namespace palp::detail
