#pragma once

// Path-aware accessors for schema-strict JSON inputs.

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "scenesmith/errors.hpp"
#include "scenesmith/geometry.hpp"

namespace scenesmith::detail {

using Json = nlohmann::ordered_json;

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}
inline std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline Json parse_json(std::string_view bytes, std::string_view what) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string(what), std::string("not valid JSON: ") + e.what());
  }
}

inline const Json& object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
  return j;
}

inline const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

inline const Json& require(const Json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(join(path, key), "missing required field");
  return *it;
}

inline const Json* optional(const Json& obj, std::string_view key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline void only_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                      const std::string& path) {
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == k;
    if (!known) throw SchemaError(join(path, k), "unknown field");
  }
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

inline std::int64_t integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t unsigned_integer(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw SchemaError(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw SchemaError(path, "expected true or false");
  return j.get<bool>();
}

inline std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(N))
    throw SchemaError(path, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = number(j[static_cast<std::size_t>(i)], index(path, static_cast<std::size_t>(i)));
  return out;
}

template <typename Derived>
Json to_json(const Eigen::MatrixBase<Derived>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Json box_to_json(const OrientedBoxd& b) {
  Json j = Json::object();
  j["center"] = to_json(b.center);
  j["half_extents"] = to_json(b.half_extents);
  j["yaw"] = b.yaw;
  return j;
}

inline OrientedBoxd box_from_json(const Json& j, const std::string& path) {
  object(j, path);
  only_keys(j, {"center", "half_extents", "yaw"}, path);
  const Vec3d center = vec<3>(require(j, "center", path), join(path, "center"));
  const Vec3d half = vec<3>(require(j, "half_extents", path), join(path, "half_extents"));
  const double yaw = number(require(j, "yaw", path), join(path, "yaw"));
  for (int i = 0; i < 3; ++i)
    if (!(half[i] > 0))
      throw ValidationError(index(join(path, "half_extents"), static_cast<std::size_t>(i)),
                            "half extents must be > 0");
  OrientedBoxd box(center, half, 0.0);
  // Keep the stored yaw bit-exact when it is already normalized.
  box.yaw = (yaw >= -std::numbers::pi && yaw < std::numbers::pi) ? yaw : normalize_yaw(yaw);
  return box;
}

}  // namespace scenesmith::detail
