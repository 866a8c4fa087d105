#pragma once

// `.scene.json` reader/writer. Field order is fixed, so equal scenes serialize to
// identical bytes. Schema: docs/formats/scene.md.

#include <filesystem>
#include <string>
#include <string_view>

#include "scenesmith/populate.hpp"

namespace scenesmith {

std::string write_scene(const SceneSpec& scene);
SceneSpec parse_scene(std::string_view bytes);
SceneSpec load_scene(const std::filesystem::path& path);

}  // namespace scenesmith
