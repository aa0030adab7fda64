#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "aug3d/scene_model.hpp"

namespace aug3d {

std::string read_file(const std::filesystem::path& path);

// Creates parent directories as needed. Throws Io naming the path on failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);

// A "sparse" directory holds cameras.txt, images.txt and points3D.txt.
SceneModel read_sparse_dir(const std::filesystem::path& dir);
void write_sparse_dir(const std::filesystem::path& dir, const SceneModel& scene);

}  // namespace aug3d
