#include "aug3d/io.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

#include "aug3d/error.hpp"

namespace aug3d {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory for " + path.string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

SceneModel read_sparse_dir(const fs::path& dir) {
  return parse_sfm_model(read_file(dir / "images.txt"), read_file(dir / "cameras.txt"),
                         read_file(dir / "points3D.txt"));
}

void write_sparse_dir(const fs::path& dir, const SceneModel& scene) {
  const SfmText text = write_sfm_model(scene);
  write_file(dir / "cameras.txt", text.cameras);
  write_file(dir / "images.txt", text.images);
  write_file(dir / "points3D.txt", text.points);
}

}  // namespace aug3d
