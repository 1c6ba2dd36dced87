#pragma once

#include <filesystem>

#include "fmt_engine/mesh.hpp"

namespace fmt_engine {

/// Object File Format (OFF). Polygonal faces are fan-triangulated on read.
TriangleMesh read_off(const std::filesystem::path& path);
void write_off(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Binary STL. Vertices are welded by exact coordinate equality on read.
TriangleMesh read_stl(const std::filesystem::path& path);
void write_stl(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Dispatch on the file extension (.off / .stl, case-insensitive).
TriangleMesh read_mesh(const std::filesystem::path& path);

}  // namespace fmt_engine
