#include "fmt_engine/mesh_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "fmt_engine/error.hpp"

namespace fmt_engine {

namespace {

// Next non-empty, non-comment line of an OFF stream.
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& why) {
  throw ValidationError(path.string() + ": " + why);
}

template <class T>
T read_le(const char* p) {
  static_assert(std::endian::native == std::endian::little, "binary STL reader assumes a little-endian host");
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

}  // namespace

TriangleMesh read_off(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open file");
  std::string line;
  if (!next_line(in, line)) malformed(path, "empty file");

  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic.rfind("OFF", 0) != 0) malformed(path, "missing OFF header");
  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv)) {
    if (!next_line(in, line)) malformed(path, "missing element counts");
    std::istringstream counts(line);
    counts >> nv >> nf >> ne;
  } else {
    header >> nf >> ne;
  }
  if (nv < 0 || nf < 0) malformed(path, "invalid element counts");

  TriangleMesh mesh;
  mesh.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_line(in, line)) malformed(path, "truncated vertex list");
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) malformed(path, "bad vertex line " + std::to_string(i));
    mesh.vertices.emplace_back(x, y, z);
  }
  for (long f = 0; f < nf; ++f) {
    if (!next_line(in, line)) malformed(path, "truncated face list");
    std::istringstream ls(line);
    int k = 0;
    if (!(ls >> k) || k < 3) malformed(path, "bad face line " + std::to_string(f));
    std::vector<int> idx(k);
    for (auto& v : idx) {
      if (!(ls >> v)) malformed(path, "bad face line " + std::to_string(f));
    }
    for (int j = 1; j + 1 < k; ++j) mesh.triangles.push_back({idx[0], idx[j], idx[j + 1]});
  }
  return mesh;
}

void write_off(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

TriangleMesh read_stl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 84) malformed(path, "too short for a binary STL");
  const auto count = read_le<std::uint32_t>(bytes.data() + 80);
  if (bytes.size() != 84 + 50 * static_cast<std::size_t>(count)) {
    malformed(path, "size does not match the triangle count of a binary STL (ASCII STL is not supported)");
  }

  TriangleMesh mesh;
  std::map<std::array<std::uint32_t, 3>, int> welded;
  auto vertex = [&](const char* p) {
    std::array<std::uint32_t, 3> key{read_le<std::uint32_t>(p), read_le<std::uint32_t>(p + 4),
                                     read_le<std::uint32_t>(p + 8)};
    auto [it, inserted] = welded.try_emplace(key, static_cast<int>(mesh.vertices.size()));
    if (inserted) {
      mesh.vertices.emplace_back(read_le<float>(p), read_le<float>(p + 4), read_le<float>(p + 8));
    }
    return it->second;
  };
  mesh.triangles.reserve(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    const char* rec = bytes.data() + 84 + 50 * static_cast<std::size_t>(t);
    mesh.triangles.push_back({vertex(rec + 12), vertex(rec + 24), vertex(rec + 36)});
  }
  return mesh;
}

void write_stl(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  char header[80] = {};
  std::memcpy(header, "fmt-engine binary STL", 21);
  out.write(header, 80);
  const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
  out.write(reinterpret_cast<const char*>(&count), 4);
  auto put = [&](const Vec3& v) {
    const float f[3] = {static_cast<float>(v.x()), static_cast<float>(v.y()), static_cast<float>(v.z())};
    out.write(reinterpret_cast<const char*>(f), 12);
  };
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    put((b - a).cross(c - a).normalized());
    put(a);
    put(b);
    put(c);
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), 2);
  }
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return read_off(path);
  if (ext == ".stl") return read_stl(path);
  throw ValidationError(path.string() + ": unsupported mesh format (expected .off or .stl)");
}

}  // namespace fmt_engine
