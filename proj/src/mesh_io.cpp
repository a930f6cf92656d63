#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "tetmf/mesh.hpp"

namespace tetmf {

namespace {

void repair_orientation(TetMesh& mesh) {
  for (std::size_t i = 0; i < mesh.n_cells(); ++i) {
    auto& c = mesh.cells[i];
    const Vec3& x0 = mesh.vertices[c[0]];
    const double d =
        dot(mesh.vertices[c[1]] - x0, cross(mesh.vertices[c[2]] - x0, mesh.vertices[c[3]] - x0));
    if (d >= 0) continue;
    std::swap(c[2], c[3]);
    if (mesh.is_curved()) {
      // edges 02 <-> 03 and 12 <-> 13
      std::swap(mesh.edge_nodes[i][1], mesh.edge_nodes[i][2]);
      std::swap(mesh.edge_nodes[i][3], mesh.edge_nodes[i][4]);
    }
  }
}

TetMesh read_msh2(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  TetMesh mesh;
  std::map<long, index_t> node_index;
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", line_no);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  bool have_format = false, have_nodes = false, have_elements = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "$MeshFormat") {
      std::istringstream s(next());
      double version = 0;
      int file_type = -1;
      if (!(s >> version >> file_type)) throw ParseError("malformed $MeshFormat", line_no);
      if (version < 2.0 || version >= 3.0) throw ParseError("unsupported MSH version " + line, line_no);
      if (file_type != 0) throw ParseError("binary MSH files are not supported", line_no);
      if (next() != "$EndMeshFormat") throw ParseError("expected $EndMeshFormat", line_no);
      have_format = true;
    } else if (line == "$Nodes") {
      long n = 0;
      if (!(std::istringstream(next()) >> n) || n < 0) throw ParseError("malformed node count", line_no);
      for (long i = 0; i < n; ++i) {
        std::istringstream s(next());
        long tag;
        Vec3 x;
        if (!(s >> tag >> x[0] >> x[1] >> x[2])) throw ParseError("malformed node", line_no);
        if (!node_index.emplace(tag, static_cast<index_t>(mesh.vertices.size())).second)
          throw ParseError("duplicate node " + std::to_string(tag), line_no);
        mesh.vertices.push_back(x);
      }
      if (next() != "$EndNodes") throw ParseError("expected $EndNodes", line_no);
      have_nodes = true;
    } else if (line == "$Elements") {
      long n = 0;
      if (!(std::istringstream(next()) >> n) || n < 0) throw ParseError("malformed element count", line_no);
      for (long i = 0; i < n; ++i) {
        std::istringstream s(next());
        long tag, type, ntags;
        if (!(s >> tag >> type >> ntags)) throw ParseError("malformed element", line_no);
        if (type != 4)
          throw ParseError("element " + std::to_string(tag) + " has unsupported type " + std::to_string(type) +
                               " (only 4-node tetrahedra are accepted)",
                           line_no);
        long t;
        for (long k = 0; k < ntags; ++k)
          if (!(s >> t)) throw ParseError("malformed element tags", line_no);
        std::array<index_t, 4> c;
        for (auto& v : c) {
          long node;
          if (!(s >> node)) throw ParseError("malformed element connectivity", line_no);
          auto it = node_index.find(node);
          if (it == node_index.end()) throw ParseError("element references unknown node " + std::to_string(node), line_no);
          v = it->second;
        }
        mesh.cells.push_back(c);
      }
      if (next() != "$EndElements") throw ParseError("expected $EndElements", line_no);
      have_elements = true;
    }
  }
  if (!have_format || !have_nodes || !have_elements)
    throw ParseError("missing $MeshFormat, $Nodes or $Elements section", line_no);
  repair_orientation(mesh);
  build_connectivity(mesh, [](index_t, int) { return 0; });
  check_mesh(mesh);
  return mesh;
}

void write_msh2(const TetMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << mesh.vertices.size() << "\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    out << i + 1 << " " << mesh.vertices[i][0] << " " << mesh.vertices[i][1] << " " << mesh.vertices[i][2] << "\n";
  out << "$EndNodes\n$Elements\n" << mesh.n_cells() << "\n";
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    out << c + 1 << " 4 2 1 1";
    for (index_t v : mesh.cells[c]) out << " " << v + 1;
    out << "\n";
  }
  out << "$EndElements\n";
}

constexpr char kMagic[4] = {'T', 'F', '0', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ParseError("truncated binary mesh", 0);
  return v;
}

void write_binary(const TetMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, 4);
  put<std::uint64_t>(out, mesh.vertices.size());
  put<std::uint64_t>(out, mesh.n_cells());
  put<std::uint64_t>(out, mesh.boundary_faces.size());
  put<std::uint64_t>(out, mesh.edge_nodes.size());
  for (const auto& v : mesh.vertices)
    for (double x : v) put<double>(out, x);
  for (const auto& c : mesh.cells)
    for (index_t v : c) put<std::uint32_t>(out, v);
  for (const auto& b : mesh.boundary_faces) {
    put<std::uint32_t>(out, b.cell);
    put<std::uint32_t>(out, b.face);
    put<std::int32_t>(out, b.boundary_id);
  }
  for (const auto& e : mesh.edge_nodes)
    for (const auto& x : e)
      for (double v : x) put<double>(out, v);
}

TetMesh read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("bad magic, expected TF01", 0);
  TetMesh mesh;
  const auto nv = get<std::uint64_t>(in);
  const auto nc = get<std::uint64_t>(in);
  const auto nb = get<std::uint64_t>(in);
  const auto ne = get<std::uint64_t>(in);
  if (ne != 0 && ne != nc) throw ParseError("edge node count must be 0 or the cell count", 0);
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices)
    for (double& x : v) x = get<double>(in);
  mesh.cells.resize(nc);
  for (auto& c : mesh.cells)
    for (index_t& v : c) {
      v = get<std::uint32_t>(in);
      if (v >= nv) throw ParseError("cell references vertex out of range", 0);
    }
  std::map<std::uint64_t, int> bid;
  for (std::uint64_t i = 0; i < nb; ++i) {
    const auto cell = get<std::uint32_t>(in);
    const auto face = get<std::uint32_t>(in);
    bid[(static_cast<std::uint64_t>(cell) << 3) | face] = get<std::int32_t>(in);
  }
  mesh.edge_nodes.resize(ne);
  for (auto& e : mesh.edge_nodes)
    for (auto& x : e)
      for (double& v : x) v = get<double>(in);
  repair_orientation(mesh);
  build_connectivity(mesh, [&bid](index_t cell, int face) {
    auto it = bid.find((static_cast<std::uint64_t>(cell) << 3) | face);
    return it == bid.end() ? 0 : it->second;
  });
  check_mesh(mesh);
  return mesh;
}

}  // namespace

TetMesh import_mesh(const std::filesystem::path& path, MeshFormat format) {
  return format == MeshFormat::GmshMsh2 ? read_msh2(path) : read_binary(path);
}

void export_mesh(const TetMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  if (format == MeshFormat::GmshMsh2)
    write_msh2(mesh, path);
  else
    write_binary(mesh, path);
}

}  // namespace tetmf
