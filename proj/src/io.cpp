#include "jsg/io.hpp"

#include <cstdio>
#include <fstream>

#include "jsg/errors.hpp"

namespace jsg {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void csv_header(std::ostream& out, const OutputHeader& h) {
  out << "# tool jsg " << kToolVersion << "\n# command " << h.command << "\n# config " << h.config_hash << "\n";
}

}  // namespace

std::string config_hash(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

nlohmann::json header_json(const OutputHeader& h) {
  return {{"tool", "jsg"}, {"version", kToolVersion}, {"command", h.command}, {"config_hash", h.config_hash}};
}

void write_field_csv(const std::filesystem::path& path, const OutputHeader& h, const TriMesh& mesh,
                     const ScalarField& u) {
  if (u.size() != mesh.nodes.size()) throw DomainError("field does not match the mesh");
  auto out = open_out(path);
  csv_header(out, h);
  out << "id,x,y,u\n";
  for (size_t i = 0; i < u.size(); ++i)
    out << i << ',' << num(mesh.nodes[i].real()) << ',' << num(mesh.nodes[i].imag()) << ',' << num(u[i]) << '\n';
}

nlohmann::json mesh_json(const TriMesh& mesh) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Complex& z : mesh.nodes) nodes.push_back({z.real(), z.imag()});
  nlohmann::json tris = nlohmann::json::array();
  for (const auto& t : mesh.triangles) tris.push_back({t[0], t[1], t[2]});
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : mesh.segments) segs.push_back({s.a, s.b, s.tag});
  return {{"nodes", nodes}, {"triangles", tris}, {"segments", segs}, {"tags", mesh.tag_names}};
}

void write_json(const std::filesystem::path& path, const OutputHeader& h, nlohmann::json body) {
  body["header"] = header_json(h);
  auto out = open_out(path);
  out << body.dump(2) << '\n';
}

void write_table_csv(const std::filesystem::path& path, const OutputHeader& h, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  csv_header(out, h);
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
    out << '\n';
  }
}

}  // namespace jsg
