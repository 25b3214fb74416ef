#pragma once

// Report files. Every file starts with a header naming the tool version and a
// hash of the configuration that produced it.

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "jsg/solver.hpp"

namespace jsg {

inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string config_hash(const std::string& bytes);

struct OutputHeader {
  std::string command;
  std::string config_hash;
};

nlohmann::json header_json(const OutputHeader& h);

/// "# key value" lines followed by id,x,y,u rows in round-trip precision.
void write_field_csv(const std::filesystem::path& path, const OutputHeader& h, const TriMesh& mesh,
                     const ScalarField& u);

/// Nodes, triangles, boundary segments and tag names.
nlohmann::json mesh_json(const TriMesh& mesh);

/// Pretty-printed JSON with the header under "header".
void write_json(const std::filesystem::path& path, const OutputHeader& h, nlohmann::json body);

/// Plain CSV table with a "# " header.
void write_table_csv(const std::filesystem::path& path, const OutputHeader& h, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

}  // namespace jsg
