#pragma once

#include <string>

#include "nlc/grid.hpp"

namespace nlc {

/// Binary field file, layout:
///   magic "NLC2" | version u32 | components u32 (3 or 5) | nx u32 | ny u32 |
///   h f64 | origin 2xf64 | domain tag u32 + 4xf64 params |
///   mask packed 2 bits/node row-major (00 exterior, 01 interior, 10 band) |
///   components * nx * ny f64 little-endian row-major (plane-major).
/// A JSON sidecar `<name>.meta.json` carries material parameters and the run
/// manifest; `sidecar_json` is written verbatim under the "manifest" key.
void write_field(const std::string& path, const DirectorField& f, const std::string& sidecar_json);
void write_field(const std::string& path, const QField& f, const std::string& sidecar_json);

/// Peek at the component count without loading the data.
int field_components(const std::string& path);

/// Rebuilds the grid from the stored descriptor and verifies the stored mask
/// against it, so a loaded field carries the full DomainGrid machinery.
DirectorField read_director_field(const std::string& path);
QField read_q_field(const std::string& path);

std::string sidecar_path(const std::string& field_path);

}  // namespace nlc
