#include "nlc/field_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace nlc {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'C', '2'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ofstream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ofstream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t get_u32(std::ifstream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
double get_f64(std::ifstream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

template <int K>
void write_impl(const std::string& path, const NodeField<K>& f, const std::string& sidecar_json) {
  const DomainGrid& g = *f.grid;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(bool(os), ErrCode::io_failure, "write_field: cannot open " + path);
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, uint32_t(K));
  put_u32(os, uint32_t(g.nx));
  put_u32(os, uint32_t(g.ny));
  put_f64(os, g.h);
  put_f64(os, g.ox);
  put_f64(os, g.oy);
  put_u32(os, uint32_t(g.domain.shape));
  put_f64(os, g.domain.p0);
  put_f64(os, g.domain.p1);
  put_f64(os, g.domain.p2);
  put_f64(os, g.domain.p3);

  std::vector<uint8_t> bits((2 * g.nodes() + 7) / 8, 0);
  for (size_t i = 0; i < g.nodes(); ++i) {
    uint8_t code = uint8_t(g.mask[i]);  // exterior 0, interior 1, band 2
    bits[(2 * i) / 8] |= uint8_t(code << ((2 * i) % 8));
  }
  os.write(reinterpret_cast<const char*>(bits.data()), std::streamsize(bits.size()));
  os.write(reinterpret_cast<const char*>(f.data.data()), std::streamsize(f.data.size() * 8));
  require(bool(os), ErrCode::io_failure, "write_field: short write to " + path);
  os.close();

  if (!sidecar_json.empty()) {
    std::ofstream ms(sidecar_path(path), std::ios::trunc);
    require(bool(ms), ErrCode::io_failure, "write_field: cannot open sidecar for " + path);
    ms << sidecar_json << "\n";
  }
}

struct Header {
  uint32_t components, nx, ny;
  double h, ox, oy;
  DomainSpec spec;
};

Header read_header(std::ifstream& is, const std::string& path) {
  char magic[4];
  is.read(magic, 4);
  require(bool(is) && std::memcmp(magic, kMagic, 4) == 0, ErrCode::io_failure,
          "read_field: bad magic in " + path);
  uint32_t version = get_u32(is);
  require(version == kVersion, ErrCode::io_failure, "read_field: unsupported version");
  Header h;
  h.components = get_u32(is);
  h.nx = get_u32(is);
  h.ny = get_u32(is);
  h.h = get_f64(is);
  h.ox = get_f64(is);
  h.oy = get_f64(is);
  uint32_t tag = get_u32(is);
  require(tag <= 2, ErrCode::io_failure, "read_field: unknown domain tag");
  h.spec.shape = DomainSpec::Shape(tag);
  h.spec.p0 = get_f64(is);
  h.spec.p1 = get_f64(is);
  h.spec.p2 = get_f64(is);
  h.spec.p3 = get_f64(is);
  return h;
}

template <int K>
NodeField<K> read_impl(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(bool(is), ErrCode::io_failure, "read_field: cannot open " + path);
  Header hd = read_header(is, path);
  require(hd.components == uint32_t(K), ErrCode::io_failure,
          "read_field: component count mismatch in " + path);

  int resolution = int(std::lround(1.0 / hd.h));
  auto grid = make_grid(hd.spec, resolution);
  require(uint32_t(grid->nx) == hd.nx && uint32_t(grid->ny) == hd.ny, ErrCode::io_failure,
          "read_field: stored grid shape does not match the domain descriptor");

  std::vector<uint8_t> bits((2 * grid->nodes() + 7) / 8, 0);
  is.read(reinterpret_cast<char*>(bits.data()), std::streamsize(bits.size()));
  for (size_t i = 0; i < grid->nodes(); ++i) {
    uint8_t code = (bits[(2 * i) / 8] >> ((2 * i) % 8)) & 3u;
    require(code == uint8_t(grid->mask[i]), ErrCode::io_failure,
            "read_field: stored mask disagrees with the rebuilt grid");
  }

  NodeField<K> f(grid);
  is.read(reinterpret_cast<char*>(f.data.data()), std::streamsize(f.data.size() * 8));
  require(bool(is), ErrCode::io_failure, "read_field: truncated data section in " + path);
  f.freeze_boundary();
  return f;
}

}  // namespace

void write_field(const std::string& path, const DirectorField& f, const std::string& sidecar_json) {
  write_impl<3>(path, f, sidecar_json);
}
void write_field(const std::string& path, const QField& f, const std::string& sidecar_json) {
  write_impl<5>(path, f, sidecar_json);
}

int field_components(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(bool(is), ErrCode::io_failure, "field_components: cannot open " + path);
  Header hd = read_header(is, path);
  return int(hd.components);
}

DirectorField read_director_field(const std::string& path) { return read_impl<3>(path); }
QField read_q_field(const std::string& path) { return read_impl<5>(path); }

std::string sidecar_path(const std::string& field_path) {
  size_t slash = field_path.find_last_of('/');
  size_t dot = field_path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return field_path.substr(0, dot) + ".meta.json";
  return field_path + ".meta.json";
}

}  // namespace nlc
