#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nlc/error.hpp"

namespace nlc {

enum class NodeKind : uint8_t { exterior = 0, interior = 1, band = 2 };

struct DomainSpec {
  enum class Shape : uint32_t { disk = 0, square = 1, ellipse = 2 };
  Shape shape = Shape::disk;
  double p0 = 0, p1 = 0, p2 = 0, p3 = 0;  // ellipse: (rx, ry)

  static DomainSpec disk() { return {Shape::disk, 0, 0, 0, 0}; }
  static DomainSpec square() { return {Shape::square, 0, 0, 0, 0}; }
  static DomainSpec ellipse(double rx, double ry) { return {Shape::ellipse, rx, ry, 0, 0}; }

  bool inside(double x, double y) const;
  /// Closest point on the boundary (exact per shape; Newton for the ellipse).
  std::array<double, 2> nearest_boundary(double x, double y) const;
  double perimeter() const;
};

/// Uniform Cartesian grid masked to a bounded domain. Nodes are classified
/// exterior / interior / boundary-band; each band node carries the exact
/// boundary point used when sampling Dirichlet data, and cut cells get
/// fractional quadrature weights from 4x4 subsampling.
struct DomainGrid {
  DomainSpec domain;
  int resolution = 0;  // nodes per unit length
  int nx = 0, ny = 0;
  double h = 0;
  double ox = 0, oy = 0;

  std::vector<NodeKind> mask;     // nx*ny
  std::vector<double> weight;     // nx*ny, zero on exterior
  std::vector<int32_t> interior;  // flat indices in row-major order
  std::vector<int32_t> band;
  std::vector<double> band_bx, band_by;  // exact boundary point per band node
  std::vector<int32_t> band_src;         // nearest interior node per band node
  std::vector<int32_t> band_pos;         // flat -> band array index, or -1
  std::vector<int32_t> depth;            // grid-graph distance from the band (band = 0)
  std::vector<int32_t> ext_src;          // per active node: nearest depth>=2 node (self if deep)

  int idx(int ix, int iy) const { return iy * nx + ix; }
  double x(int ix) const { return ox + ix * h; }
  double y(int iy) const { return oy + iy * h; }
  bool is_active(int flat) const { return mask[flat] != NodeKind::exterior; }
  bool is_interior(int flat) const { return mask[flat] == NodeKind::interior; }
  size_t nodes() const { return size_t(nx) * ny; }
  double area() const;
};

/// resolution >= 16 nodes per unit length.
std::shared_ptr<const DomainGrid> make_grid(const DomainSpec& spec, int resolution);

/// K-component nodal field, plane-major storage. Boundary-band entries hold
/// the Dirichlet data; `freeze_boundary` snapshots them so the no-mutation
/// contract can be checked bit-for-bit.
template <int K>
struct NodeField {
  std::shared_ptr<const DomainGrid> grid;
  std::vector<double> data;
  std::vector<double> boundary_copy;

  NodeField() = default;
  explicit NodeField(std::shared_ptr<const DomainGrid> g)
      : grid(std::move(g)), data(size_t(K) * grid->nodes(), 0.0) {}

  static constexpr int components = K;
  double* plane(int c) { return data.data() + size_t(c) * grid->nodes(); }
  const double* plane(int c) const { return data.data() + size_t(c) * grid->nodes(); }
  double& at(int c, int flat) { return data[size_t(c) * grid->nodes() + flat]; }
  double at(int c, int flat) const { return data[size_t(c) * grid->nodes() + flat]; }

  void freeze_boundary() {
    boundary_copy.resize(size_t(K) * grid->band.size());
    for (int c = 0; c < K; ++c)
      for (size_t b = 0; b < grid->band.size(); ++b)
        boundary_copy[c * grid->band.size() + b] = at(c, grid->band[b]);
  }
  std::vector<double> boundary_snapshot() const {
    std::vector<double> s(static_cast<size_t>(K) * grid->band.size());
    for (int c = 0; c < K; ++c)
      for (size_t b = 0; b < grid->band.size(); ++b)
        s[c * grid->band.size() + b] = at(c, grid->band[b]);
    return s;
  }
};

using ScalarField = NodeField<1>;
using DirectorField = NodeField<3>;
using QField = NodeField<5>;

// ---- stencils ---------------------------------------------------------------

inline void gradient_at(const DomainGrid& g, const double* plane, int flat, double& gx,
                        double& gy) {
  gx = (plane[flat + 1] - plane[flat - 1]) / (2.0 * g.h);
  gy = (plane[flat + g.nx] - plane[flat - g.nx]) / (2.0 * g.h);
}

inline double laplacian_at(const DomainGrid& g, const double* plane, int flat) {
  return (plane[flat + 1] + plane[flat - 1] + plane[flat + g.nx] + plane[flat - g.nx] -
          4.0 * plane[flat]) /
         (g.h * g.h);
}

/// Checked per-node variants (interior nodes only).
template <int K>
std::array<std::array<double, 2>, K> gradient(const NodeField<K>& f, int flat) {
  require(f.grid->is_interior(flat), ErrCode::inactive_node, "gradient: node is not interior");
  std::array<std::array<double, 2>, K> g;
  for (int c = 0; c < K; ++c) gradient_at(*f.grid, f.plane(c), flat, g[c][0], g[c][1]);
  return g;
}

template <int K>
std::array<double, K> laplacian(const NodeField<K>& f, int flat) {
  require(f.grid->is_interior(flat), ErrCode::inactive_node, "laplacian: node is not interior");
  std::array<double, K> l;
  for (int c = 0; c < K; ++c) l[c] = laplacian_at(*f.grid, f.plane(c), flat);
  return l;
}

// ---- quadrature -------------------------------------------------------------

/// Pairwise (tree) summation; deterministic independent of threading.
double pairwise_sum(const double* v, size_t n);
double pairwise_sum(const std::vector<double>& v);

/// Mask-weighted quadrature of a density given on active nodes.
double integrate(const DomainGrid& g, const std::vector<double>& density);

/// Quadrature of a stencil-based integrand: evaluated on interior nodes at
/// least two cells from the band (where central differences are clean of the
/// first-order Dirichlet sampling), constant-extended across the rim.
double integrate_interior_extended(const DomainGrid& g,
                                   const std::function<double(int)>& interior_value);

// ---- linear solve -----------------------------------------------------------

/// Conjugate-gradient solve of the 5-point Dirichlet Laplace problem.
/// Band entries of `u` hold boundary data on entry; interior entries are
/// overwritten with the solution. Returns the relative residual; throws
/// solve_failed if it exceeds `fail_tol`.
double solve_dirichlet_laplace(const DomainGrid& g, std::vector<double>& u, double tol = 1e-12,
                               int max_iter = 0, double fail_tol = 1e-8);

/// `count` equally spaced boundary points (arc-length for disk/square,
/// angular parameter for the ellipse), counterclockwise.
std::vector<std::array<double, 2>> boundary_points(const DomainSpec& spec, int count);

}  // namespace nlc
