#include "nlc/grid.hpp"

#include <algorithm>
#include <cmath>

namespace nlc {

bool DomainSpec::inside(double x, double y) const {
  switch (shape) {
    case Shape::disk:
      return x * x + y * y <= 1.0;
    case Shape::square:
      return x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0;
    case Shape::ellipse:
      return (x / p0) * (x / p0) + (y / p1) * (y / p1) <= 1.0;
  }
  return false;
}

namespace {

// Nearest point on an axis-aligned ellipse (rx, ry), first-quadrant reduction
// with a bisection/Newton hybrid on the standard rational equation.
std::array<double, 2> ellipse_nearest(double rx, double ry, double px, double py) {
  const double sx = px < 0 ? -1.0 : 1.0;
  const double sy = py < 0 ? -1.0 : 1.0;
  double x = std::abs(px), y = std::abs(py);
  if (x < 1e-15 && y < 1e-15) return {0.0, sy * ry};  // center: pick the minor axis top
  // F(t) = (rx x / (t + rx^2))^2 + (ry y / (t + ry^2))^2 - 1, decreasing in t.
  auto F = [&](double t) {
    double u = rx * x / (t + rx * rx);
    double v = ry * y / (t + ry * ry);
    return u * u + v * v - 1.0;
  };
  double lo = -std::min(rx * rx, ry * ry) + 1e-14;
  double hi = std::max(rx * x, ry * y) + std::max(rx * rx, ry * ry);
  while (F(hi) > 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (F(mid) > 0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (1 + std::abs(hi))) break;
  }
  double t = 0.5 * (lo + hi);
  double bx = rx * rx * x / (t + rx * rx);
  double by = ry * ry * y / (t + ry * ry);
  // project onto the curve exactly in the parametric sense
  double th = std::atan2(by / ry, bx / rx);
  return {sx * rx * std::cos(th), sy * ry * std::sin(th)};
}

}  // namespace

std::array<double, 2> DomainSpec::nearest_boundary(double x, double y) const {
  switch (shape) {
    case Shape::disk: {
      double r = std::hypot(x, y);
      if (r < 1e-15) return {1.0, 0.0};
      return {x / r, y / r};
    }
    case Shape::square: {
      double cx = std::clamp(x, 0.0, 1.0), cy = std::clamp(y, 0.0, 1.0);
      if (cx != x || cy != y) return {cx, cy};  // outside: clamp
      // inside: project to the nearest edge
      double dl = x, dr = 1 - x, db = y, dt = 1 - y;
      double m = std::min(std::min(dl, dr), std::min(db, dt));
      if (m == dl) return {0.0, y};
      if (m == dr) return {1.0, y};
      if (m == db) return {x, 0.0};
      return {x, 1.0};
    }
    case Shape::ellipse:
      return ellipse_nearest(p0, p1, x, y);
  }
  return {0, 0};
}

double DomainSpec::perimeter() const {
  switch (shape) {
    case Shape::disk:
      return 2 * M_PI;
    case Shape::square:
      return 4.0;
    case Shape::ellipse: {
      // Ramanujan approximation, plenty for band heuristics
      double a = p0, b = p1;
      double hh = (a - b) * (a - b) / ((a + b) * (a + b));
      return M_PI * (a + b) * (1 + 3 * hh / (10 + std::sqrt(4 - 3 * hh)));
    }
  }
  return 0;
}

double DomainGrid::area() const { return pairwise_sum(weight); }

std::shared_ptr<const DomainGrid> make_grid(const DomainSpec& spec, int resolution) {
  require(resolution >= 16, ErrCode::invalid_argument, "make_grid: resolution must be >= 16");
  require(spec.shape == DomainSpec::Shape::disk || spec.shape == DomainSpec::Shape::square ||
              spec.shape == DomainSpec::Shape::ellipse,
          ErrCode::unsupported_domain, "make_grid: unsupported domain");
  if (spec.shape == DomainSpec::Shape::ellipse)
    require(spec.p0 > 0 && spec.p1 > 0, ErrCode::unsupported_domain,
            "make_grid: ellipse radii must be positive");

  auto g = std::make_shared<DomainGrid>();
  g->domain = spec;
  g->resolution = resolution;
  g->h = 1.0 / resolution;

  // bounding box with a two-cell margin so every active node has indexable
  // neighbors; node layout symmetric under the domain's reflections
  double x0, y0;
  int nix, niy;  // interval counts
  switch (spec.shape) {
    case DomainSpec::Shape::disk:
      nix = niy = 2 * resolution + 4;
      x0 = y0 = -1.0 - 2.0 * g->h;
      break;
    case DomainSpec::Shape::square:
      nix = niy = resolution + 4;
      x0 = y0 = -2.0 * g->h;
      break;
    case DomainSpec::Shape::ellipse:
    default:
      nix = 2 * int(std::ceil(spec.p0 * resolution)) + 4;
      niy = 2 * int(std::ceil(spec.p1 * resolution)) + 4;
      x0 = -0.5 * nix * g->h;
      y0 = -0.5 * niy * g->h;
      break;
  }
  g->nx = nix + 1;
  g->ny = niy + 1;
  g->ox = x0;
  g->oy = y0;

  const size_t n = g->nodes();
  g->mask.assign(n, NodeKind::exterior);
  g->weight.assign(n, 0.0);
  g->band_pos.assign(n, -1);

  std::vector<uint8_t> in(n, 0);
  for (int iy = 0; iy < g->ny; ++iy)
    for (int ix = 0; ix < g->nx; ++ix)
      in[g->idx(ix, iy)] = spec.inside(g->x(ix), g->y(iy)) ? 1 : 0;

  // classify: band = active with an exterior 4-neighbor or within h of the
  // boundary; interior nodes then have all stencil neighbors active
  for (int iy = 1; iy < g->ny - 1; ++iy)
    for (int ix = 1; ix < g->nx - 1; ++ix) {
      int f = g->idx(ix, iy);
      if (!in[f]) continue;
      bool nbr_out = !in[f - 1] || !in[f + 1] || !in[f - g->nx] || !in[f + g->nx];
      auto bp = spec.nearest_boundary(g->x(ix), g->y(iy));
      double d = std::hypot(g->x(ix) - bp[0], g->y(iy) - bp[1]);
      g->mask[f] = (nbr_out || d < g->h) ? NodeKind::band : NodeKind::interior;
    }

  // quadrature weights: fraction of the node cell inside the domain, 4x4
  // midpoint subsampling (symmetric offsets keep mask/weight symmetry exact)
  const double off[4] = {-3.0 / 8.0, -1.0 / 8.0, 1.0 / 8.0, 3.0 / 8.0};
  auto cell_overlap = [&](int ix, int iy) {
    int count = 0;
    for (double oxs : off)
      for (double oys : off)
        if (spec.inside(g->x(ix) + oxs * g->h, g->y(iy) + oys * g->h)) ++count;
    return g->h * g->h * count / 16.0;
  };
  for (int iy = 0; iy < g->ny; ++iy)
    for (int ix = 0; ix < g->nx; ++ix) {
      int f = g->idx(ix, iy);
      if (g->mask[f] != NodeKind::exterior) g->weight[f] = cell_overlap(ix, iy);
    }
  // cells of exterior nodes can still overlap the domain; lump that sliver
  // onto the nearest active neighbor so the weights account for all of |Omega|
  for (int iy = 1; iy < g->ny - 1; ++iy)
    for (int ix = 1; ix < g->nx - 1; ++ix) {
      int f = g->idx(ix, iy);
      if (g->mask[f] != NodeKind::exterior) continue;
      bool near_active = false;
      for (int dy = -1; dy <= 1 && !near_active; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (g->mask[g->idx(ix + dx, iy + dy)] != NodeKind::exterior) {
            near_active = true;
            break;
          }
      if (!near_active) continue;
      double w = cell_overlap(ix, iy);
      if (w == 0) continue;
      auto bp = spec.nearest_boundary(g->x(ix), g->y(iy));
      int best = -1;
      double best_d = 1e300;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int jf = g->idx(ix + dx, iy + dy);
          if (g->mask[jf] == NodeKind::exterior) continue;
          double d = std::hypot(g->x(ix + dx) - bp[0], g->y(iy + dy) - bp[1]);
          if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && jf < best)) {
            best_d = d;
            best = jf;
          }
        }
      g->weight[best] += w;
    }

  for (int iy = 0; iy < g->ny; ++iy)
    for (int ix = 0; ix < g->nx; ++ix) {
      int f = g->idx(ix, iy);
      if (g->mask[f] == NodeKind::interior) g->interior.push_back(f);
      if (g->mask[f] == NodeKind::band) {
        g->band_pos[f] = int32_t(g->band.size());
        g->band.push_back(f);
        auto bp = spec.nearest_boundary(g->x(ix), g->y(iy));
        g->band_bx.push_back(bp[0]);
        g->band_by.push_back(bp[1]);
      }
    }

  // BFS depth from the boundary band into the interior; residual diagnostics
  // and interior L2 comparisons use depth >= 3 to stay clear of the first-order
  // Dirichlet sampling ring
  g->depth.assign(n, 0);
  {
    std::vector<int32_t> frontier = g->band, next;
    std::vector<uint8_t> seen(n, 0);
    for (int f : g->band) seen[f] = 1;
    int d = 1;
    while (!frontier.empty()) {
      next.clear();
      for (int f : frontier)
        for (int off : {-1, +1, -g->nx, +g->nx}) {
          int jf = f + off;
          if (g->mask[jf] == NodeKind::interior && !seen[jf]) {
            seen[jf] = 1;
            g->depth[jf] = d;
            next.push_back(jf);
          }
        }
      frontier.swap(next);
      ++d;
    }
  }

  // nearest node satisfying a predicate, ring search with index tie-break
  auto nearest_node = [&](int f, auto&& pred, int rmax) {
    int ix = f % g->nx, iy = f / g->nx;
    int best = -1;
    double best_d = 1e300;
    for (int r = 1; r <= rmax && best < 0; ++r) {
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= g->nx || jy >= g->ny) continue;
          int jf = g->idx(jx, jy);
          if (!pred(jf)) continue;
          double d = double(dx) * dx + double(dy) * dy;
          if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && jf < best)) {
            best_d = d;
            best = jf;
          }
        }
    }
    return best;
  };

  // nearest interior node per band node
  g->band_src.resize(g->band.size());
  for (size_t b = 0; b < g->band.size(); ++b) {
    int best = nearest_node(g->band[b],
                            [&](int jf) { return g->mask[jf] == NodeKind::interior; }, 6);
    require(best >= 0, ErrCode::unsupported_domain,
            "make_grid: band node with no interior node nearby (domain too thin)");
    g->band_src[b] = best;
  }

  // constant-extension source for stencil-based integrands: nearest node at
  // least two cells from the band
  g->ext_src.assign(n, -1);
  auto deep = [&](int jf) { return g->mask[jf] == NodeKind::interior && g->depth[jf] >= 2; };
  for (size_t f = 0; f < n; ++f) {
    if (g->mask[f] == NodeKind::exterior) continue;
    if (deep(int(f))) {
      g->ext_src[f] = int32_t(f);
      continue;
    }
    int best = nearest_node(int(f), deep, 8);
    g->ext_src[f] = best >= 0 ? best : int32_t(f);  // tiny domains fall back to self
  }

  return g;
}

double pairwise_sum(const double* v, size_t n) {
  if (n <= 32) {
    double s = 0;
    for (size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

double integrate(const DomainGrid& g, const std::vector<double>& density) {
  std::vector<double> terms;
  terms.reserve(g.interior.size() + g.band.size());
  for (size_t f = 0; f < g.nodes(); ++f)
    if (g.mask[f] != NodeKind::exterior) terms.push_back(g.weight[f] * density[f]);
  return pairwise_sum(terms);
}

double integrate_interior_extended(const DomainGrid& g,
                                   const std::function<double(int)>& interior_value) {
  std::vector<double> plane(g.nodes(), 0.0);
  for (int f : g.interior)
    if (g.depth[f] >= 2) plane[f] = interior_value(f);
  for (size_t f = 0; f < g.nodes(); ++f)
    if (g.is_active(int(f)) && g.ext_src[f] != int32_t(f)) plane[f] = plane[g.ext_src[f]];
  return integrate(g, plane);
}

double solve_dirichlet_laplace(const DomainGrid& g, std::vector<double>& u, double tol,
                               int max_iter, double fail_tol) {
  const auto& interior = g.interior;
  const size_t m = interior.size();
  if (max_iter <= 0) max_iter = int(40 * std::sqrt(double(m)) + 2000);

  std::vector<int32_t> pos(g.nodes(), -1);
  for (size_t i = 0; i < m; ++i) pos[interior[i]] = int32_t(i);

  // A x = b with A the interior graph Laplacian (factor 1/h^2 dropped; it
  // cancels in the Dirichlet data assembly)
  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (size_t i = 0; i < m; ++i) {
      int f = interior[i];
      double s = 4.0 * x[i];
      for (int off : {-1, +1, -g.nx, +g.nx}) {
        int p = pos[f + off];
        if (p >= 0) s -= x[p];
      }
      out[i] = s;
    }
  };

  std::vector<double> b(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    int f = interior[i];
    double s = 0;
    for (int off : {-1, +1, -g.nx, +g.nx})
      if (g.mask[f + off] == NodeKind::band) s += u[f + off];
    b[i] = s;
  }
  double bnorm = std::sqrt(pairwise_sum([&] {
    std::vector<double> t(m);
    for (size_t i = 0; i < m; ++i) t[i] = b[i] * b[i];
    return t;
  }()));
  if (bnorm == 0) bnorm = 1;

  std::vector<double> x(m, 0.0), r = b, p = b, ap(m);
  for (size_t i = 0; i < m; ++i) x[i] = u[interior[i]];  // warm start from entry values
  apply(x, ap);
  for (size_t i = 0; i < m; ++i) r[i] = b[i] - ap[i];
  p = r;
  auto dot_v = [&](const std::vector<double>& a, const std::vector<double>& c) {
    std::vector<double> t(m);
    for (size_t i = 0; i < m; ++i) t[i] = a[i] * c[i];
    return pairwise_sum(t);
  };
  double rr = dot_v(r, r);
  for (int it = 0; it < max_iter && std::sqrt(rr) / bnorm > tol; ++it) {
    apply(p, ap);
    double alpha = rr / dot_v(p, ap);
    for (size_t i = 0; i < m; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double rr2 = dot_v(r, r);
    double beta = rr2 / rr;
    rr = rr2;
    for (size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
  }
  double resid = std::sqrt(rr) / bnorm;
  require(resid <= fail_tol, ErrCode::solve_failed, "solve_dirichlet_laplace: residual too large");
  for (size_t i = 0; i < m; ++i) u[interior[i]] = x[i];
  return resid;
}

std::vector<std::array<double, 2>> boundary_points(const DomainSpec& spec, int count) {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(count);
  switch (spec.shape) {
    case DomainSpec::Shape::disk:
      for (int i = 0; i < count; ++i) {
        double t = 2 * M_PI * i / count;
        pts.push_back({std::cos(t), std::sin(t)});
      }
      break;
    case DomainSpec::Shape::square:
      for (int i = 0; i < count; ++i) {
        double s = 4.0 * i / count;
        if (s < 1)
          pts.push_back({s, 0.0});
        else if (s < 2)
          pts.push_back({1.0, s - 1});
        else if (s < 3)
          pts.push_back({3 - s, 1.0});
        else
          pts.push_back({0.0, 4 - s});
      }
      break;
    case DomainSpec::Shape::ellipse:
      for (int i = 0; i < count; ++i) {
        double t = 2 * M_PI * i / count;
        pts.push_back({spec.p0 * std::cos(t), spec.p1 * std::sin(t)});
      }
      break;
  }
  return pts;
}

}  // namespace nlc
