#include "nlc/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace nlc {

Vec3 stereographic(cplx w) {
  const double m2 = std::norm(w);
  if (!(m2 < 1e300)) return {0, 0, -1};
  const double d = 1.0 + m2;
  return {2.0 * w.real() / d, 2.0 * w.imag() / d, (1.0 - m2) / d};
}

cplx stereographic_inverse(const Vec3& n) {
  return cplx(n.x, n.y) / (1.0 + n.z);
}

Vec3 stereographic_pq(cplx p, cplx q) {
  const double p2 = std::norm(p), q2 = std::norm(q);
  const cplx pqbar = p * std::conj(q);
  const double d = p2 + q2;
  return {2.0 * pqbar.real() / d, 2.0 * pqbar.imag() / d, (q2 - p2) / d};
}

cplx GreenPair::value(cplx x) const {
  require(analytic, ErrCode::invalid_argument, "GreenPair::value needs an analytic pair");
  return 1.0 - std::conj(a) * x;
}

cplx GreenPair::value_node(int flat) const {
  if (analytic) {
    require(grid != nullptr, ErrCode::invalid_argument, "GreenPair::value_node without grid");
    int ix = flat % grid->nx, iy = flat / grid->nx;
    // band nodes evaluate at their exact boundary point
    int b = grid->band_pos[flat];
    cplx x = b >= 0 ? cplx(grid->band_bx[b], grid->band_by[b]) : cplx(grid->x(ix), grid->y(iy));
    return value(x);
  }
  return std::exp(cplx(log_mod[flat], phase[flat]));
}

GreenPair disk_green_pair(cplx a) {
  require(std::abs(a) < 1.0 - 1e-6, ErrCode::point_on_boundary,
          "disk_green_pair: point too close to the boundary");
  GreenPair gp;
  gp.a = a;
  gp.analytic = true;
  return gp;
}

GreenPair numeric_green_pair(std::shared_ptr<const DomainGrid> grid, cplx a) {
  const DomainGrid& g = *grid;
  require(g.domain.inside(a.real(), a.imag()), ErrCode::point_on_boundary,
          "numeric_green_pair: point not inside the domain");
  auto bp = g.domain.nearest_boundary(a.real(), a.imag());
  require(std::hypot(a.real() - bp[0], a.imag() - bp[1]) >= 2.0 * g.h, ErrCode::point_on_boundary,
          "numeric_green_pair: point closer than 2h to the boundary");

  GreenPair gp;
  gp.a = a;
  gp.analytic = false;
  gp.grid = grid;
  gp.log_mod.assign(g.nodes(), 0.0);
  for (size_t b = 0; b < g.band.size(); ++b)
    gp.log_mod[g.band[b]] = std::log(std::abs(cplx(g.band_bx[b], g.band_by[b]) - a));
  solve_dirichlet_laplace(g, gp.log_mod, 1e-12);

  // harmonic conjugate on the dual lattice: cell (i,j) has all four primal
  // corners active; increments across a primal edge are exact differences of g
  const int nx = g.nx, ny = g.ny;
  auto cell_ok = [&](int ix, int iy) {
    if (ix < 0 || iy < 0 || ix >= nx - 1 || iy >= ny - 1) return false;
    return g.is_active(g.idx(ix, iy)) && g.is_active(g.idx(ix + 1, iy)) &&
           g.is_active(g.idx(ix, iy + 1)) && g.is_active(g.idx(ix + 1, iy + 1));
  };
  std::vector<double> hdual(g.nodes(), 0.0);  // indexed by lower-left corner
  std::vector<uint8_t> seen(g.nodes(), 0);
  int anchor = -1;
  for (int f : g.interior) {
    int ix = f % nx, iy = f / nx;
    if (cell_ok(ix, iy)) {
      anchor = f;
      break;
    }
  }
  require(anchor >= 0, ErrCode::solve_failed, "numeric_green_pair: no complete dual cell");
  const auto& gv = gp.log_mod;
  std::queue<int> fifo;
  seen[anchor] = 1;
  fifo.push(anchor);
  while (!fifo.empty()) {
    int f = fifo.front();
    fifo.pop();
    int ix = f % nx, iy = f / nx;
    struct Step {
      int dx, dy;
      double inc;
    };
    // every increment crosses an edge of the source cell, so only its own
    // corners are touched: dh/dx = -dg/dy across the right/left edge,
    // dh/dy = +dg/dx across the top/bottom edge
    const Step steps[4] = {
        {+1, 0, -(gv[g.idx(ix + 1, iy + 1)] - gv[g.idx(ix + 1, iy)])},
        {-1, 0, +(gv[g.idx(ix, iy + 1)] - gv[g.idx(ix, iy)])},
        {0, +1, +(gv[g.idx(ix + 1, iy + 1)] - gv[g.idx(ix, iy + 1)])},
        {0, -1, -(gv[g.idx(ix + 1, iy)] - gv[g.idx(ix, iy)])},
    };
    for (const Step& s : steps) {
      int jx = ix + s.dx, jy = iy + s.dy;
      if (!cell_ok(jx, jy)) continue;
      int jf = g.idx(jx, jy);
      if (seen[jf]) continue;
      seen[jf] = 1;
      hdual[jf] = hdual[f] + s.inc;
      fifo.push(jf);
    }
  }

  // primal phase = mean of adjacent dual values; stragglers copy a neighbor
  gp.phase.assign(g.nodes(), 0.0);
  std::vector<uint8_t> has(g.nodes(), 0);
  for (size_t f = 0; f < g.nodes(); ++f) {
    if (!g.is_active(int(f))) continue;
    int ix = int(f) % nx, iy = int(f) / nx;
    double s = 0;
    int c = 0;
    for (int dy = -1; dy <= 0; ++dy)
      for (int dx = -1; dx <= 0; ++dx) {
        int jx = ix + dx, jy = iy + dy;
        if (cell_ok(jx, jy) && seen[g.idx(jx, jy)]) {
          s += hdual[g.idx(jx, jy)];
          ++c;
        }
      }
    if (c > 0) {
      gp.phase[f] = s / c;
      has[f] = 1;
    }
  }
  for (int pass = 0; pass < 4; ++pass)
    for (size_t f = 0; f < g.nodes(); ++f) {
      if (!g.is_active(int(f)) || has[f]) continue;
      for (int off : {-1, +1, -nx, +nx}) {
        size_t j = f + off;
        if (g.is_active(int(j)) && has[j]) {
          gp.phase[f] = gp.phase[j];
          has[f] = 1;
          break;
        }
      }
    }
  return gp;
}

namespace {

struct PQField {
  std::vector<cplx> p, q;  // per node
};

// Products of (x - a_j) and G_{a_j}(x) over the escape points, evaluated at
// interior node coordinates and exact boundary points of band nodes.
PQField base_products(const std::vector<cplx>& points, const DomainGrid& g,
                      const std::vector<GreenPair>& pairs) {
  PQField f;
  f.p.assign(g.nodes(), cplx(1, 0));
  f.q.assign(g.nodes(), cplx(1, 0));
  for (size_t fl = 0; fl < g.nodes(); ++fl) {
    if (!g.is_active(int(fl))) continue;
    int ix = int(fl) % g.nx, iy = int(fl) / g.nx;
    int b = g.band_pos[fl];
    cplx x = b >= 0 ? cplx(g.band_bx[b], g.band_by[b]) : cplx(g.x(ix), g.y(iy));
    cplx num(1, 0), den(1, 0);
    for (size_t j = 0; j < points.size(); ++j) {
      num *= (x - points[j]);
      den *= pairs[j].value_node(int(fl));
    }
    f.p[fl] = num;
    f.q[fl] = den;
  }
  return f;
}

std::vector<GreenPair> make_pairs(const std::vector<cplx>& points,
                                  const std::shared_ptr<const DomainGrid>& grid) {
  std::vector<GreenPair> pairs;
  pairs.reserve(points.size());
  for (cplx a : points) {
    require(grid->domain.inside(a.real(), a.imag()), ErrCode::invalid_argument,
            "escape point not inside the domain");
    if (grid->domain.shape == DomainSpec::Shape::disk) {
      GreenPair gp = disk_green_pair(a);
      gp.grid = grid;
      pairs.push_back(std::move(gp));
    } else {
      pairs.push_back(numeric_green_pair(grid, a));
    }
  }
  return pairs;
}

DirectorField field_from_pq(const PQField& pq, const std::shared_ptr<const DomainGrid>& grid) {
  DirectorField n(grid);
  const DomainGrid& g = *grid;
  for (size_t fl = 0; fl < g.nodes(); ++fl) {
    if (!g.is_active(int(fl))) continue;
    Vec3 v = stereographic_pq(pq.p[fl], pq.q[fl]);
    n.at(0, int(fl)) = v.x;
    n.at(1, int(fl)) = v.y;
    n.at(2, int(fl)) = v.z;
  }
  n.freeze_boundary();
  return n;
}

}  // namespace

DirectorField conformal_field(const EscapeConfig& cfg, std::shared_ptr<const DomainGrid> grid) {
  require(cfg.m != 0, ErrCode::invalid_argument, "conformal_field: degree must be nonzero");
  require(int(cfg.points.size()) == std::abs(cfg.m), ErrCode::invalid_argument,
          "conformal_field: need |m| escape points, got " + std::to_string(cfg.points.size()));
  auto pairs = make_pairs(cfg.points, grid);
  PQField pq = base_products(cfg.points, *grid, pairs);
  const cplx ph = std::polar(1.0, cfg.alpha);
  const bool north = cfg.orientation == EscapeConfig::Orientation::north;
  for (size_t fl = 0; fl < grid->nodes(); ++fl) {
    if (!grid->is_active(int(fl))) continue;
    cplx p0 = pq.p[fl], q0 = pq.q[fl];
    if (cfg.m > 0) {
      if (north) {
        pq.p[fl] = ph * p0;
        pq.q[fl] = q0;
      } else {
        pq.p[fl] = ph * std::conj(q0);
        pq.q[fl] = std::conj(p0);
      }
    } else {
      if (north) {
        pq.p[fl] = ph * std::conj(p0);
        pq.q[fl] = std::conj(q0);
      } else {
        pq.p[fl] = ph * q0;
        pq.q[fl] = p0;
      }
    }
  }
  return field_from_pq(pq, grid);
}

DirectorField mixed_conformal_field(const std::vector<cplx>& b_points,
                                    const std::vector<cplx>& c_points, double alpha,
                                    std::shared_ptr<const DomainGrid> grid) {
  require(!b_points.empty() || !c_points.empty(), ErrCode::invalid_argument,
          "mixed_conformal_field: no escape points");
  auto bpairs = make_pairs(b_points, grid);
  auto cpairs = make_pairs(c_points, grid);
  PQField bq = base_products(b_points, *grid, bpairs);
  PQField cq = base_products(c_points, *grid, cpairs);
  const cplx ph = std::polar(1.0, alpha);
  PQField pq;
  pq.p.assign(grid->nodes(), cplx(0, 0));
  pq.q.assign(grid->nodes(), cplx(0, 0));
  for (size_t fl = 0; fl < grid->nodes(); ++fl) {
    if (!grid->is_active(int(fl))) continue;
    pq.p[fl] = ph * bq.p[fl] * cq.q[fl];
    pq.q[fl] = bq.q[fl] * cq.p[fl];
  }
  return field_from_pq(pq, grid);
}

std::vector<std::array<double, 2>> boundary_director(
    const EscapeConfig& cfg, const std::vector<std::array<double, 2>>& pts) {
  require(cfg.m != 0 && int(cfg.points.size()) == std::abs(cfg.m), ErrCode::invalid_argument,
          "boundary_director: invalid escape config");
  std::vector<std::array<double, 2>> out;
  out.reserve(pts.size());
  for (const auto& xy : pts) {
    cplx x(xy[0], xy[1]);
    cplx w = std::polar(1.0, cfg.alpha);
    for (cplx a : cfg.points) {
      cplx blaschke = (x - a) / (1.0 - std::conj(a) * x);  // |.| = 1 on |x| = 1
      w *= (cfg.m > 0) ? blaschke : std::conj(blaschke);
    }
    double m = std::abs(w);
    out.push_back({w.real() / m, w.imag() / m});
  }
  return out;
}

int degree_of_boundary(const std::vector<std::array<double, 2>>& samples) {
  require(samples.size() >= 4, ErrCode::under_sampled, "degree_of_boundary: too few samples");
  double total = 0;
  const size_t n = samples.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& u = samples[i];
    const auto& v = samples[(i + 1) % n];
    double crossz = u[0] * v[1] - u[1] * v[0];
    double dotv = u[0] * v[0] + u[1] * v[1];
    double dth = std::atan2(crossz, dotv);
    require(std::abs(dth) < M_PI / 2, ErrCode::under_sampled,
            "degree_of_boundary: consecutive samples rotate by >= pi/2");
    total += dth;
  }
  return int(std::lround(total / (2 * M_PI)));
}

namespace {

// boundary parameter for ordering band nodes counterclockwise
double boundary_param(const DomainSpec& spec, double bx, double by) {
  switch (spec.shape) {
    case DomainSpec::Shape::disk:
    case DomainSpec::Shape::ellipse:
      return std::atan2(by, bx);
    case DomainSpec::Shape::square: {
      if (by == 0.0) return bx;
      if (bx == 1.0) return 1.0 + by;
      if (by == 1.0) return 3.0 - bx;
      return 4.0 - by;
    }
  }
  return 0;
}

std::vector<int> band_in_boundary_order(const DomainGrid& g) {
  std::vector<int> order(g.band.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double pa = boundary_param(g.domain, g.band_bx[a], g.band_by[a]);
    double pb = boundary_param(g.domain, g.band_bx[b], g.band_by[b]);
    if (pa != pb) return pa < pb;
    return g.band[a] < g.band[b];
  });
  return order;
}

}  // namespace

int boundary_degree_of_field(const DirectorField& n) {
  const DomainGrid& g = *n.grid;
  auto order = band_in_boundary_order(g);
  std::vector<std::array<double, 2>> samples;
  samples.reserve(order.size());
  for (int i : order) {
    int f = g.band[i];
    double nx = n.at(0, f), ny = n.at(1, f);
    double m = std::hypot(nx, ny);
    require(m > 1e-12, ErrCode::under_sampled, "boundary_degree_of_field: vanishing planar part");
    samples.push_back({nx / m, ny / m});
  }
  return degree_of_boundary(samples);
}

int q_level_boundary_degree(const DirectorField& c) {
  const DomainGrid& g = *c.grid;
  auto order = band_in_boundary_order(g);
  std::vector<std::array<double, 2>> samples;
  samples.reserve(order.size());
  for (int i : order) {
    int f = g.band[i];
    double c1 = c.at(0, f), c2 = c.at(1, f);
    double m = std::hypot(c1, c2);
    require(m > 1e-12, ErrCode::under_sampled, "q_level_boundary_degree: vanishing (c1,c2)");
    samples.push_back({c1 / m, c2 / m});
  }
  return degree_of_boundary(samples);
}

DirectorField b0_conformal_cfield(int k, const std::vector<cplx>& points,
                                  std::shared_ptr<const DomainGrid> grid, double kappa) {
  require(k != 0, ErrCode::invalid_argument, "b0_conformal_cfield: degree must be nonzero");
  require(int(points.size()) == std::abs(k), ErrCode::invalid_argument,
          "b0_conformal_cfield: need |k| escape points");
  require(kappa > 1.0, ErrCode::invalid_argument, "b0_conformal_cfield: kappa must exceed 1");
  auto pairs = make_pairs(points, grid);
  PQField base = base_products(points, *grid, pairs);
  // poles at the escape points: w = kappa * prod G_a/(x - a); conjugated for
  // k > 0 so the Q-level boundary degree comes out equal to k
  PQField pq;
  pq.p.assign(grid->nodes(), cplx(0, 0));
  pq.q.assign(grid->nodes(), cplx(0, 0));
  for (size_t fl = 0; fl < grid->nodes(); ++fl) {
    if (!grid->is_active(int(fl))) continue;
    cplx p = kappa * base.q[fl], q = base.p[fl];
    if (k > 0) {
      p = std::conj(p);
      q = std::conj(q);
    }
    pq.p[fl] = p;
    pq.q[fl] = q;
  }
  return field_from_pq(pq, grid);
}

double signed_area(const DirectorField& n) {
  const DomainGrid& g = *n.grid;
  return integrate_interior_extended(g, [&](int fl) {
    Vec3 dx, dy;
    for (int c = 0; c < 3; ++c) gradient_at(g, n.plane(c), fl, dx[c], dy[c]);
    Vec3 nn{n.at(0, fl), n.at(1, fl), n.at(2, fl)};
    return dot(nn, cross(dx, dy));
  });
}

ConformalityResidual conformality_residual(const DirectorField& n) {
  const DomainGrid& g = *n.grid;
  double worst[2] = {0, 0};
  for (int fl : g.interior) {
    if (g.depth[fl] < 3) continue;  // skip the first-order Dirichlet sampling ring
    Vec3 dx, dy;
    for (int c = 0; c < 3; ++c) gradient_at(g, n.plane(c), fl, dx[c], dy[c]);
    Vec3 nn{n.at(0, fl), n.at(1, fl), n.at(2, fl)};
    Vec3 ncx = cross(nn, dx);
    worst[0] = std::max(worst[0], norm(dy - ncx));
    worst[1] = std::max(worst[1], norm(dy + ncx));
  }
  ConformalityResidual r;
  if (worst[0] <= worst[1]) {
    r.residual = worst[0];
    r.sigma = 1;
  } else {
    r.residual = worst[1];
    r.sigma = -1;
  }
  return r;
}

}  // namespace nlc
