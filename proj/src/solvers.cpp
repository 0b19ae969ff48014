#include "nlc/solvers.hpp"

#include <chrono>
#include <cmath>

namespace nlc {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_sweeps:
      return "max_sweeps";
    case SolveStatus::norm_collapse:
      return "norm_collapse";
    case SolveStatus::step_underflow:
      return "step_underflow";
  }
  return "unknown";
}

namespace {

using clock_type = std::chrono::steady_clock;

// deterministic energy reduction: serial per-row partials combined in order
template <typename RowTerm>
double rowwise_sum(const DomainGrid& g, RowTerm&& row_term) {
  std::vector<double> rows(g.ny, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < g.ny; ++iy) rows[iy] = row_term(iy);
  return pairwise_sum(rows);
}

template <int K>
double field_edge_energy(const NodeField<K>& f) {
  const DomainGrid& g = *f.grid;
  return 0.5 * rowwise_sum(g, [&](int iy) {
    double acc = 0;
    for (int ix = 0; ix < g.nx - 1; ++ix) {
      int fl = g.idx(ix, iy);
      if (!g.is_active(fl)) continue;
      if (g.is_active(fl + 1))
        for (int c = 0; c < K; ++c) {
          double d = f.at(c, fl + 1) - f.at(c, fl);
          acc += d * d;
        }
      if (iy + 1 < g.ny && g.is_active(fl + g.nx))
        for (int c = 0; c < K; ++c) {
          double d = f.at(c, fl + g.nx) - f.at(c, fl);
          acc += d * d;
        }
    }
    return acc;
  });
}

double bulk_sum(const QField& q, const MaterialParams& p) {
  const DomainGrid& g = *q.grid;
  const double cell = g.h * g.h / (p.eps * p.eps);
  return rowwise_sum(g, [&](int iy) {
    double acc = 0;
    for (int ix = 0; ix < g.nx; ++ix) {
      int fl = g.idx(ix, iy);
      if (!g.is_active(fl)) continue;
      QVec v{{q.at(0, fl), q.at(1, fl), q.at(2, fl), q.at(3, fl), q.at(4, fl)}};
      acc += cell * bulk_potential(v, p);
    }
    return acc;
  });
}

// shared explicit-flow driver; Sweep(cur, nxt, tau) -> false on norm collapse,
// Energy(field) is the exact discrete Lyapunov function of the update
template <typename Field, typename Sweep, typename Energy, typename Residual>
SolveReport run_flow(Field& field, double tau0, const FlowConfig& cfg, Sweep&& sweep,
                     Energy&& energy, Residual&& residual) {
  auto t0 = clock_type::now();
  SolveReport rep;
  rep.tau = cfg.tau > 0 ? cfg.tau : tau0;
  double tau = rep.tau;

  Field next = field;
  double e_cur = energy(field);
  rep.initial_energy = e_cur;
  rep.initial_residual = residual(field);
  rep.energy_history.push_back(e_cur);
  double window_start_energy = e_cur;
  const double floor_scale = std::max(1.0, std::abs(e_cur));
  long accepts_since_growth = 0;

  // immediate exit at a critical point
  if (rep.initial_residual <= cfg.residual_tol * std::max(rep.initial_residual, 0.0) &&
      rep.initial_residual == 0.0) {
    rep.final_energy = e_cur;
    rep.final_residual = rep.initial_residual;
    rep.status = SolveStatus::converged;
    rep.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    return rep;
  }

  while (rep.sweeps < cfg.max_sweeps) {
    if (!sweep(field, next, tau)) {
      rep.status = SolveStatus::norm_collapse;
      break;
    }
    double e_next = energy(next);
    if (cfg.adaptive && e_next > e_cur) {
      ++rep.rejected_steps;
      tau *= 0.5;
      accepts_since_growth = 0;
      if (tau < 1e-12) {
        rep.status = SolveStatus::step_underflow;
        break;
      }
      continue;
    }
    if (e_next > e_cur) rep.monotone = false;
    std::swap(field.data, next.data);
    e_cur = e_next;
    ++rep.sweeps;
    if (++accepts_since_growth >= 50 && tau < rep.tau) {
      tau = std::min(2.0 * tau, rep.tau);
      accepts_since_growth = 0;
    }

    if (rep.sweeps % cfg.window == 0) {
      rep.energy_history.push_back(e_cur);
      if (cfg.checkpoint) cfg.checkpoint(rep.sweeps);
      double res = residual(field);
      bool plateau = (window_start_energy - e_cur) <= cfg.energy_tol * floor_scale;
      bool res_drop = res <= cfg.residual_tol * rep.initial_residual;
      if (plateau || res_drop) {
        rep.final_residual = res;
        rep.status = SolveStatus::converged;
        rep.final_energy = e_cur;
        rep.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
        return rep;
      }
      window_start_energy = e_cur;
    }
  }
  if (rep.sweeps >= cfg.max_sweeps) rep.status = SolveStatus::max_sweeps;
  rep.final_energy = e_cur;
  rep.final_residual = residual(field);
  rep.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
  return rep;
}

// one projected heat-flow sweep; returns false on norm collapse
bool s2_sweep(const DirectorField& cur, DirectorField& nxt, double tau) {
  const DomainGrid& g = *cur.grid;
  const double r = tau / (g.h * g.h);
  const size_t N = g.nodes();
  const double* u0 = cur.plane(0);
  const double* u1 = cur.plane(1);
  const double* u2 = cur.plane(2);
  double* v0 = nxt.plane(0);
  double* v1 = nxt.plane(1);
  double* v2 = nxt.plane(2);
  bool ok = true;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(&& : ok)
#endif
  for (int iy = 1; iy < g.ny - 1; ++iy) {
    for (int ix = 1; ix < g.nx - 1; ++ix) {
      int fl = g.idx(ix, iy);
      if (g.mask[fl] != NodeKind::interior) continue;
      double a = u0[fl] + r * (u0[fl + 1] + u0[fl - 1] + u0[fl + g.nx] + u0[fl - g.nx] - 4 * u0[fl]);
      double b = u1[fl] + r * (u1[fl + 1] + u1[fl - 1] + u1[fl + g.nx] + u1[fl - g.nx] - 4 * u1[fl]);
      double c = u2[fl] + r * (u2[fl + 1] + u2[fl - 1] + u2[fl + g.nx] + u2[fl - g.nx] - 4 * u2[fl]);
      double nn = std::sqrt(a * a + b * b + c * c);
      if (nn < 0.5) {
        ok = false;
        nn = 1.0;
      }
      v0[fl] = a / nn;
      v1[fl] = b / nn;
      v2[fl] = c / nn;
      (void)N;
    }
  }
  return ok;
}

bool q_sweep(const QField& cur, QField& nxt, double tau, const MaterialParams& p) {
  const DomainGrid& g = *cur.grid;
  const double r = tau / (g.h * g.h);
  const double ie2 = 1.0 / (p.eps * p.eps);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 1; iy < g.ny - 1; ++iy) {
    for (int ix = 1; ix < g.nx - 1; ++ix) {
      int fl = g.idx(ix, iy);
      if (g.mask[fl] != NodeKind::interior) continue;
      QVec v{{cur.at(0, fl), cur.at(1, fl), cur.at(2, fl), cur.at(3, fl), cur.at(4, fl)}};
      QVec grad = bulk_gradient(v, p);
      for (int c = 0; c < 5; ++c) {
        const double* u = cur.plane(c);
        double lap5 = u[fl + 1] + u[fl - 1] + u[fl + g.nx] + u[fl - g.nx] - 4 * u[fl];
        nxt.at(c, fl) = u[fl] + r * lap5 - tau * ie2 * grad[c];
      }
    }
  }
  return true;
}

}  // namespace

std::vector<double> harmonic_residual_field(const DirectorField& n) {
  const DomainGrid& g = *n.grid;
  std::vector<double> r(g.nodes(), 0.0);
  for (int fl : g.interior) {
    double acc = 0, g2 = 0;
    double lap[3], val[3];
    for (int c = 0; c < 3; ++c) {
      lap[c] = laplacian_at(g, n.plane(c), fl);
      val[c] = n.at(c, fl);
      double gx, gy;
      gradient_at(g, n.plane(c), fl, gx, gy);
      g2 += gx * gx + gy * gy;
    }
    for (int c = 0; c < 3; ++c) {
      double t = lap[c] + g2 * val[c];
      acc += t * t;
    }
    r[fl] = std::sqrt(acc);
  }
  return r;
}

std::vector<double> q_harmonic_residual_field(const QField& q) {
  const DomainGrid& g = *q.grid;
  std::vector<double> r(g.nodes(), 0.0);
  for (int fl : g.interior) {
    double acc = 0, g2 = 0;
    double lap[5], val[5];
    for (int c = 0; c < 5; ++c) {
      lap[c] = laplacian_at(g, q.plane(c), fl);
      val[c] = q.at(c, fl);
      double gx, gy;
      gradient_at(g, q.plane(c), fl, gx, gy);
      g2 += gx * gx + gy * gy;
    }
    for (int c = 0; c < 5; ++c) {
      double t = lap[c] + g2 * val[c];
      acc += t * t;
    }
    r[fl] = std::sqrt(acc);
  }
  return r;
}

double residual_l2(const DomainGrid& g, const std::vector<double>& r) {
  std::vector<double> sq(r.size());
  for (size_t i = 0; i < r.size(); ++i) sq[i] = r[i] * r[i];
  return std::sqrt(integrate(g, sq));
}

double residual_max_core(const DomainGrid& g, const std::vector<double>& r) {
  double m = 0;
  for (int fl : g.interior)
    if (g.depth[fl] >= 3) m = std::max(m, r[fl]);
  return m;
}

SolveReport harmonic_map_flow(DirectorField& n, const FlowConfig& cfg) {
  const DomainGrid& g = *n.grid;
  double tau0 = g.h * g.h / 4.0;
  return run_flow(
      n, tau0, cfg, [](const DirectorField& c, DirectorField& x, double t) { return s2_sweep(c, x, t); },
      [](const DirectorField& f) { return dirichlet_energy_discrete(f); },
      [&](const DirectorField& f) { return residual_l2(g, harmonic_residual_field(f)); });
}

SolveReport s4_harmonic_flow(DirectorField& c, const FlowConfig& cfg) {
  return harmonic_map_flow(c, cfg);
}

SolveReport ldg_gradient_flow(QField& q, const MaterialParams& p, const FlowConfig& cfg) {
  const DomainGrid& g = *q.grid;
  const double lambda = 2 * p.a2 + 3 * p.b2 * p.s_plus + 6 * p.c2 * p.s_plus * p.s_plus;
  double tau0 = std::min(g.h * g.h / 4.0, p.eps * p.eps / (2.0 * lambda));
  return run_flow(
      q, tau0, cfg,
      [&](const QField& c, QField& x, double t) { return q_sweep(c, x, t, p); },
      [&](const QField& f) { return field_edge_energy(f) + bulk_sum(f, p); },
      [&](const QField& f) {
        // gradient norm of the flow: ||-lap Q + eps^-2 grad f~||_L2
        std::vector<double> r(g.nodes(), 0.0);
        for (int fl : g.interior) {
          QVec v{{f.at(0, fl), f.at(1, fl), f.at(2, fl), f.at(3, fl), f.at(4, fl)}};
          QVec grad = bulk_gradient(v, p);
          double acc = 0;
          for (int c = 0; c < 5; ++c) {
            double t = -laplacian_at(g, f.plane(c), fl) + grad[c] / (p.eps * p.eps);
            acc += t * t;
          }
          r[fl] = std::sqrt(acc);
        }
        return residual_l2(g, r);
      });
}

DirectorField lifted_boundary_init(
    std::shared_ptr<const DomainGrid> grid,
    const std::function<std::array<double, 2>(double, double)>& planar_boundary,
    bool escape_down) {
  const DomainGrid& g = *grid;
  DirectorField n(grid);
  std::vector<double> u1(g.nodes(), 0.0), u2(g.nodes(), 0.0);
  for (size_t b = 0; b < g.band.size(); ++b) {
    auto nb = planar_boundary(g.band_bx[b], g.band_by[b]);
    u1[g.band[b]] = nb[0];
    u2[g.band[b]] = nb[1];
  }
  solve_dirichlet_laplace(g, u1, 1e-10);
  solve_dirichlet_laplace(g, u2, 1e-10);
  const double sign = escape_down ? -1.0 : 1.0;
  for (size_t fl = 0; fl < g.nodes(); ++fl) {
    if (!g.is_active(int(fl))) continue;
    double a = u1[fl], b = u2[fl];
    double planar2 = a * a + b * b;
    double c = sign * std::sqrt(std::max(0.0, 1.0 - planar2));
    double nn = std::sqrt(planar2 + c * c);
    if (nn < 1e-12) {
      a = 0;
      b = 0;
      c = sign;
      nn = 1;
    }
    n.at(0, fl) = a / nn;
    n.at(1, fl) = b / nn;
    n.at(2, fl) = c / nn;
  }
  // band nodes carry the exact planar data
  for (size_t b = 0; b < g.band.size(); ++b) {
    auto nb = planar_boundary(g.band_bx[b], g.band_by[b]);
    int f = g.band[b];
    double m = std::hypot(nb[0], nb[1]);
    n.at(0, f) = nb[0] / m;
    n.at(1, f) = nb[1] / m;
    n.at(2, f) = 0.0;
  }
  n.freeze_boundary();
  return n;
}

DirectorField prolong_director(const DirectorField& coarse,
                               std::shared_ptr<const DomainGrid> fine) {
  const DomainGrid& gc = *coarse.grid;
  const DomainGrid& gf = *fine;
  DirectorField out(fine);
  for (int fl : gf.interior) {
    int ix = fl % gf.nx, iy = fl / gf.nx;
    double x = gf.x(ix), y = gf.y(iy);
    double fx = (x - gc.ox) / gc.h, fy = (y - gc.oy) / gc.h;
    int jx = std::min(std::max(int(std::floor(fx)), 0), gc.nx - 2);
    int jy = std::min(std::max(int(std::floor(fy)), 0), gc.ny - 2);
    double tx = fx - jx, ty = fy - jy;
    double wsum = 0;
    double acc[3] = {0, 0, 0};
    const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    const int nodes[4] = {gc.idx(jx, jy), gc.idx(jx + 1, jy), gc.idx(jx, jy + 1),
                          gc.idx(jx + 1, jy + 1)};
    for (int k = 0; k < 4; ++k) {
      if (!gc.is_active(nodes[k]) || w[k] == 0) continue;
      wsum += w[k];
      for (int c = 0; c < 3; ++c) acc[c] += w[k] * coarse.at(c, nodes[k]);
    }
    if (wsum < 1e-12) {  // isolated fine node: copy the nearest coarse band value
      int src = gc.band[0];
      double best = 1e300;
      for (size_t b = 0; b < gc.band.size(); ++b) {
        double d = std::hypot(gc.band_bx[b] - x, gc.band_by[b] - y);
        if (d < best) {
          best = d;
          src = gc.band[b];
        }
      }
      for (int c = 0; c < 3; ++c) acc[c] = coarse.at(c, src);
      wsum = 1;
    }
    double nn = std::sqrt(acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2]) / wsum;
    for (int c = 0; c < 3; ++c) out.at(c, fl) = acc[c] / (wsum * std::max(nn, 1e-12));
  }
  return out;
}

DirectorField solve_harmonic_multilevel(
    const DomainSpec& domain, int resolution,
    const std::function<std::array<double, 2>(double, double)>& planar_boundary,
    const FlowConfig& cfg, SolveReport* report, bool escape_down) {
  std::vector<int> levels;
  for (int r = resolution; r >= 32; r /= 2) levels.push_back(r);
  if (levels.empty()) levels.push_back(resolution);
  std::reverse(levels.begin(), levels.end());

  DirectorField n;
  for (size_t li = 0; li < levels.size(); ++li) {
    auto grid = make_grid(domain, levels[li]);
    if (li == 0) {
      n = lifted_boundary_init(grid, planar_boundary, escape_down);
    } else {
      DirectorField up = prolong_director(n, grid);
      for (size_t b = 0; b < grid->band.size(); ++b) {
        auto nb = planar_boundary(grid->band_bx[b], grid->band_by[b]);
        int f = grid->band[b];
        double m = std::hypot(nb[0], nb[1]);
        up.at(0, f) = nb[0] / m;
        up.at(1, f) = nb[1] / m;
        up.at(2, f) = 0.0;
      }
      up.freeze_boundary();
      n = std::move(up);
    }
    FlowConfig level_cfg = cfg;
    if (li + 1 < levels.size()) {
      // intermediate levels only need to hand a smooth field upward
      level_cfg.energy_tol = std::max(cfg.energy_tol, 1e-9);
      level_cfg.max_sweeps = std::min<long>(cfg.max_sweeps, 20000);
      level_cfg.checkpoint = nullptr;
    }
    SolveReport rep = harmonic_map_flow(n, level_cfg);
    if (li + 1 == levels.size() && report) *report = rep;
  }
  return n;
}

}  // namespace nlc
