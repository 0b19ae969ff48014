#include "nlc/energy.hpp"

#include <cmath>

#include "nlc/asymptotics.hpp"
#include "nlc/conformal.hpp"

namespace nlc {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt6 = 2.449489742783178;

// grad n (x) grad n in the frame rotated by R_n^t: returns (m00, m11, m01)
// of the upper 2x2 block (the e3 row/column vanish since M n = 0).
struct FrameM {
  double m00, m11, m01, trace;
};

FrameM rotated_gradient_square(const DomainGrid& g, const DirectorField& n, int fl) {
  Vec3 dx, dy;
  for (int c = 0; c < 3; ++c) gradient_at(g, n.plane(c), fl, dx[c], dy[c]);
  Vec3 nn{n.at(0, fl), n.at(1, fl), n.at(2, fl)};
  Mat3 r = rotation_to(nn);
  Vec3 p{r(0, 0), r(1, 0), r(2, 0)};  // R e1
  Vec3 q{r(0, 1), r(1, 1), r(2, 1)};  // R e2
  FrameM m;
  const double dxp = dot(dx, p), dyp = dot(dy, p);
  const double dxq = dot(dx, q), dyq = dot(dy, q);
  m.m00 = dxp * dxp + dyp * dyp;
  m.m11 = dxq * dxq + dyq * dyq;
  m.m01 = dxp * dxq + dyp * dyq;
  m.trace = dot(dx, dx) + dot(dy, dy);  // |grad n|^2
  return m;
}

double grad_norm2(const DomainGrid& g, const double* plane, int fl) {
  double gx, gy;
  gradient_at(g, plane, fl, gx, gy);
  return gx * gx + gy * gy;
}

template <int K>
double grad_norm2_all(const NodeField<K>& f, int fl) {
  double s = 0;
  for (int c = 0; c < K; ++c) s += grad_norm2(*f.grid, f.plane(c), fl);
  return s;
}

QVec q_at(const QField& q, int fl) {
  return QVec{{q.at(0, fl), q.at(1, fl), q.at(2, fl), q.at(3, fl), q.at(4, fl)}};
}

}  // namespace

double oseen_frank_energy(const DirectorField& n, const MaterialParams& p) {
  const DomainGrid& g = *n.grid;
  return p.s_plus * p.s_plus *
         integrate_interior_extended(g, [&](int fl) { return grad_norm2_all(n, fl); });
}

EnergyBreakdown ldg_energy(const QField& q, const MaterialParams& p, double e0_ref) {
  const DomainGrid& g = *q.grid;
  EnergyBreakdown e;
  e.elastic = 0.5 * integrate_interior_extended(g, [&](int fl) { return grad_norm2_all(q, fl); });
  std::vector<double> fb(g.nodes(), 0.0);
  for (size_t fl = 0; fl < g.nodes(); ++fl)
    if (g.is_active(int(fl))) fb[fl] = bulk_potential(q_at(q, int(fl)), p);
  e.bulk = integrate(g, fb) / (p.eps * p.eps);
  e.total = e.elastic + e.bulk;
  e.e0_ref = e0_ref;
  e.renormalized = (e.total - e0_ref) / (p.eps * p.eps);
  return e;
}

namespace {

template <int K>
double edge_energy(const NodeField<K>& f) {
  const DomainGrid& g = *f.grid;
  std::vector<double> terms;
  terms.reserve(g.interior.size() + g.band.size());
  for (size_t fl = 0; fl < g.nodes(); ++fl) {
    if (!g.is_active(int(fl))) continue;
    double t = 0;
    for (int off : {+1, g.nx}) {
      size_t j = fl + off;
      if (!g.is_active(int(j))) continue;
      for (int c = 0; c < K; ++c) {
        double d = f.at(c, int(j)) - f.at(c, int(fl));
        t += d * d;
      }
    }
    terms.push_back(t);
  }
  return 0.5 * pairwise_sum(terms);
}

}  // namespace

double ldg_energy_discrete(const QField& q, const MaterialParams& p) {
  const DomainGrid& g = *q.grid;
  std::vector<double> terms;
  terms.reserve(g.interior.size() + g.band.size());
  const double cell = g.h * g.h / (p.eps * p.eps);
  for (size_t fl = 0; fl < g.nodes(); ++fl) {
    if (!g.is_active(int(fl))) continue;
    terms.push_back(cell * bulk_potential(q_at(q, int(fl)), p));
  }
  return edge_energy(q) + pairwise_sum(terms);
}

double dirichlet_energy_discrete(const DirectorField& n) { return edge_energy(n); }

std::vector<double> b_field(const DirectorField& n, const MaterialParams& p) {
  const DomainGrid& g = *n.grid;
  std::vector<double> b(3 * g.nodes(), 0.0);
  for (int fl : g.interior) {
    FrameM m = rotated_gradient_square(g, n, fl);
    b[fl] = -kSqrt2 * p.s_plus * (m.m00 - m.m11);           // -2 s+ M~ : F1
    b[g.nodes() + fl] = -2.0 * kSqrt2 * p.s_plus * m.m01;   // -2 s+ M~ : F2
    b[2 * g.nodes() + fl] = kSqrt6 * p.s_plus * m.trace;    // sqrt(6) s+ |grad n|^2
  }
  return b;
}

std::vector<double> rho_star(const DirectorField& n, const MaterialParams& p) {
  require(p.mu > 0, ErrCode::singular_b0,
          "rho_star: B0 is singular at b^2 = 0; use the b0_* pipeline");
  const DomainGrid& g = *n.grid;
  std::vector<double> rho = b_field(n, p);
  for (size_t fl = 0; fl < g.nodes(); ++fl) {
    rho[fl] /= -p.mu;
    rho[g.nodes() + fl] /= -p.mu;
    rho[2 * g.nodes() + fl] /= -p.nu;
  }
  return rho;
}

double h0_energy(const DirectorField& n, const MaterialParams& p, const std::vector<double>& rho) {
  require(p.mu > 0, ErrCode::singular_b0, "h0_energy: mu = 0");
  const DomainGrid& g = *n.grid;
  std::vector<double> b = b_field(n, p);
  const size_t N = g.nodes();
  return integrate_interior_extended(g, [&](int fl) {
    double r1 = rho[fl], r2 = rho[N + fl], r3 = rho[2 * N + fl];
    double quad = 0.5 * (p.mu * r1 * r1 + p.mu * r2 * r2 + p.nu * r3 * r3);
    double lin = b[fl] * r1 + b[N + fl] * r2 + b[2 * N + fl] * r3;
    return quad + lin;
  });
}

double h0_closed_form(const DirectorField& n, const MaterialParams& p) {
  require(p.mu > 0, ErrCode::singular_b0, "h0_closed_form: mu = 0");
  const DomainGrid& g = *n.grid;
  const double sp2 = p.s_plus * p.s_plus;
  // -s+^2 int (2/mu)|grad n (x) grad n|^2 + (3/nu - 1/mu)|grad n|^4, written
  // in the rotated in-plane block invariants (2B - t_b^2 = |M|^2... on the
  // block) so that completing the square against b0 is exact nodewise at the
  // discrete level, where M n is only O(h^2) instead of zero.
  return -sp2 * integrate_interior_extended(g, [&](int fl) {
    FrameM m = rotated_gradient_square(g, n, fl);
    double block_frob2 = m.m00 * m.m00 + m.m11 * m.m11 + 2.0 * m.m01 * m.m01;
    double block_tr = m.m00 + m.m11;
    return (1.0 / p.mu) * (2.0 * block_frob2 - block_tr * block_tr) +
           (3.0 / p.nu) * m.trace * m.trace;
  });
}

double w_ldg(const DirectorField& n, const MaterialParams& p) {
  const DomainGrid& g = *n.grid;
  double gmax2 = 0;
  for (int fl : g.interior) gmax2 = std::max(gmax2, grad_norm2_all(n, fl));
  double res = conformality_residual(n).residual;
  require(res <= 10.0 * g.h * g.h * gmax2, ErrCode::not_conformal,
          "w_ldg: field is not conformal; use h0_closed_form instead");
  double quart = integrate_interior_extended(g, [&](int fl) {
    double s = grad_norm2_all(n, fl);
    return s * s;
  });
  return -(3.0 / p.nu) * quart;
}

QField q_from_director(const DirectorField& n, double scale) {
  const DomainGrid& g = *n.grid;
  QField q(n.grid);
  const double s32 = std::sqrt(1.5);
  for (size_t fl = 0; fl < g.nodes(); ++fl) {
    if (!g.is_active(int(fl))) continue;
    double nx = n.at(0, fl), ny = n.at(1, fl), nz = n.at(2, fl);
    q.at(0, fl) = scale * (nx * nx - ny * ny) / kSqrt2;
    q.at(1, fl) = scale * kSqrt2 * nx * ny;
    q.at(2, fl) = scale * s32 * (nz * nz - 1.0 / 3.0);
    q.at(3, fl) = scale * kSqrt2 * nx * nz;
    q.at(4, fl) = scale * kSqrt2 * ny * nz;
  }
  q.freeze_boundary();
  return q;
}

QField corrected_minimizer(const DirectorField& n, const MaterialParams& p) {
  const DomainGrid& g = *n.grid;
  QField q = q_from_director(n, p.s_plus);
  std::vector<double> rho = rho_star(n, p);
  const size_t N = g.nodes();
  const double e2 = p.eps * p.eps;
  for (int fl : g.interior) {
    double blend = g.depth[fl] >= 2 ? 1.0 : 0.5;
    Vec3 nn{n.at(0, fl), n.at(1, fl), n.at(2, fl)};
    Mat3 r = rotation_to(nn);
    Vec3 rh{rho[fl], rho[N + fl], rho[2 * N + fl]};
    Mat3 corr = matmul(r, matmul(q_to_matrix(v_rho(rh)), transpose(r)));
    QVec dq = q_from_matrix(corr);
    for (int c = 0; c < 5; ++c) q.at(c, fl) += e2 * blend * dq[c];
  }
  q.freeze_boundary();
  return q;
}

CorrectionField biax_coefficients(const DirectorField& n, const MaterialParams& p) {
  const DomainGrid& g = *n.grid;
  CorrectionField cf;
  cf.grid = n.grid;
  cf.rho = rho_star(n, p);
  cf.c_coeff.assign(3 * g.nodes(), 0.0);
  cf.c_printed.assign(3 * g.nodes(), 0.0);
  const size_t N = g.nodes();
  const double s32 = std::sqrt(1.5);
  for (int fl : g.interior) {
    cf.c_coeff[fl] = cf.rho[2 * N + fl] * s32 / p.s_plus;  // c0 from rho3
    cf.c_coeff[N + fl] = cf.rho[fl] / kSqrt2;              // c1 from rho1
    cf.c_coeff[2 * N + fl] = cf.rho[N + fl] / kSqrt2;      // c2 from rho2
    FrameM m = rotated_gradient_square(g, n, fl);
    cf.c_printed[fl] = -2.0 * kSqrt6 / p.nu * m.trace;
    cf.c_printed[N + fl] = kSqrt2 * p.s_plus / p.mu * (m.m00 - m.m11);
    cf.c_printed[2 * N + fl] = 2.0 * kSqrt2 * p.s_plus / p.mu * m.m01;
  }
  return cf;
}

HepsDecomposition h_eps_decomposition(const QField& q, const DirectorField& n0,
                                      const MaterialParams& p, double e0_ref) {
  const DomainGrid& g = *q.grid;
  Decomposition deco = decompose(q, n0, p);
  const DirectorField& ne = deco.n_eps;
  const size_t N = g.nodes();
  const double e2 = p.eps * p.eps;
  const BulkExpansion be = bulk_expansion(p);

  HepsDecomposition out;
  double grad_ne = integrate_interior_extended(g, [&](int fl) { return grad_norm2_all(ne, fl); });
  double grad_n0 = integrate_interior_extended(g, [&](int fl) { return grad_norm2_all(n0, fl); });
  out.director_term = p.s_plus * p.s_plus / e2 * (grad_ne - grad_n0);

  std::vector<double> b = b_field(ne, p);
  out.h_eps_term = integrate_interior_extended(g, [&](int fl) {
    Vec3 r{deco.rho_eps[fl], deco.rho_eps[N + fl], deco.rho_eps[2 * N + fl]};
    double quad = 0;
    double rr[3] = {r.x, r.y, r.z};
    for (int i = 0; i < 3; ++i) {
      double bi = be.b0_diag[i] + e2 * r.z * be.b1_diag[i] + e2 * e2 * dot(r, r) * be.b2_diag[i];
      quad += 0.5 * bi * rr[i] * rr[i];
    }
    return quad + b[fl] * r.x + b[N + fl] * r.y + b[2 * N + fl] * r.z;
  });

  // P_perp = (Q - Q[n_eps]) / eps^2 nodewise, then its discrete gradient
  QField qn = q_from_director(ne, p.s_plus);
  QField pperp(q.grid);
  for (size_t fl = 0; fl < N; ++fl) {
    if (!g.is_active(int(fl))) continue;
    for (int c = 0; c < 5; ++c) pperp.at(c, int(fl)) = (q.at(c, int(fl)) - qn.at(c, int(fl))) / e2;
  }
  out.gradient_term =
      0.5 * e2 * integrate_interior_extended(g, [&](int fl) { return grad_norm2_all(pperp, fl); });

  out.g_eps = ldg_energy(q, p, e0_ref).renormalized;
  out.reconstruction_error =
      std::abs(out.g_eps - (out.director_term + out.h_eps_term + out.gradient_term));
  return out;
}

EnergyBreakdown b0_gl_energy(const QField& q, const MaterialParams& p, double e0_ref) {
  require(p.b2 == 0.0, ErrCode::wrong_regime, "b0_gl_energy: requires b^2 = 0");
  const DomainGrid& g = *q.grid;
  EnergyBreakdown e;
  e.elastic = 0.5 * integrate_interior_extended(g, [&](int fl) { return grad_norm2_all(q, fl); });
  const double target = p.a2 / p.c2;
  std::vector<double> fb(g.nodes(), 0.0);
  for (size_t fl = 0; fl < g.nodes(); ++fl) {
    if (!g.is_active(int(fl))) continue;
    double d = q_at(q, int(fl)).norm2() - target;
    fb[fl] = 0.25 * p.c2 * d * d;
  }
  e.bulk = integrate(g, fb) / (p.eps * p.eps);
  e.total = e.elastic + e.bulk;
  e.e0_ref = e0_ref;
  e.renormalized = (e.total - e0_ref) / (p.eps * p.eps);
  return e;
}

double b0_limit_correction(const QField& q0, const MaterialParams& p) {
  require(p.b2 == 0.0, ErrCode::wrong_regime, "b0_limit_correction: requires b^2 = 0");
  const DomainGrid& g = *q0.grid;
  double quart = integrate_interior_extended(g, [&](int fl) {
    double s = grad_norm2_all(q0, fl);
    return s * s;
  });
  return -p.c2 / (4.0 * p.a2 * p.a2) * quart;
}

std::vector<double> b0_rho_prediction(const QField& q0, const MaterialParams& p) {
  require(p.b2 == 0.0, ErrCode::wrong_regime, "b0_rho_prediction: requires b^2 = 0");
  const DomainGrid& g = *q0.grid;
  std::vector<double> rho(g.nodes(), 0.0);
  for (int fl : g.interior) rho[fl] = -grad_norm2_all(q0, fl) / (2.0 * p.a2);
  return rho;
}

}  // namespace nlc
