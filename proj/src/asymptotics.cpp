#include "nlc/asymptotics.hpp"

#include <cmath>
#include <string>

#include "nlc/energy.hpp"

namespace nlc {

Decomposition decompose(const QField& q, const DirectorField& n0, const MaterialParams& p) {
  require(q.grid == n0.grid, ErrCode::invalid_argument, "decompose: grids differ");
  const DomainGrid& g = *q.grid;
  const size_t N = g.nodes();
  Decomposition d;
  d.n_eps = DirectorField(q.grid);
  d.rho_eps.assign(3 * N, 0.0);
  d.f45_residual.assign(N, 0.0);
  d.eigen_gap.assign(N, 0.0);
  const double e2 = p.eps * p.eps;

  for (size_t fl = 0; fl < N; ++fl) {
    if (!g.is_active(int(fl))) continue;
    QVec qv{{q.at(0, fl), q.at(1, fl), q.at(2, fl), q.at(3, fl), q.at(4, fl)}};
    EigenSystem es = eigendecompose(qv);
    double gap = es.eigenvalues[0] - es.eigenvalues[1];
    d.eigen_gap[fl] = gap;
    require(gap > 1e-6, ErrCode::degenerate_spectrum,
            "decompose: principal gap below 1e-6 at node " + std::to_string(fl));
    Vec3 ref{n0.at(0, fl), n0.at(1, fl), n0.at(2, fl)};
    Vec3 ne = es.eigenvectors[0];
    double al = dot(ne, ref);
    require(std::abs(al) >= 1e-8, ErrCode::orthogonal_reference,
            "decompose: reference director orthogonal at node " + std::to_string(fl));
    if (al < 0) ne = -ne;
    d.n_eps.at(0, fl) = ne.x;
    d.n_eps.at(1, fl) = ne.y;
    d.n_eps.at(2, fl) = ne.z;

    QVec qn = uniaxial_from_director(normalized(ne), p.s_plus);
    QVec diff = qv - qn;
    Mat3 r = rotation_to(ne);
    QVec rot = q_from_matrix(matmul(transpose(r), matmul(q_to_matrix(diff), r)));
    d.rho_eps[fl] = rot[0] / e2;
    d.rho_eps[N + fl] = rot[1] / e2;
    d.rho_eps[2 * N + fl] = rot[2] / e2;
    double qnorm = std::max(1e-300, qv.norm());
    double f45 = std::hypot(rot[3], rot[4]) / qnorm;
    d.f45_residual[fl] = f45;
    d.max_f45 = std::max(d.max_f45, f45);

    // reconstruction: rebuild Q from (n_eps, rho_eps) and compare
    Vec3 rho{rot[0], rot[1], rot[2]};
    Mat3 perp = matmul(r, matmul(q_to_matrix(v_rho(rho)), transpose(r)));
    QVec rebuilt = qn + q_from_matrix(perp);
    d.max_reconstruction = std::max(d.max_reconstruction, (rebuilt - qv).norm() / qnorm);
  }
  d.n_eps.freeze_boundary();
  return d;
}

double director_drift(const DirectorField& n_eps, const DirectorField& n0) {
  require(n_eps.grid == n0.grid, ErrCode::invalid_argument, "director_drift: grids differ");
  const DomainGrid& g = *n_eps.grid;
  double s = integrate_interior_extended(g, [&](int fl) {
    double acc = 0;
    for (int c = 0; c < 3; ++c) {
      double gx1, gy1, gx2, gy2;
      gradient_at(g, n_eps.plane(c), fl, gx1, gy1);
      gradient_at(g, n0.plane(c), fl, gx2, gy2);
      acc += (gx1 - gx2) * (gx1 - gx2) + (gy1 - gy2) * (gy1 - gy2);
    }
    return acc;
  });
  return std::sqrt(std::max(0.0, s));
}

ScalingFit fit_scaling(const std::vector<double>& eps, const std::vector<double>& values) {
  require(eps.size() >= 3 && eps.size() == values.size(), ErrCode::bad_fit,
          "fit_scaling: need at least 3 samples");
  for (size_t i = 1; i < eps.size(); ++i)
    require(eps[i] < eps[i - 1], ErrCode::bad_fit, "fit_scaling: eps must decrease strictly");
  ScalingFit f;
  f.eps = eps;
  f.values = values;
  double floor = 1e-14;
  int npos = 0, nneg = 0;
  for (double v : values) {
    if (v > 0) ++npos;
    if (v < 0) ++nneg;
  }
  for (double v : values)
    if (std::abs(v) <= floor) {
      f.below_floor = true;
      return f;
    }
  const size_t n = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double x = std::log(eps[i]), y = std::log(std::abs(values[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  f.exponent = (n * sxy - sx * sy) / denom;
  double intercept = (sy - f.exponent * sx) / n;
  f.coefficient = std::exp(intercept) * (nneg > npos ? -1.0 : 1.0);
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    double pred = intercept + f.exponent * std::log(eps[i]);
    double r = std::log(std::abs(values[i])) - pred;
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

ExpansionFit expansion_fit(const std::vector<double>& eps, const std::vector<double>& energies,
                           double e0_ref, double h0_reference) {
  require(eps.size() >= 3 && eps.size() == energies.size(), ErrCode::bad_fit,
          "expansion_fit: need at least 3 epsilon samples");
  std::vector<double> diff(eps.size());
  for (size_t i = 0; i < eps.size(); ++i) diff[i] = energies[i] - e0_ref;
  ExpansionFit out;
  out.loglog = fit_scaling(eps, diff);
  require(out.loglog.below_floor || out.loglog.residual <= 0.1, ErrCode::bad_fit,
          "expansion_fit: log-log residual exceeds 0.1");
  // least squares of y = (E - E0)/eps^2 against (1, eps): the constant term is
  // the first-order correction, the slope absorbs the next order
  const size_t n = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double x = eps[i], y = diff[i] / (eps[i] * eps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  out.slope = (n * sxy - sx * sy) / denom;
  out.constant = (sy - out.slope * sx) / n;
  out.h0_reference = h0_reference;
  return out;
}

ScalingFit biaxiality_scaling(const std::vector<double>& eps, const std::vector<double>& max_gaps) {
  return fit_scaling(eps, max_gaps);
}

}  // namespace nlc
