#include "nlc/qtensor.hpp"

#include <algorithm>
#include <cmath>

namespace nlc {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt6 = 2.449489742783178;
constexpr double kSqrt32 = 1.224744871391589;  // sqrt(3/2)
}  // namespace

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat3 transpose(const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

Vec3 matvec(const Mat3& a, const Vec3& v) {
  return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
          a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
          a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
}

double frobenius_inner(const Mat3& a, const Mat3& b) {
  double s = 0;
  for (int i = 0; i < 9; ++i) s += a.m[i] * b.m[i];
  return s;
}

Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

double det3(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Mat3 basis_tensor(int j) {
  require(j >= 1 && j <= 5, ErrCode::index_out_of_range, "basis_tensor: j must be in 1..5");
  Mat3 f;
  switch (j) {
    case 1:
      f(0, 0) = 1.0 / kSqrt2;
      f(1, 1) = -1.0 / kSqrt2;
      break;
    case 2:
      f(0, 1) = f(1, 0) = 1.0 / kSqrt2;
      break;
    case 3:
      f(0, 0) = f(1, 1) = -kSqrt32 / 3.0;
      f(2, 2) = 2.0 * kSqrt32 / 3.0;
      break;
    case 4:
      f(0, 2) = f(2, 0) = 1.0 / kSqrt2;
      break;
    case 5:
      f(1, 2) = f(2, 1) = 1.0 / kSqrt2;
      break;
  }
  return f;
}

Mat3 q_to_matrix(const QVec& q) {
  Mat3 m;
  const double d3 = q[2] / kSqrt6;
  m(0, 0) = q[0] / kSqrt2 - d3;
  m(1, 1) = -q[0] / kSqrt2 - d3;
  m(2, 2) = 2.0 * d3;
  m(0, 1) = m(1, 0) = q[1] / kSqrt2;
  m(0, 2) = m(2, 0) = q[3] / kSqrt2;
  m(1, 2) = m(2, 1) = q[4] / kSqrt2;
  return m;
}

QVec q_from_matrix(const Mat3& m) {
  QVec q;
  q[0] = (m(0, 0) - m(1, 1)) / kSqrt2;
  q[1] = (m(0, 1) + m(1, 0)) / kSqrt2;
  q[2] = kSqrt32 * m(2, 2);  // uses tr(m) = 0
  q[3] = (m(0, 2) + m(2, 0)) / kSqrt2;
  q[4] = (m(1, 2) + m(2, 1)) / kSqrt2;
  return q;
}

double s_plus(double a2, double b2, double c2) {
  require(c2 > 0, ErrCode::invalid_argument, "s_plus: c2 must be positive");
  return (b2 + std::sqrt(b2 * b2 + 24.0 * a2 * c2)) / (4.0 * c2);
}

MaterialParams MaterialParams::make(double a2, double b2, double c2, double eps) {
  require(c2 > 0, ErrCode::invalid_argument, "MaterialParams: c2 must be positive");
  require(eps > 0, ErrCode::invalid_argument, "MaterialParams: eps must be positive");
  require(a2 >= 0 && b2 >= 0, ErrCode::invalid_argument, "MaterialParams: a2, b2 must be nonnegative");
  require(a2 + b2 > 0, ErrCode::invalid_argument, "MaterialParams: a2 and b2 cannot both vanish");
  MaterialParams p;
  p.a2 = a2;
  p.b2 = b2;
  p.c2 = c2;
  p.eps = eps;
  p.s_plus = nlc::s_plus(a2, b2, c2);
  p.mu = b2 * p.s_plus;
  p.nu = b2 * p.s_plus / 3.0 + 2.0 * a2;
  const double s = p.s_plus;
  p.f_star = -(a2 / 3.0) * s * s - (2.0 * b2 / 27.0) * s * s * s + (c2 / 9.0) * s * s * s * s;
  return p;
}

// f_bulk = -(a2/2) tr Q^2 - (b2/3) tr Q^3 + (c2/4) (tr Q^2)^2. The cubic term
// carries the sign that makes s_plus(n x n - I/3) the minimum; for traceless
// Q, tr Q^3 = 3 det Q.
double bulk_potential(const QVec& q, const MaterialParams& p) {
  const double t2 = q.norm2();
  const double t3 = 3.0 * det3(q_to_matrix(q));
  return -(p.a2 / 2.0) * t2 - (p.b2 / 3.0) * t3 + (p.c2 / 4.0) * t2 * t2 - p.f_star;
}

QVec bulk_gradient(const QVec& q, const MaterialParams& p) {
  const double t2 = q.norm2();
  const Mat3 m = q_to_matrix(q);
  const Mat3 m2 = matmul(m, m);
  // traceless projection of Q^2 back to F-coordinates; tr(Q^2) = t2
  Mat3 dev = m2;
  for (int i = 0; i < 3; ++i) dev(i, i) -= t2 / 3.0;
  const QVec m2q = q_from_matrix(dev);
  QVec g;
  for (int i = 0; i < 5; ++i) g[i] = (-p.a2 + p.c2 * t2) * q[i] - p.b2 * m2q[i];
  return g;
}

namespace {

// Characteristic polynomial roots of a traceless symmetric matrix via the
// trigonometric form, then one Newton step on p(x) = x^3 - (t2/2) x - det.
void eigenvalues_traceless(double t2, double det, std::array<double, 3>& ev) {
  if (t2 <= 0) {
    ev = {0, 0, 0};
    return;
  }
  const double s = std::sqrt(t2 / 6.0);  // scale so tr(B^2) = 6
  const double db = det / (s * s * s);
  double arg = db / 2.0;
  arg = std::clamp(arg, -1.0, 1.0);
  const double phi = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k) {
    double lam = 2.0 * s * std::cos(phi - 2.0 * M_PI * k / 3.0);
    // Newton polish on the unscaled characteristic polynomial
    const double pl = lam * lam * lam - 0.5 * t2 * lam - det;
    const double dpl = 3.0 * lam * lam - 0.5 * t2;
    if (std::abs(dpl) > 1e-3 * t2) lam -= pl / dpl;
    ev[k] = lam;
  }
  std::sort(ev.begin(), ev.end(), std::greater<double>());
}

// Eigenvector for a simple eigenvalue: largest cross product of two rows of
// (A - lam I).
Vec3 simple_eigenvector(const Mat3& a, double lam) {
  Mat3 b = a;
  for (int i = 0; i < 3; ++i) b(i, i) -= lam;
  Vec3 rows[3] = {{b(0, 0), b(0, 1), b(0, 2)}, {b(1, 0), b(1, 1), b(1, 2)}, {b(2, 0), b(2, 1), b(2, 2)}};
  Vec3 best{};
  double best_n = -1;
  for (int i = 0; i < 3; ++i) {
    Vec3 c = cross(rows[i], rows[(i + 1) % 3]);
    double n2 = dot(c, c);
    if (n2 > best_n) {
      best_n = n2;
      best = c;
    }
  }
  return normalized(best);
}

void fix_sign(Vec3& v) {
  int imax = 0;
  double amax = std::abs(v[0]);
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > amax) {
      amax = std::abs(v[i]);
      imax = i;
    }
  if (v[imax] < 0) v = -v;
}

// First of (e3, e1, e2) with a usable component orthogonal to u, normalized.
Vec3 gram_schmidt_seed(const Vec3& u) {
  const Vec3 seeds[3] = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
  for (const Vec3& s : seeds) {
    Vec3 w = s - u * dot(s, u);
    if (dot(w, w) > 1e-8) return normalized(w);
  }
  return {1, 0, 0};  // unreachable for unit u
}

}  // namespace

EigenSystem eigendecompose(const QVec& q) {
  EigenSystem es;
  const double t2 = q.norm2();
  const Mat3 a = q_to_matrix(q);
  eigenvalues_traceless(t2, det3(a), es.eigenvalues);

  const double scale = std::max(1.0, std::sqrt(t2));
  const double tie = 1e-10 * scale;
  const auto& ev = es.eigenvalues;

  if (ev[0] - ev[2] < tie) {
    // isotropic: fixed frame in tie-break order
    es.eigenvectors = {Vec3{0, 0, 1}, Vec3{1, 0, 0}, Vec3{0, 1, 0}};
    return es;
  }
  if (ev[0] - ev[1] < tie) {  // top pair degenerate
    Vec3 v2 = simple_eigenvector(a, ev[2]);
    fix_sign(v2);
    Vec3 u = gram_schmidt_seed(v2);
    es.eigenvectors[0] = u;
    es.eigenvectors[1] = cross(v2, u);
    es.eigenvectors[2] = v2;
    return es;
  }
  if (ev[1] - ev[2] < tie) {  // bottom pair degenerate (uniaxial prolate)
    Vec3 v0 = simple_eigenvector(a, ev[0]);
    fix_sign(v0);
    Vec3 u = gram_schmidt_seed(v0);
    es.eigenvectors[0] = v0;
    es.eigenvectors[1] = u;
    es.eigenvectors[2] = cross(v0, u);
    return es;
  }

  Vec3 v0 = simple_eigenvector(a, ev[0]);
  Vec3 v2 = simple_eigenvector(a, ev[2]);
  // re-orthogonalize the less accurate middle direction exactly
  v2 = normalized(v2 - v0 * dot(v0, v2));
  Vec3 v1 = cross(v2, v0);
  fix_sign(v0);
  fix_sign(v1);
  fix_sign(v2);
  // cross products above guarantee orthonormality; recompute v1 after sign fixes
  v1 = cross(v2, v0);
  fix_sign(v1);
  es.eigenvectors = {v0, v1, v2};
  return es;
}

Vec3 principal_eigenvector(const QVec& q, const Vec3& reference) {
  EigenSystem es = eigendecompose(q);
  const double scale = std::max(1.0, q.norm());
  require(es.eigenvalues[0] - es.eigenvalues[1] >= 1e-10 * scale, ErrCode::degenerate_spectrum,
          "principal_eigenvector: top eigenvalue gap below tolerance");
  Vec3 v = es.eigenvectors[0];
  const double al = dot(v, reference);
  require(std::abs(al) >= 1e-8, ErrCode::orthogonal_reference,
          "principal_eigenvector: reference nearly orthogonal to eigenvector");
  return al > 0 ? v : -v;
}

double biaxiality_gap(const QVec& q) {
  EigenSystem es = eigendecompose(q);
  return es.eigenvalues[1] - es.eigenvalues[2];
}

Mat3 rotation_to(const Vec3& n) {
  const double c = 1.0 + n.z;  // 1 + n.e3
  require(c >= 1e-8, ErrCode::antipodal_singularity, "rotation_to: n too close to -e3");
  const Vec3 w = cross({0, 0, 1}, n);  // e3 x n
  Mat3 wx;
  wx(0, 1) = -w.z;
  wx(0, 2) = w.y;
  wx(1, 0) = w.z;
  wx(1, 2) = -w.x;
  wx(2, 0) = -w.y;
  wx(2, 1) = w.x;
  Mat3 r = Mat3::identity() + wx + matmul(wx, wx) * (1.0 / c);
  return r;
}

QVec uniaxial_from_director(const Vec3& n, double scale) {
  require(std::abs(norm(n) - 1.0) <= 1e-10, ErrCode::not_unit, "uniaxial_from_director: |n| != 1");
  // Q = scale (n x n - I/3) written directly in F-coordinates.
  QVec q;
  q[0] = scale * (n.x * n.x - n.y * n.y) / kSqrt2;
  q[1] = scale * kSqrt2 * n.x * n.y;
  q[2] = scale * kSqrt32 * (n.z * n.z - 1.0 / 3.0);
  q[3] = scale * kSqrt2 * n.x * n.z;
  q[4] = scale * kSqrt2 * n.y * n.z;
  return q;
}

QVec v_rho(const Vec3& rho) {
  QVec q;
  q[0] = rho.x;
  q[1] = rho.y;
  q[2] = rho.z;
  return q;
}

BulkExpansion bulk_expansion(const MaterialParams& p) {
  BulkExpansion e;
  e.mu = p.mu;
  e.nu = p.nu;
  e.b0_diag = {p.mu, p.mu, p.nu};
  const double c1 = std::sqrt(8.0 / 3.0) * p.s_plus * p.c2;
  const double c2 = std::sqrt(2.0 / 3.0) * p.b2;
  e.b1_diag = {c1 + c2, c1 + c2, c1 - c2 / 3.0};
  e.b1_diag_printed = {c1 + c2, c1 + c2, c1 + c2 / 3.0};
  e.b2_diag = {p.c2 / 2.0, p.c2 / 2.0, p.c2 / 2.0};
  return e;
}

}  // namespace nlc
