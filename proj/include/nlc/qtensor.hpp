#pragma once

#include <array>
#include <cmath>

#include "nlc/error.hpp"

namespace nlc {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

/// Dense 3x3 matrix, row-major. Only the handful of operations the Q-tensor
/// algebra needs.
struct Mat3 {
  std::array<double, 9> m{};  // m[3*r + c]

  double& operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat3 identity() {
    Mat3 I;
    I(0, 0) = I(1, 1) = I(2, 2) = 1.0;
    return I;
  }
  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }
  Mat3 operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
    return r;
  }
};

Mat3 matmul(const Mat3& a, const Mat3& b);
Mat3 transpose(const Mat3& a);
Vec3 matvec(const Mat3& a, const Vec3& v);
double frobenius_inner(const Mat3& a, const Mat3& b);
Mat3 outer(const Vec3& a, const Vec3& b);
double det3(const Mat3& a);

/// A Q-tensor in the orthonormal F-basis of the traceless symmetric 3x3
/// matrices: Q = sum_j q[j] F_{j+1}. This is the canonical in-memory
/// representation; 3x3 matrices appear only at interface boundaries, so
/// symmetry and tracelessness cannot drift.
struct QVec {
  std::array<double, 5> q{};

  double& operator[](int i) { return q[i]; }
  double operator[](int i) const { return q[i]; }
  QVec operator+(const QVec& o) const {
    QVec r;
    for (int i = 0; i < 5; ++i) r.q[i] = q[i] + o.q[i];
    return r;
  }
  QVec operator-(const QVec& o) const {
    QVec r;
    for (int i = 0; i < 5; ++i) r.q[i] = q[i] - o.q[i];
    return r;
  }
  QVec operator*(double s) const {
    QVec r;
    for (int i = 0; i < 5; ++i) r.q[i] = q[i] * s;
    return r;
  }
  double dot(const QVec& o) const {
    double s = 0;
    for (int i = 0; i < 5; ++i) s += q[i] * o.q[i];
    return s;
  }
  double norm2() const { return dot(*this); }  // == tr(Q^2) by orthonormality
  double norm() const { return std::sqrt(norm2()); }
};

/// Bulk coefficients (a^2, b^2, c^2) and the elastic scale eps, together with
/// the derived constants used throughout: s_plus, the transverse Hessian
/// eigenvalues (mu, nu), and the bulk minimum f_star.
struct MaterialParams {
  double a2 = 1.0;
  double b2 = 1.0;
  double c2 = 1.0;
  double eps = 0.1;

  // derived, filled by make()
  double s_plus = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double f_star = 0.0;

  static MaterialParams make(double a2, double b2, double c2, double eps);
};

struct EigenSystem {
  std::array<double, 3> eigenvalues{};  // sorted descending
  std::array<Vec3, 3> eigenvectors{};   // orthonormal, matching order
};

/// F-basis element, j in 1..5.
Mat3 basis_tensor(int j);

Mat3 q_to_matrix(const QVec& q);
QVec q_from_matrix(const Mat3& m);

/// The positive root s_+ of 2 c^2 s^2 - b^2 s - 3 a^2 = 0.
double s_plus(double a2, double b2, double c2);

/// Shifted bulk potential f_bulk(Q) - f_star >= 0, vanishing exactly on the
/// limit manifold of prolate uniaxial tensors with scalar order s_plus.
double bulk_potential(const QVec& q, const MaterialParams& p);

/// Traceless-symmetric gradient of bulk_potential in F-coordinates.
QVec bulk_gradient(const QVec& q, const MaterialParams& p);

/// Closed-form (trigonometric) symmetric eigensolver with one Newton polish
/// step per eigenvalue. Deterministic tie-breaking for degenerate spectra:
/// Gram-Schmidt against (e3, e1, e2) in that order.
EigenSystem eigendecompose(const QVec& q);

/// Principal eigenvector with the sign fixed by a positive inner product with
/// `reference`. Throws degenerate_spectrum / orthogonal_reference.
Vec3 principal_eigenvector(const QVec& q, const Vec3& reference);

/// |lambda_2 - lambda_3| of the two subprincipal eigenvalues.
double biaxiality_gap(const QVec& q);

/// Rotation with R e3 = n, axis orthogonal to e3, angle in [0, pi).
/// Throws antipodal_singularity when 1 + n.e3 < 1e-8.
Mat3 rotation_to(const Vec3& n);

/// scale * (n (x) n - I/3) in F-coordinates; requires |n| = 1 to 1e-10.
QVec uniaxial_from_director(const Vec3& n, double scale);

/// Transverse perturbation V_rho = rho_1 F1 + rho_2 F2 + rho_3 F3.
QVec v_rho(const Vec3& rho);

/// Diagonals of the quadratic/cubic/quartic coefficient matrices of the exact
/// bulk expansion  f~(V_+ + u1 F1 + u2 F2 + u3 F3) =
///   1/2 B0 u.u + 1/2 u3 (B1 u.u) + 1/2 |u|^2 (B2 u.u),
/// all diagonal in the (F1,F2,F3) coordinates.
struct BulkExpansion {
  double mu = 0, nu = 0;
  Vec3 b0_diag;         // (mu, mu, nu)
  Vec3 b1_diag;         // sqrt(8/3) s+ c^2 (1,1,1) + sqrt(2/3) b^2 (1,1,-1/3)
  Vec3 b1_diag_printed; // variant with +1/3 in the last slot, kept as a diagnostic
  Vec3 b2_diag;         // (c^2/2) (1,1,1)
};
BulkExpansion bulk_expansion(const MaterialParams& p);

}  // namespace nlc
