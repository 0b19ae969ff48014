#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nlc/qtensor.hpp"

using namespace nlc;

namespace {

std::mt19937 rng(20240817u);

double urand(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

Vec3 random_unit() {
  while (true) {
    Vec3 v{urand(-1, 1), urand(-1, 1), urand(-1, 1)};
    double n = norm(v);
    if (n > 0.1 && n < 1.0) return v * (1.0 / n);
  }
}

Mat3 rot_z(double a) {
  Mat3 r = Mat3::identity();
  r(0, 0) = std::cos(a);
  r(0, 1) = -std::sin(a);
  r(1, 0) = std::sin(a);
  r(1, 1) = std::cos(a);
  return r;
}

Mat3 random_rotation() {
  Vec3 n = random_unit();
  if (1.0 + n.z < 1e-6) n = -n;
  return matmul(rotation_to(n), rot_z(urand(0, 2 * M_PI)));
}

QVec random_q(double amp = 1.0) {
  QVec q;
  for (int i = 0; i < 5; ++i) q[i] = urand(-amp, amp);
  return q;
}

QVec rotate_q(const QVec& q, const Mat3& r) {
  return q_from_matrix(matmul(r, matmul(q_to_matrix(q), transpose(r))));
}

}  // namespace

TEST_CASE("basis tensors match their defining matrices") {
  Mat3 f3 = basis_tensor(3);
  CHECK(f3(0, 0) == doctest::Approx(-1.0 / std::sqrt(6.0)).epsilon(1e-15));
  CHECK(f3(1, 1) == doctest::Approx(-1.0 / std::sqrt(6.0)).epsilon(1e-15));
  CHECK(f3(2, 2) == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-15));
  Mat3 f1 = basis_tensor(1);
  CHECK(f1(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(f1(1, 1) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(f1(0, 1) == 0.0);

  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) {
      double ip = frobenius_inner(basis_tensor(i), basis_tensor(j));
      CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    }
  CHECK_THROWS_AS(basis_tensor(0), Error);
  CHECK_THROWS_AS(basis_tensor(6), Error);
}

TEST_CASE("matrix round trip and tracelessness") {
  for (int t = 0; t < 50; ++t) {
    QVec q = random_q();
    Mat3 m = q_to_matrix(q);
    CHECK(std::abs(m(0, 0) + m(1, 1) + m(2, 2)) < 1e-14);
    QVec back = q_from_matrix(m);
    for (int i = 0; i < 5; ++i) CHECK(back[i] == doctest::Approx(q[i]).epsilon(1e-14));
    CHECK(q.norm2() == doctest::Approx(frobenius_inner(m, m)).epsilon(1e-13));
  }
}

TEST_CASE("s_plus closed form") {
  CHECK(s_plus(1, 1, 1) == doctest::Approx(1.5).epsilon(1e-15));
  double s0 = s_plus(1, 0, 1);
  CHECK(s0 == doctest::Approx(std::sqrt(6.0) / 2.0).epsilon(1e-15));
  CHECK(2.0 / 3.0 * s0 * s0 == doctest::Approx(1.0).epsilon(1e-14));  // (2/3)s+^2 = a2/c2
  CHECK(s_plus(0, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  // defining root: 4 c2 s^2 = b2 s + ... i.e. 2 c2 s^2 - b2 s - 3 a2 = 0
  for (int t = 0; t < 20; ++t) {
    double a2 = urand(0, 4), b2 = urand(0, 4), c2 = urand(0.2, 4);
    double s = s_plus(a2, b2, c2);
    CHECK(2 * c2 * s * s - b2 * s - 3 * a2 == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("bulk potential values") {
  auto p = MaterialParams::make(1, 1, 1, 0.1);
  CHECK(p.s_plus == doctest::Approx(1.5));
  CHECK(p.mu == doctest::Approx(1.5));
  CHECK(p.nu == doctest::Approx(2.5));

  // isotropic state: f~(0) = -f_star = a2 s^2/3 + 2 b2 s^3/27 - c2 s^4/9
  CHECK(bulk_potential(QVec{}, p) == doctest::Approx(0.4375).epsilon(1e-14));

  // vanishes on the limit manifold
  for (int t = 0; t < 30; ++t) {
    Vec3 n = random_unit();
    QVec q = uniaxial_from_director(n, p.s_plus);
    CHECK(std::abs(bulk_potential(q, p)) < 1e-12);
  }
}

TEST_CASE("bulk potential nonnegative, zero only at prolate uniaxial s_plus") {
  auto p = MaterialParams::make(1.3, 0.7, 2.0, 0.1);
  for (int t = 0; t < 2000; ++t) {
    QVec q = random_q(2.0);
    double f = bulk_potential(q, p);
    CHECK(f >= -1e-12 * std::max(1.0, q.norm2() * q.norm2()));
    if (f < 1e-8) {
      EigenSystem es = eigendecompose(q);
      CHECK(es.eigenvalues[0] == doctest::Approx(2.0 * p.s_plus / 3.0).epsilon(1e-2));
      CHECK(biaxiality_gap(q) < 1e-2);
    }
  }
}

TEST_CASE("bulk potential is rotation invariant") {
  auto p = MaterialParams::make(0.8, 1.7, 1.1, 0.1);
  for (int t = 0; t < 200; ++t) {
    QVec q = random_q();
    Mat3 r = random_rotation();
    double f1 = bulk_potential(q, p);
    double f2 = bulk_potential(rotate_q(q, r), p);
    CHECK(std::abs(f1 - f2) < 1e-12 * std::max(1.0, std::abs(f1)));
  }
}

// Exact algebraic identity behind the second-variation matrices: rotating
// V_+ + eps^2 V_rho anywhere on the orbit, the shifted bulk equals
// (eps^4/2) B_eps rho.rho with B_eps = B0 + eps^2 rho_3 B1 + eps^4 |rho|^2 B2.
// The identity holds for all eps; the sample box keeps the floating-point
// cancellation in f~ below the 1e-10 relative gate.
TEST_CASE("bulk quadratic form identity") {
  auto p = MaterialParams::make(1, 1, 1, 0.1);
  auto pb = MaterialParams::make(1.2, 0.6, 0.9, 0.1);
  for (const auto& par : {p, pb}) {
    BulkExpansion be = bulk_expansion(par);
    const QVec vplus = uniaxial_from_director({0, 0, 1}, par.s_plus);
    double worst = 0;
    for (int t = 0; t < 10000; ++t) {
      Vec3 rho{urand(-1.5, 1.5), urand(-1.5, 1.5), urand(-1.5, 1.5)};
      if (norm(rho) < 0.3) continue;
      double eps = urand(0.25, 1.25);
      Mat3 r = random_rotation();
      QVec q = vplus + v_rho(rho) * (eps * eps);
      double lhs = bulk_potential(rotate_q(q, r), par);
      double rr[3] = {rho.x, rho.y, rho.z};
      double rhs = 0;
      for (int i = 0; i < 3; ++i) {
        double bi = be.b0_diag[i] + eps * eps * rho.z * be.b1_diag[i] +
                    eps * eps * eps * eps * dot(rho, rho) * be.b2_diag[i];
        rhs += bi * rr[i] * rr[i];
      }
      rhs *= 0.5 * eps * eps * eps * eps;
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1e-30, std::abs(rhs)));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("bulk gradient stationary on limit manifold and at origin") {
  auto p = MaterialParams::make(1, 1, 1, 0.1);
  for (int t = 0; t < 20; ++t) {
    QVec q = uniaxial_from_director(random_unit(), p.s_plus);
    QVec g = bulk_gradient(q, p);
    CHECK(g.norm() < 1e-12);
  }
  CHECK(bulk_gradient(QVec{}, p).norm() == 0.0);
}

TEST_CASE("bulk gradient matches central finite differences") {
  auto p = MaterialParams::make(0.9, 1.4, 1.2, 0.1);
  const double step = 1e-6;
  for (int t = 0; t < 100; ++t) {
    QVec q = random_q(1.5);
    QVec g = bulk_gradient(q, p);
    for (int i = 0; i < 5; ++i) {
      QVec qp = q, qm = q;
      qp[i] += step;
      qm[i] -= step;
      double fd = (bulk_potential(qp, p) - bulk_potential(qm, p)) / (2 * step);
      CHECK(std::abs(g[i] - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("eigendecompose on closed-form cases") {
  double sp = 1.5;
  QVec q = uniaxial_from_director({0, 0, 1}, sp);
  EigenSystem es = eigendecompose(q);
  CHECK(es.eigenvalues[0] == doctest::Approx(2 * sp / 3).epsilon(1e-13));
  CHECK(es.eigenvalues[1] == doctest::Approx(-sp / 3).epsilon(1e-13));
  CHECK(es.eigenvalues[2] == doctest::Approx(-sp / 3).epsilon(1e-13));
  CHECK(std::abs(std::abs(es.eigenvectors[0].z) - 1.0) < 1e-12);

  QVec f1;
  f1[0] = 1.0;
  EigenSystem e1 = eigendecompose(f1);
  CHECK(e1.eigenvalues[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(e1.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(e1.eigenvalues[2] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("eigendecompose reconstruction and trace on random input") {
  for (int t = 0; t < 500; ++t) {
    QVec q = random_q(2.0);
    EigenSystem es = eigendecompose(q);
    CHECK(std::abs(es.eigenvalues[0] + es.eigenvalues[1] + es.eigenvalues[2]) <
          1e-12 * std::max(1.0, q.norm()));
    Mat3 rec{};
    for (int k = 0; k < 3; ++k)
      rec = rec + outer(es.eigenvectors[k], es.eigenvectors[k]) * es.eigenvalues[k];
    Mat3 diff = rec - q_to_matrix(q);
    CHECK(std::sqrt(frobenius_inner(diff, diff)) < 1e-12 * std::max(1.0, q.norm()));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(dot(es.eigenvectors[i], es.eigenvectors[j]) - (i == j ? 1 : 0)) < 1e-12);
  }
}

TEST_CASE("principal eigenvector sign alignment and perturbation") {
  double sp = 1.5;
  Vec3 n = normalized({0.3, -0.4, 0.85});
  QVec q = uniaxial_from_director(n, sp);
  Vec3 v = principal_eigenvector(q, n);
  CHECK(norm(v - n) < 1e-12);
  Vec3 vm = principal_eigenvector(q, -n);
  CHECK(norm(vm + n) < 1e-12);

  // small biaxial perturbation along p x p - q x q barely moves the axis
  Mat3 r = rotation_to(n);
  Vec3 p = matvec(r, {1, 0, 0}), qq = matvec(r, {0, 1, 0});
  Mat3 pert = (outer(p, p) - outer(qq, qq)) * 1e-3;
  QVec qp = q + q_from_matrix(pert);
  Vec3 vp = principal_eigenvector(qp, n);
  CHECK(norm(vp - n) < 1e-2);

  CHECK_THROWS_AS(principal_eigenvector(QVec{}, n), Error);           // degenerate
  Vec3 ortho = normalized(cross(n, Vec3{0, 0, 1}));
  CHECK_THROWS_AS(principal_eigenvector(q, ortho), Error);            // orthogonal reference
}

TEST_CASE("biaxiality gap") {
  double sp = 1.5;
  Vec3 n = random_unit();
  if (1 + n.z < 1e-3) n = -n;
  CHECK(biaxiality_gap(uniaxial_from_director(n, sp)) < 1e-13);

  Mat3 r = rotation_to(n);
  Vec3 p = matvec(r, {1, 0, 0}), qv = matvec(r, {0, 1, 0});
  for (double delta : {1e-4, 1e-3, 1e-2}) {
    QVec q = uniaxial_from_director(n, sp) + q_from_matrix((outer(p, p) - outer(qv, qv)) * delta);
    CHECK(biaxiality_gap(q) == doctest::Approx(2 * delta).epsilon(1e-6));
  }

  QVec f1;
  f1[0] = 1.0;
  CHECK(biaxiality_gap(f1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("rotation_to") {
  Mat3 r = rotation_to({0, 0, 1});
  Mat3 diff = r - Mat3::identity();
  CHECK(std::sqrt(frobenius_inner(diff, diff)) < 1e-15);

  Mat3 re1 = rotation_to({1, 0, 0});
  Vec3 im = matvec(re1, {0, 0, 1});
  CHECK(norm(im - Vec3{1, 0, 0}) < 1e-14);  // e3 -> e1
  CHECK(norm(matvec(re1, Vec3{0, 1, 0}) - Vec3{0, 1, 0}) < 1e-14);
  CHECK(norm(matvec(re1, Vec3{1, 0, 0}) - Vec3{0, 0, -1}) < 1e-14);  // e1 -> -e3

  for (int t = 0; t < 100; ++t) {
    Vec3 n = random_unit();
    if (1 + n.z < 1e-6) continue;
    Mat3 rr = rotation_to(n);
    CHECK(norm(matvec(rr, Vec3{0, 0, 1}) - n) < 1e-12);
    Mat3 gram = matmul(transpose(rr), rr) - Mat3::identity();
    CHECK(std::sqrt(frobenius_inner(gram, gram)) < 1e-12);
    CHECK(det3(rr) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rotation_to(Vec3{0, 0, -1}), Error);
}

TEST_CASE("uniaxial_from_director coordinates") {
  double sp = 1.5;
  QVec q = uniaxial_from_director({0, 0, 1}, sp);
  CHECK(q[2] == doctest::Approx(std::sqrt(2.0 / 3.0) * sp).epsilon(1e-15));
  for (int i : {0, 1, 3, 4}) CHECK(q[i] == 0.0);
  CHECK(q.norm2() == doctest::Approx(2.0 / 3.0 * sp * sp).epsilon(1e-14));

  for (double phi : {0.3, 1.1, 2.9}) {
    QVec qp = uniaxial_from_director({std::cos(phi), std::sin(phi), 0}, sp);
    // coordinates proportional to (cos 2phi, sin 2phi, -1/sqrt(3), 0, 0)
    double scale = sp / std::sqrt(2.0);
    CHECK(qp[0] == doctest::Approx(scale * std::cos(2 * phi)).epsilon(1e-13));
    CHECK(qp[1] == doctest::Approx(scale * std::sin(2 * phi)).epsilon(1e-13));
    CHECK(qp[2] == doctest::Approx(-scale / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(biaxiality_gap(qp) < 1e-13);
  }
  CHECK_THROWS_AS(uniaxial_from_director({0.5, 0, 0}, 1.0), Error);
}

TEST_CASE("bulk expansion diagonals at unit parameters") {
  auto be = bulk_expansion(MaterialParams::make(1, 1, 1, 0.1));
  CHECK(be.mu == doctest::Approx(1.5));
  CHECK(be.nu == doctest::Approx(2.5));
  CHECK(be.b2_diag.x == doctest::Approx(0.5));
  CHECK(be.b1_diag.x == doctest::Approx(std::sqrt(8.0 / 3.0) * 1.5 + std::sqrt(2.0 / 3.0)));
  CHECK(be.b1_diag.z == doctest::Approx(std::sqrt(8.0 / 3.0) * 1.5 - std::sqrt(2.0 / 3.0) / 3.0));

  // b2 = 0: tangential modes soft
  auto be0 = bulk_expansion(MaterialParams::make(1, 0, 1, 0.1));
  CHECK(be0.mu == 0.0);
  CHECK(be0.nu == doctest::Approx(2.0));
}

// B0 must agree with the finite-difference Hessian of the shifted bulk at V_+
// restricted to span(F1, F2, F3).
TEST_CASE("bulk Hessian matches B0") {
  auto p = MaterialParams::make(1.1, 0.8, 1.3, 0.1);
  auto be = bulk_expansion(p);
  const QVec vplus = uniaxial_from_director({0, 0, 1}, p.s_plus);
  const double step = 1e-5;
  for (int i = 0; i < 3; ++i) {
    QVec qp = vplus, qm = vplus;
    qp[i] += step;
    qm[i] -= step;
    double h = (bulk_potential(qp, p) - 2 * bulk_potential(vplus, p) + bulk_potential(qm, p)) /
               (step * step);
    CHECK(std::abs(h - be.b0_diag[i]) < 1e-6 * std::max(1.0, be.b0_diag[i]));
  }
}
