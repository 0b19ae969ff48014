#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nlc/conformal.hpp"

using namespace nlc;

TEST_CASE("stereographic projection") {
  Vec3 n0 = stereographic(cplx(0, 0));
  CHECK(norm(n0 - Vec3{0, 0, 1}) < 1e-15);
  Vec3 n1 = stereographic(cplx(1, 0));
  CHECK(norm(n1 - Vec3{1, 0, 0}) < 1e-15);
  Vec3 nh = stereographic(cplx(0, 0.5));
  CHECK(nh.x == doctest::Approx(0.0));
  CHECK(nh.y == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(nh.z == doctest::Approx(0.6).epsilon(1e-14));

  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int t = 0; t < 200; ++t) {
    cplx w(d(rng), d(rng));
    Vec3 n = stereographic(w);
    CHECK(norm(n) == doctest::Approx(1.0).epsilon(1e-13));
    cplx back = stereographic_inverse(n);
    CHECK(std::abs(back - w) < 1e-12 * (1 + std::abs(w)));
    // equator iff |w| = 1
    cplx u = w / std::abs(w);
    CHECK(std::abs(stereographic(u).z) < 1e-14);
  }
  CHECK(norm(stereographic(cplx(1e301, 0)) - Vec3{0, 0, -1}) < 1e-15);
}

TEST_CASE("disk green pair: Blaschke boundary identity") {
  GreenPair g0 = disk_green_pair(cplx(0, 0));
  CHECK(std::abs(g0.value(cplx(0.3, 0.2)) - 1.0) < 1e-15);

  GreenPair g = disk_green_pair(cplx(0.5, 0.0));
  double worst = 0;
  const int nsamp = 1000000;
  for (int i = 0; i < nsamp; ++i) {
    double th = 2 * M_PI * i / nsamp;
    cplx x = std::polar(1.0, th);
    worst = std::max(worst, std::abs(std::abs((x - 0.5) / g.value(x)) - 1.0));
  }
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(disk_green_pair(cplx(0.9999999, 0)), Error);
}

TEST_CASE("disk green pair: log-modulus harmonic") {
  GreenPair g = disk_green_pair(cplx(0.35, -0.2));
  auto logmod = [&](double x, double y) { return std::log(std::abs(g.value(cplx(x, y)))); };
  double resid[2];
  int k = 0;
  for (double h : {1e-2, 5e-3}) {
    double worst = 0;
    for (double x : {-0.4, 0.1, 0.6})
      for (double y : {-0.5, 0.0, 0.3}) {
        double lap = (logmod(x + h, y) + logmod(x - h, y) + logmod(x, y + h) + logmod(x, y - h) -
                      4 * logmod(x, y)) /
                     (h * h);
        worst = std::max(worst, std::abs(lap));
      }
    resid[k++] = worst;
  }
  CHECK(resid[0] < 1e-3);
  CHECK(resid[1] < resid[0] * 0.6);
}

TEST_CASE("numeric green pair matches the analytic disk pair") {
  cplx a(0.3, 0.15);
  GreenPair exact = disk_green_pair(a);
  double err[2];
  int k = 0;
  for (int res : {32, 64}) {
    auto grid = make_grid(DomainSpec::disk(), res);
    GreenPair num = numeric_green_pair(grid, a);
    // align the free phase constant at the first interior node
    int f0 = grid->interior.front();
    auto node_xy = [&](int f) { return cplx(grid->x(f % grid->nx), grid->y(f / grid->nx)); };
    cplx align = exact.value(node_xy(f0)) / num.value_node(f0);
    align /= std::abs(align);
    double worst = 0;
    for (int f : grid->interior) {
      cplx ve = exact.value(node_xy(f));
      cplx vn = align * num.value_node(f);
      worst = std::max(worst, std::abs(vn - ve) / std::abs(ve));
    }
    err[k++] = worst;
  }
  CHECK(err[0] < 0.08);
  CHECK(err[1] < err[0] * 0.7);  // first-order from the boundary sampling
}

TEST_CASE("numeric green pair: conjugate path independence on the dual lattice") {
  auto grid = make_grid(DomainSpec::disk(), 48);
  GreenPair num = numeric_green_pair(grid, cplx(0.2, -0.1));
  const auto& g = *grid;
  const auto& gv = num.log_mod;
  // two homotopic L-paths from dual cell A to dual cell B: right-then-up
  // versus up-then-right; the discrete form closed by the solve makes the
  // sums agree to solver tolerance
  int ax = g.nx / 2 - 10, ay = g.ny / 2 - 10, steps = 20;
  auto inc_x = [&](int ix, int iy) { return -(gv[g.idx(ix + 1, iy + 1)] - gv[g.idx(ix + 1, iy)]); };
  auto inc_y = [&](int ix, int iy) { return gv[g.idx(ix + 1, iy + 1)] - gv[g.idx(ix, iy + 1)]; };
  double path1 = 0, path2 = 0;
  for (int s = 0; s < steps; ++s) path1 += inc_x(ax + s, ay);
  for (int s = 0; s < steps; ++s) path1 += inc_y(ax + steps, ay + s);
  for (int s = 0; s < steps; ++s) path2 += inc_y(ax, ay + s);
  for (int s = 0; s < steps; ++s) path2 += inc_x(ax + s, ay + steps);
  CHECK(std::abs(path1 - path2) < 1e-6);
}

TEST_CASE("numeric green pair on the square: boundary identity") {
  auto grid = make_grid(DomainSpec::square(), 96);
  GreenPair num = numeric_green_pair(grid, cplx(0.5, 0.5));
  double worst = 0;
  for (size_t b = 0; b < grid->band.size(); ++b) {
    int f = grid->band[b];
    cplx xb(grid->band_bx[b], grid->band_by[b]);
    worst = std::max(worst, std::abs(std::abs(num.value_node(f)) - std::abs(xb - cplx(0.5, 0.5))));
  }
  CHECK(worst < 1e-3);
  CHECK_THROWS_AS(numeric_green_pair(grid, cplx(0.999, 0.5)), Error);
}

TEST_CASE("disk m=1 radial conformal field") {
  auto grid = make_grid(DomainSpec::disk(), 64);
  EscapeConfig cfg{1, {cplx(0, 0)}, 0.0, EscapeConfig::Orientation::north};
  DirectorField n = conformal_field(cfg, grid);

  // center node maps exactly to e3
  int cx = (grid->nx - 1) / 2;
  int fc = grid->idx(cx, cx);
  CHECK(n.at(2, fc) == doctest::Approx(1.0).epsilon(1e-14));

  // w = x: boundary angle phi_b = theta, degree 1
  CHECK(boundary_degree_of_field(n) == 1);
  for (size_t b = 0; b < grid->band.size(); ++b) {
    int f = grid->band[b];
    double theta = std::atan2(grid->band_by[b], grid->band_bx[b]);
    double phi = std::atan2(n.at(1, f), n.at(0, f));
    double diff = std::remainder(phi - theta, 2 * M_PI);
    CHECK(std::abs(diff) < 1e-12);
    CHECK(std::abs(n.at(2, f)) < 1e-13);  // planar on the boundary
  }
}

TEST_CASE("conformality residual vanishes at O(h^2)") {
  double resid[2];
  int k = 0;
  for (int res : {32, 64}) {
    auto grid = make_grid(DomainSpec::disk(), res);
    EscapeConfig cfg{1, {cplx(0, 0)}, 0.3, EscapeConfig::Orientation::north};
    auto r = conformality_residual(conformal_field(cfg, grid));
    CHECK(r.sigma == 1);
    resid[k++] = r.residual;
  }
  CHECK(resid[1] < resid[0] / 3.0);
  CHECK(resid[1] < 2e-3);
}

TEST_CASE("degree-2 field with split escape points") {
  auto grid = make_grid(DomainSpec::disk(), 64);
  // grid-aligned escape points
  EscapeConfig cfg{2, {cplx(0.375, 0), cplx(-0.375, 0)}, 0.0, EscapeConfig::Orientation::north};
  DirectorField n = conformal_field(cfg, grid);
  int cx = (grid->nx - 1) / 2;
  for (double px : {0.375, -0.375}) {
    int f = grid->idx(cx + int(std::lround(px * 64)), cx);
    CHECK(n.at(2, f) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(boundary_degree_of_field(n) == 2);

  // south orientation reflects n3 and keeps the planar boundary data
  EscapeConfig south = cfg;
  south.orientation = EscapeConfig::Orientation::south;
  DirectorField ns = conformal_field(south, grid);
  for (int f : grid->interior) {
    CHECK(ns.at(0, f) == doctest::Approx(n.at(0, f)).epsilon(1e-11));
    CHECK(ns.at(2, f) == doctest::Approx(-n.at(2, f)).epsilon(1e-11));
  }
  CHECK(boundary_degree_of_field(ns) == 2);
}

TEST_CASE("negative degree field") {
  auto grid = make_grid(DomainSpec::disk(), 64);
  EscapeConfig cfg{-1, {cplx(0, 0)}, 0.0, EscapeConfig::Orientation::north};
  DirectorField n = conformal_field(cfg, grid);
  CHECK(boundary_degree_of_field(n) == -1);
  auto r = conformality_residual(n);
  CHECK(r.sigma == -1);  // antiholomorphic branch
  CHECK(r.residual < 5e-3);
}

TEST_CASE("mixed conformal field") {
  auto grid = make_grid(DomainSpec::disk(), 64);
  // reduction: no poles == plain north field
  EscapeConfig cfg{1, {cplx(0.25, 0)}, 0.1, EscapeConfig::Orientation::north};
  DirectorField a = conformal_field(cfg, grid);
  DirectorField b = mixed_conformal_field({cplx(0.25, 0)}, {}, 0.1, grid);
  for (int f : grid->interior) CHECK(a.at(2, f) == doctest::Approx(b.at(2, f)).epsilon(1e-12));

  // one zero, one pole: boundary degree 0, both sphere poles hit exactly
  DirectorField m = mixed_conformal_field({cplx(-0.25, 0)}, {cplx(0.25, 0)}, 0.0, grid);
  int cx = (grid->nx - 1) / 2;
  int fz = grid->idx(cx - 16, cx), fp = grid->idx(cx + 16, cx);
  CHECK(m.at(2, fz) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m.at(2, fp) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(boundary_degree_of_field(m) == 0);

  // meromorphic, so sigma = +1; residual refines at second order
  double resid[2];
  int k = 0;
  for (int res : {64, 128}) {
    auto gref = make_grid(DomainSpec::disk(), res);
    auto r = conformality_residual(mixed_conformal_field({cplx(-0.25, 0)}, {cplx(0.25, 0)}, 0.0, gref));
    CHECK(r.sigma == 1);
    resid[k++] = r.residual;
  }
  CHECK(resid[1] < resid[0] / 3.0);
}

TEST_CASE("boundary director and degree oracle") {
  auto pts = boundary_points(DomainSpec::disk(), 720);
  EscapeConfig radial{1, {cplx(0, 0)}, 0.4, EscapeConfig::Orientation::north};
  auto nb = boundary_director(radial, pts);
  for (size_t i = 0; i < pts.size(); ++i) {
    double theta = std::atan2(pts[i][1], pts[i][0]);
    double phi = std::atan2(nb[i][1], nb[i][0]);
    CHECK(std::abs(std::remainder(phi - (theta + 0.4), 2 * M_PI)) < 1e-12);
    CHECK(std::hypot(nb[i][0], nb[i][1]) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(degree_of_boundary(nb) == 1);

  std::mt19937 rng(11u);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  for (int m : {1, 2, 3, -2}) {
    EscapeConfig cfg;
    cfg.m = m;
    for (int j = 0; j < std::abs(m); ++j) cfg.points.push_back(cplx(d(rng), d(rng)));
    cfg.alpha = d(rng);
    CHECK(degree_of_boundary(boundary_director(cfg, pts)) == m);
  }

  std::vector<std::array<double, 2>> constant(64, {1.0, 0.0});
  CHECK(degree_of_boundary(constant) == 0);

  // quarter-turn steps sit exactly at the pi/2 admissibility edge: refused
  std::vector<std::array<double, 2>> bad = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  CHECK_THROWS_AS(degree_of_boundary(bad), Error);
}

TEST_CASE("undersampled boundary rejected") {
  std::vector<std::array<double, 2>> bad;
  for (int i = 0; i < 6; ++i) {
    double th = 2 * M_PI * i * 2 / 6.0;  // degree-2 winding on 6 samples: pi/.. steps too big
    bad.push_back({std::cos(th), std::sin(th)});
  }
  CHECK_THROWS_AS(degree_of_boundary(bad), Error);
}

TEST_CASE("b0 conformal c-field") {
  auto grid = make_grid(DomainSpec::disk(), 64);
  DirectorField c = b0_conformal_cfield(1, {cplx(0, 0)}, grid);
  int cx = (grid->nx - 1) / 2;
  CHECK(c.at(2, grid->idx(cx, cx)) == doctest::Approx(-1.0).epsilon(1e-14));  // pole at center

  // kappa = sqrt(3): boundary height is the planar prolate uniaxial value -1/2
  for (size_t b = 0; b < grid->band.size(); ++b) {
    CHECK(std::abs(c.at(2, grid->band[b]) + 0.5) < 1e-10);
  }
  CHECK(q_level_boundary_degree(c) == 1);
  CHECK(q_level_boundary_degree(b0_conformal_cfield(-1, {cplx(0, 0)}, grid)) == -1);
  CHECK(q_level_boundary_degree(b0_conformal_cfield(2, {cplx(0.25, 0), cplx(-0.25, 0)}, grid)) == 2);

  // the variant normalization kappa = sqrt(2 + sqrt(3)) sits at height -1/sqrt(3)
  DirectorField cv = b0_conformal_cfield(1, {cplx(0, 0)}, grid, std::sqrt(2 + std::sqrt(3.0)));
  for (size_t b = 0; b < grid->band.size(); ++b)
    CHECK(std::abs(cv.at(2, grid->band[b]) + 1.0 / std::sqrt(3.0)) < 1e-10);

  // c3 < 0 throughout (|w| >= kappa > 1 inside)
  for (int f : grid->interior) CHECK(c.at(2, f) < 0);

  double resid[2];
  int k = 0;
  for (int res : {64, 128}) {
    auto gref = make_grid(DomainSpec::disk(), res);
    resid[k++] = conformality_residual(b0_conformal_cfield(1, {cplx(0, 0)}, gref)).residual;
  }
  CHECK(resid[1] < resid[0] / 3.0);
  CHECK(resid[1] < 1e-3);
}

TEST_CASE("signed area") {
  auto grid = make_grid(DomainSpec::disk(), 256);
  EscapeConfig cfg{1, {cplx(0, 0)}, 0.0, EscapeConfig::Orientation::north};
  DirectorField n = conformal_field(cfg, grid);
  CHECK(signed_area(n) == doctest::Approx(2 * M_PI).epsilon(0.01));

  DirectorField refl = n;
  for (size_t f = 0; f < grid->nodes(); ++f) refl.at(2, f) = -refl.at(2, f);
  CHECK(signed_area(refl) == doctest::Approx(-signed_area(n)).epsilon(1e-12));

  DirectorField constant(grid);
  for (size_t f = 0; f < grid->nodes(); ++f) constant.at(2, f) = 1.0;
  CHECK(signed_area(constant) == doctest::Approx(0.0));
}

TEST_CASE("escape config validation") {
  auto grid = make_grid(DomainSpec::disk(), 32);
  EscapeConfig bad{2, {cplx(0, 0)}, 0.0, EscapeConfig::Orientation::north};
  CHECK_THROWS_AS(conformal_field(bad, grid), Error);
  EscapeConfig outside{1, {cplx(1.5, 0)}, 0.0, EscapeConfig::Orientation::north};
  CHECK_THROWS_AS(conformal_field(outside, grid), Error);
  EscapeConfig zero{0, {}, 0.0, EscapeConfig::Orientation::north};
  CHECK_THROWS_AS(conformal_field(zero, grid), Error);
}
