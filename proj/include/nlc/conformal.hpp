#pragma once

#include <complex>
#include <vector>

#include "nlc/grid.hpp"
#include "nlc/qtensor.hpp"

namespace nlc {

using cplx = std::complex<double>;

/// Degree-m escape configuration: |m| interior points (repeats allowed), a
/// global phase, and the hemisphere the director escapes to.
struct EscapeConfig {
  enum class Orientation { north, south };
  int m = 1;
  std::vector<cplx> points;
  double alpha = 0.0;
  Orientation orientation = Orientation::north;
};

/// Holomorphic nonvanishing G_a with Re log G_a harmonic and |G_a(x)| = |x-a|
/// on the boundary. On the disk this is the Blaschke denominator 1 - conj(a) x
/// in closed form; on other domains g_a is solved on the grid and its harmonic
/// conjugate h_a is integrated on the dual lattice, where the discrete 1-form
/// closed by the 5-point Laplace equation makes the path sums exact up to the
/// linear-solve residual.
struct GreenPair {
  cplx a;
  bool analytic = false;
  std::shared_ptr<const DomainGrid> grid;  // null for analytic pairs
  std::vector<double> log_mod;             // g_a per node
  std::vector<double> phase;               // h_a per node, anchor-normalized

  cplx value(cplx x) const;          // analytic pairs only
  cplx value_node(int flat) const;   // either kind
};

/// n = (2 Re w, 2 Im w, 1 - |w|^2)/(1 + |w|^2); infinity maps to -e3.
Vec3 stereographic(cplx w);
cplx stereographic_inverse(const Vec3& n);
/// Overflow-free variant for w = p/q given as a pair.
Vec3 stereographic_pq(cplx p, cplx q);

GreenPair disk_green_pair(cplx a);
GreenPair numeric_green_pair(std::shared_ptr<const DomainGrid> grid, cplx a);

/// Conformal director field with n = +-e3 exactly at the escape points and
/// planar boundary values of degree m. Band nodes get the boundary formula
/// evaluated at their exact boundary points.
DirectorField conformal_field(const EscapeConfig& cfg, std::shared_ptr<const DomainGrid> grid);

/// Zeros at b_points (n = e3), poles at c_points (n = -e3); boundary degree
/// |b| - |c|. Meromorphic, hence orientation-preserving conformal.
DirectorField mixed_conformal_field(const std::vector<cplx>& b_points,
                                    const std::vector<cplx>& c_points, double alpha,
                                    std::shared_ptr<const DomainGrid> grid);

/// Planar boundary director at the given boundary points.
std::vector<std::array<double, 2>> boundary_director(const EscapeConfig& cfg,
                                                     const std::vector<std::array<double, 2>>& pts);

/// Winding number of a sampled loop of planar unit vectors; throws
/// under_sampled if consecutive samples rotate by >= pi/2.
int degree_of_boundary(const std::vector<std::array<double, 2>>& samples);

/// Boundary degree of a director field's planar band values (samples ordered
/// by boundary parameter).
int boundary_degree_of_field(const DirectorField& n);

/// Degree of the associated Q-level map (winding of (c1, c2) doubled-angle
/// data), for b^2 = 0 boundary conditions of half-integer director degree.
int q_level_boundary_degree(const DirectorField& c);

/// S2-valued field c for the b^2 = 0 regime: c = -e3 exactly at the |k|
/// escape points, c.e3 constant on the boundary. kappa = sqrt(3) puts the
/// boundary at the planar prolate uniaxial height c3 = -1/2.
DirectorField b0_conformal_cfield(int k, const std::vector<cplx>& points,
                                  std::shared_ptr<const DomainGrid> grid,
                                  double kappa = 1.7320508075688772);

/// Oriented area quadrature of n . (d1 n x d2 n).
double signed_area(const DirectorField& n);

struct ConformalityResidual {
  double residual = 0;  // max interior |d2 n - sigma n x d1 n|
  int sigma = 1;        // minimizing orientation
};
ConformalityResidual conformality_residual(const DirectorField& n);

}  // namespace nlc
