#pragma once

#include "nlc/grid.hpp"
#include "nlc/qtensor.hpp"

namespace nlc {

struct EnergyBreakdown {
  double elastic = 0;
  double bulk = 0;
  double total = 0;
  double e0_ref = 0;
  double renormalized = 0;  // (total - e0_ref)/eps^2
};

/// Per-node transverse correction data: rho0 (3 planes), the rho-derived
/// expansion coefficients (c0, c1, c2), and the printed-variant coefficients
/// kept as a logged diagnostic (they differ by constant factors).
struct CorrectionField {
  std::shared_ptr<const DomainGrid> grid;
  std::vector<double> rho;        // 3 planes
  std::vector<double> c_coeff;    // 3 planes: c0, c1, c2
  std::vector<double> c_printed;  // 3 planes
};

/// s+^2 * int |grad n|^2 by grid quadrature.
double oseen_frank_energy(const DirectorField& n, const MaterialParams& p);

/// Quadrature energies: elastic = 1/2 int |grad Q|^2, bulk = eps^-2 int f~.
EnergyBreakdown ldg_energy(const QField& q, const MaterialParams& p, double e0_ref = 0);

/// Edge-based discrete energies: the exact Lyapunov functions of the flows.
double ldg_energy_discrete(const QField& q, const MaterialParams& p);
double dirichlet_energy_discrete(const DirectorField& n);

/// b0 per interior node (3 planes; zero on band/exterior).
std::vector<double> b_field(const DirectorField& n, const MaterialParams& p);

/// rho0 = -B0^{-1} b0 (3 planes). Throws singular_b0 when mu = 0 (b^2 = 0).
std::vector<double> rho_star(const DirectorField& n, const MaterialParams& p);

/// H0[n, rho] = int 1/2 B0 rho.rho + b0.rho.
double h0_energy(const DirectorField& n, const MaterialParams& p, const std::vector<double>& rho);

/// -s+^2 int (2/mu)|grad n (x) grad n|^2 + (3/nu - 1/mu)|grad n|^4; equals
/// h0_energy(n, rho_star(n)) identically.
double h0_closed_form(const DirectorField& n, const MaterialParams& p);

/// -(3/nu) int |grad n|^4; requires n conformal (residual below 10 h^2
/// |grad n|^2_inf), else throws not_conformal.
double w_ldg(const DirectorField& n, const MaterialParams& p);

/// Uniaxial lift Q = scale (n (x) n - I/3) nodewise.
QField q_from_director(const DirectorField& n, double scale);

/// Q[n] + eps^2 R_n V_rho0 R_n^t with exact boundary values; the correction
/// ramps over one cell next to the band to avoid an O(h) gradient spike.
QField corrected_minimizer(const DirectorField& n, const MaterialParams& p);

CorrectionField biax_coefficients(const DirectorField& n, const MaterialParams& p);

struct HepsDecomposition {
  double director_term = 0;
  double h_eps_term = 0;
  double gradient_term = 0;
  double g_eps = 0;                 // (total - e0_ref)/eps^2, quadrature route
  double reconstruction_error = 0;  // |g_eps - sum of the three terms|
};
/// Energy split along the (n_eps, rho_eps) parameterisation; the identity is
/// pointwise except for discrete product-rule error.
HepsDecomposition h_eps_decomposition(const QField& q, const DirectorField& n0,
                                      const MaterialParams& p, double e0_ref);

// ---- b^2 = 0 regime --------------------------------------------------------

/// Ginzburg-Landau form with f~ = (c^2/4)(|Q|^2 - a^2/c^2)^2; throws
/// wrong_regime unless b2 == 0.
EnergyBreakdown b0_gl_energy(const QField& q, const MaterialParams& p, double e0_ref = 0);

/// -(c^2 / 4 a^4) int |grad Q0|^4.
double b0_limit_correction(const QField& q0, const MaterialParams& p);

/// Predicted trace component of (Q_eps - Q0):Q0 / eps^2 for minimizers:
/// -|grad Q0|^2 / (2 a^2) per interior node (1 plane). The sign is the
/// self-consistent one: minimizers shrink |Q| below the limit norm where the
/// gradient concentrates.
std::vector<double> b0_rho_prediction(const QField& q0, const MaterialParams& p);

}  // namespace nlc
