#pragma once

#include <vector>

#include "nlc/grid.hpp"
#include "nlc/qtensor.hpp"

namespace nlc {

/// Exact split of an admissible Q field along its principal eigenframe:
/// Q = Q[n_eps] + eps^2 R_{n_eps} V_{rho_eps} R_{n_eps}^t nodewise. The
/// rotated difference has e3 as an eigenvector by construction, so its F4/F5
/// components vanish to rounding; both residuals are tracked per node.
struct Decomposition {
  DirectorField n_eps;
  std::vector<double> rho_eps;       // 3 planes
  std::vector<double> f45_residual;  // 1 plane, relative to |Q|
  std::vector<double> eigen_gap;     // 1 plane
  double max_f45 = 0;
  double max_reconstruction = 0;  // relative nodewise reconstruction error
};

/// Throws degenerate_spectrum (reporting the node) if the principal gap drops
/// below 1e-6 anywhere; sign of n_eps follows the n0 branch.
Decomposition decompose(const QField& q, const DirectorField& n0, const MaterialParams& p);

/// Discrete H^1_0 seminorm ||grad(n_eps - n0)||_L2.
double director_drift(const DirectorField& n_eps, const DirectorField& n0);

struct ScalingFit {
  std::vector<double> eps;
  std::vector<double> values;
  double exponent = 0;     // log-log slope
  double coefficient = 0;  // signed, |coefficient| = exp(intercept)
  double residual = 0;     // rms residual of the log-log fit
  bool below_floor = false;
};

/// Log-log least squares of |values| against eps (>= 3 strictly decreasing
/// samples). Values indistinguishable from zero report below_floor instead.
ScalingFit fit_scaling(const std::vector<double>& eps, const std::vector<double>& values);

struct ExpansionFit {
  ScalingFit loglog;        // on |E_eps - E0|
  double constant = 0;      // K from least squares (E-E0)/eps^2 = K + slope*eps
  double slope = 0;
  double h0_reference = 0;  // caller-supplied comparison value
};

/// Throws bad_fit if fewer than 3 samples or the log-log residual exceeds 0.1.
ExpansionFit expansion_fit(const std::vector<double>& eps, const std::vector<double>& energies,
                           double e0_ref, double h0_reference);

/// Fit of the max-node biaxiality gap against eps.
ScalingFit biaxiality_scaling(const std::vector<double>& eps, const std::vector<double>& max_gaps);

}  // namespace nlc
