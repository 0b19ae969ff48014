#pragma once

#include <functional>
#include <string>

#include "nlc/energy.hpp"
#include "nlc/grid.hpp"

namespace nlc {

/// Explicit-flow controls. tau = 0 picks the stability bound h^2/4 (S^2 flow)
/// or min(h^2/4, eps^2/(2 Lambda)) for the LdG flow, Lambda being the bulk
/// Hessian estimate 2a^2 + 3b^2 s+ + 6c^2 s+^2. Accepted steps never increase
/// the discrete energy; on an increase the step halves and the sweep repeats.
struct FlowConfig {
  double tau = 0;
  bool adaptive = true;
  long max_sweeps = 400000;
  double energy_tol = 1e-10;   // relative decrease over one window
  int window = 100;
  double residual_tol = 1e-6;  // relative to the initial residual
  std::function<void(long sweep)> checkpoint;  // called every window sweeps
};

enum class SolveStatus { converged, max_sweeps, norm_collapse, step_underflow };

struct SolveReport {
  SolveStatus status = SolveStatus::converged;
  long sweeps = 0;
  double final_energy = 0;
  double initial_energy = 0;
  double final_residual = 0;
  double initial_residual = 0;
  double tau = 0;
  long rejected_steps = 0;
  bool monotone = true;  // accepted-step energy sequence non-increasing
  std::vector<double> energy_history;  // one entry per window
  double wall_seconds = 0;
};

const char* to_string(SolveStatus s);

/// Projected heat flow n <- normalize(n + tau lap n) with fixed boundary.
SolveReport harmonic_map_flow(DirectorField& n, const FlowConfig& cfg = {});

/// Same flow on the b^2 = 0 c-field (the S^2 reduction of the S^4 problem
/// under planar uniaxial boundary data).
SolveReport s4_harmonic_flow(DirectorField& c, const FlowConfig& cfg = {});

/// Explicit gradient flow Q <- Q - tau(-lap Q + eps^-2 grad f~) on interior
/// nodes; works unchanged for the b^2 = 0 Ginzburg-Landau form.
SolveReport ldg_gradient_flow(QField& q, const MaterialParams& p, const FlowConfig& cfg = {});

/// Nodewise ||lap u + |grad u|^2 u|| (zero outside the interior).
std::vector<double> harmonic_residual_field(const DirectorField& n);
std::vector<double> q_harmonic_residual_field(const QField& q);
double residual_l2(const DomainGrid& g, const std::vector<double>& r);
/// Max over interior nodes at least 3 cells from the band.
double residual_max_core(const DomainGrid& g, const std::vector<double>& r);

/// Vertical lift of planar boundary data: harmonic extension of the planar
/// components, escape through +e3 in the interior. `planar_boundary` is
/// evaluated at exact boundary points.
DirectorField lifted_boundary_init(
    std::shared_ptr<const DomainGrid> grid,
    const std::function<std::array<double, 2>(double, double)>& planar_boundary,
    bool escape_down = false);

/// Coarse-to-fine harmonic map solve: lift at the coarsest level, relax, and
/// prolong up to `resolution`. The finest level runs the full convergence
/// criterion, so the result satisfies the flow contracts.
DirectorField solve_harmonic_multilevel(
    const DomainSpec& domain, int resolution,
    const std::function<std::array<double, 2>(double, double)>& planar_boundary,
    const FlowConfig& cfg = {}, SolveReport* report = nullptr, bool escape_down = false);

/// Bilinear prolongation of a director field to a finer grid (band nodes are
/// left zero for the caller to fill, interior values renormalized).
DirectorField prolong_director(const DirectorField& coarse,
                               std::shared_ptr<const DomainGrid> fine);

}  // namespace nlc
