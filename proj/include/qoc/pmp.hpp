// Extended Pontryagin Hamiltonian, stationarity-based control updates,
// Gamkrelidze multiplier updates, feasibility quantities, and the full
// forward-backward sweep.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qoc/dynamics.hpp"
#include "qoc/operators.hpp"
#include "qoc/types.hpp"

namespace qoc {

/// Multiplier samples per grid interval; mu = 2 (mu1 - mu2) always, with
/// mu1 (upper bound) and mu2 (lower bound) clamped non-negative.
struct MultiplierPath {
    std::vector<double> mu1;
    std::vector<double> mu2;
    std::vector<double> mu;

    static MultiplierPath zeros(int steps);
};

/// How the per-iteration multiplier pass treats the previous iteration's
/// path: `warm_start` accumulates the fresh pass on top of it, `zero`
/// rebuilds the path from the fresh pass alone.
enum class MultiplierReset {
    warm_start,
    zero,
};

/// All sweep knobs. Defaults run the bundled qutrit scenario; the learning
/// rate and damping were tuned for a stable multiplier loop on it.
struct SolverConfig {
    ConstraintSpec constraint;
    double eta_i = 20.0;  // upper-bound learning rate
    double eta_d = 20.0;  // lower-bound learning rate
    double zeta1 = 0.02;  // weight of the stationary control in the convex update
    double zeta2 = 0.98;  // weight of the previous control; zeta1 + zeta2 = 1
    double eps_rho = 1e-6;
    double eps_pi = 1e-6;
    double eps_u = 1e-6;
    double eps_mu = 1e-6;
    double eps = 1e-6;         // composite stopping tolerance
    double eps_active = 1e-4;  // bound-activity band on C^2
    double eps_phi = 1e-10;    // singularity guard for the boundary control
    int max_iters = 800;
    MultiplierReset reset = MultiplierReset::zero;

    void validate() const;
};

/// One sweep iterate, compared by the convergence metric.
struct SweepIterate {
    std::vector<Matrix> states;
    std::vector<Matrix> costates;
    std::vector<double> u;
    std::vector<double> mu;
};

/// Output of the forward-backward sweep.
struct SweepResult {
    StateTrajectory trajectory;
    AdjointTrajectory adjoint;
    ControlGrid controls;
    MultiplierPath multipliers;
    double cost = 0.0;
    std::vector<double> coherence_path;  // C(rho(t_m)) per grid node
    std::vector<double> convergence_history;
    int iterations = 0;
    bool converged = false;
};

/// Field energy J = sum_m u_m^2 dt.
double cost(const ControlGrid& grid);

/// H = Tr( (pi + mu W(rho))^dag (-(i/hbar)[H(t), rho] + dissipator(rho)) ) + u^2.
/// The trace is real for Hermitian pi; the imaginary residue is asserted small.
double pontryagin_hamiltonian(const SystemModel& model, const DensityMatrix& rho,
                              const Matrix& pi, double u, double mu,
                              std::span<const CoherencePair> pairs, double t);

/// dH/du = Tr( (pi + mu W(rho))^dag (-i/hbar)[H_c(t), rho] ) + 2u.
double stationarity_residual(const SystemModel& model, const DensityMatrix& rho,
                             const Matrix& pi, double mu,
                             std::span<const CoherencePair> pairs, double t, double u);

/// The unique root of the stationarity residual:
/// u = (i / 2 hbar) Tr( (pi + mu W(rho))^dag [H_c(t), rho] ).
double stationary_control(const SystemModel& model, const DensityMatrix& rho, const Matrix& pi,
                          double mu, std::span<const CoherencePair> pairs, double t);

/// The feasibility pair (Phi, Delta) with d C^2 / dt = Phi u + Delta:
/// Phi collects the control-Hamiltonian response, Delta the drift and
/// dissipative response of the constrained coherence.
std::pair<double, double> phi_delta(const SystemModel& model, const DensityMatrix& rho,
                                    std::span<const CoherencePair> pairs, double t);

/// u = -Delta / Phi, the control holding C^2 constant. Throws
/// SingularControlDirection when |Phi| < eps_phi.
double boundary_control(const SystemModel& model, const DensityMatrix& rho,
                        std::span<const CoherencePair> pairs, double t, double eps_phi);

/// One multiplier update pass: per interval m, with dC2 = C^2_m - C^2_{m-1},
///   upper bound active (C^2_m >= beta - eps_active): mu1 <- mu1 + eta_i dC2
///   lower bound active (C^2_m <= alpha + eps_active): mu2 <- mu2 - eta_d dC2
///   interior: carry values forward,
/// then clamp mu1, mu2 at zero and set mu = 2 (mu1 - mu2). The base values
/// come from `prev` (warm start) or from zero, per cfg.reset.
MultiplierPath update_multipliers(std::span<const double> coherence_sq_path,
                                  const MultiplierPath& prev, const SolverConfig& cfg);

/// max over the grid of the per-entry state, costate, control and multiplier
/// differences between two iterates.
double convergence_metric(const SweepIterate& prev, const SweepIterate& curr);

/// The full forward-backward sweep: iterate forward integration, backward
/// integration, multiplier update, per-step Hamiltonian evaluation, and the
/// convex control update until the convergence metric drops below eps or
/// max_iters is reached.
SweepResult sweep(const SystemModel& model, const DensityMatrix& rho0, const ControlGrid& grid0,
                  const SolverConfig& cfg);

}  // namespace qoc
