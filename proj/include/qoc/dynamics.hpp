// Time-dependent Hamiltonian assembly, Lindblad and adjoint right-hand sides,
// and fixed-step RK4 integration forward/backward on the control grid.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qoc/operators.hpp"
#include "qoc/types.hpp"

namespace qoc {

/// An open N-level system: drift Hamiltonian, control-Hamiltonian envelope
/// (the full control term is H_c(t) * u(t)), and a decoherence channel.
/// Energies in atomic units with hbar = 1.
struct SystemModel {
    Index dim = 0;
    Matrix h0;
    std::function<Matrix(double)> hc_envelope;
    DecoherenceChannel channel;
    double hbar = 1.0;
};

/// Uniform grid on [t0, tf] with one piecewise-constant control sample per
/// interval (zero-order hold: u[m] acts on [t_m, t_{m+1})).
class ControlGrid {
  public:
    ControlGrid(double t0, double tf, std::vector<double> u);
    ControlGrid(double t0, double tf, int steps, double u_init = 0.0);

    double t0() const { return t0_; }
    double tf() const { return tf_; }
    int steps() const { return static_cast<int>(u_.size()); }
    double dt() const { return (tf_ - t0_) / static_cast<double>(u_.size()); }
    double time_at(int m) const { return t0_ + static_cast<double>(m) * dt(); }

    const std::vector<double>& u() const { return u_; }
    double u_at(int m) const { return u_[static_cast<std::size_t>(m)]; }

    /// Same grid with replaced control samples.
    ControlGrid with_controls(std::vector<double> u) const { return {t0_, tf_, std::move(u)}; }

  private:
    double t0_;
    double tf_;
    std::vector<double> u_;
};

/// State samples rho(t_m) on the grid nodes, states[0] = initial condition.
struct StateTrajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
};

/// Costate samples pi(t_m), Hermitian, with pi(tf) = 0.
struct AdjointTrajectory {
    std::vector<double> times;
    std::vector<Matrix> costates;
};

/// H(t) = H0 + u * H_c(t).
Matrix hamiltonian(const SystemModel& model, double t, double u);

/// d rho / dt = -(i/hbar) [H(t), rho] + dissipator(rho).
Matrix lindblad_rhs(const SystemModel& model, const Matrix& rho, double t, double u);

/// chi(phi) = -(i/hbar) [phi, H(t)] + dissipator(phi) + dissipator_l0(phi);
/// the adjoint of the Lindblad generator under the trace inner product.
Matrix chi(const SystemModel& model, const Matrix& phi, double t, double u);

/// d pi / dt for the costate: the negative state-gradient of the extended
/// Pontryagin Hamiltonian,
///   d pi/dt = -[ chi(pi) + mu * sum_pairs( delta <chi(delta)>_rho
///                                          + <delta>_rho chi(delta) ) ]
/// summed over both the real and imaginary coherence operators of each pair.
/// Maps Hermitian pi to Hermitian output.
Matrix adjoint_rhs(const SystemModel& model, const Matrix& pi, const Matrix& rho, double mu,
                   std::span<const CoherencePair> pairs, double t, double u);

/// Classical RK4 over the grid with zero-order-hold control. Stored samples
/// are re-Hermitized and validated with trajectory tolerances.
StateTrajectory integrate_forward(const SystemModel& model, const DensityMatrix& rho0,
                                  const ControlGrid& grid);

/// RK4 backward from pi(tf) = 0. States at stage times are linearly
/// interpolated between the stored trajectory samples; mu_path holds one
/// multiplier sample per interval.
AdjointTrajectory integrate_backward(const SystemModel& model, const StateTrajectory& traj,
                                     std::span<const double> mu_path,
                                     std::span<const CoherencePair> pairs,
                                     const ControlGrid& grid);

}  // namespace qoc
