#include "qoc/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qoc {

namespace {

constexpr double kImagResidueTol = 1e-10;

double real_checked(Complex value, const char* what) {
    if (std::abs(value.imag()) > kImagResidueTol) {
        std::ostringstream msg;
        msg << what << ": imaginary residue " << value.imag() << " exceeds " << kImagResidueTol;
        throw NonFiniteIterate(msg.str());
    }
    return value.real();
}

}  // namespace

MultiplierPath MultiplierPath::zeros(int steps) {
    MultiplierPath path;
    path.mu1.assign(static_cast<std::size_t>(steps), 0.0);
    path.mu2.assign(static_cast<std::size_t>(steps), 0.0);
    path.mu.assign(static_cast<std::size_t>(steps), 0.0);
    return path;
}

void SolverConfig::validate() const {
    if (std::abs(zeta1 + zeta2 - 1.0) > 1e-12)
        throw ValidationError("solver config requires zeta1 + zeta2 = 1");
    if (!(zeta1 > 0.0 && zeta1 <= 1.0))
        throw ValidationError("solver config requires zeta1 in (0, 1]");
    if (!(eta_i > 0.0) || !(eta_d > 0.0))
        throw ValidationError("solver config requires positive learning rates");
    for (double tol : {eps_rho, eps_pi, eps_u, eps_mu, eps, eps_active, eps_phi})
        if (!(tol > 0.0)) throw ValidationError("solver config requires positive tolerances");
    if (max_iters < 0) throw ValidationError("solver config requires max_iters >= 0");
}

double cost(const ControlGrid& grid) {
    double sum = 0.0;
    for (double u : grid.u()) sum += u * u;
    return sum * grid.dt();
}

double pontryagin_hamiltonian(const SystemModel& model, const DensityMatrix& rho,
                              const Matrix& pi, double u, double mu,
                              std::span<const CoherencePair> pairs, double t) {
    const Matrix weight = pi + mu * weight_operator(rho, pairs);
    const Matrix flow = lindblad_rhs(model, rho.matrix(), t, u);
    const Complex trace = (weight.adjoint() * flow).trace();
    return real_checked(trace, "pontryagin_hamiltonian") + u * u;
}

double stationarity_residual(const SystemModel& model, const DensityMatrix& rho,
                             const Matrix& pi, double mu,
                             std::span<const CoherencePair> pairs, double t, double u) {
    const Matrix weight = pi + mu * weight_operator(rho, pairs);
    const Matrix response = commutator(model.hc_envelope(t), rho.matrix());
    const Complex trace = (weight.adjoint() * response).trace() * (-kI / model.hbar);
    return real_checked(trace, "stationarity_residual") + 2.0 * u;
}

double stationary_control(const SystemModel& model, const DensityMatrix& rho, const Matrix& pi,
                          double mu, std::span<const CoherencePair> pairs, double t) {
    const Matrix weight = pi + mu * weight_operator(rho, pairs);
    const Matrix response = commutator(model.hc_envelope(t), rho.matrix());
    const Complex trace = (weight.adjoint() * response).trace() * (kI / (2.0 * model.hbar));
    return real_checked(trace, "stationary_control");
}

std::pair<double, double> phi_delta(const SystemModel& model, const DensityMatrix& rho,
                                    std::span<const CoherencePair> pairs, double t) {
    const Matrix hc = model.hc_envelope(t);
    const Matrix diss = dissipator(model.channel, rho.matrix());
    Complex phi{0.0, 0.0};
    Complex delta{0.0, 0.0};
    for (const auto& p : pairs) {
        const auto [re_op, im_op] = coherence_pair_ops(p, rho.dim());
        const double ev_re = expectation(re_op, rho).real();
        const double ev_im = expectation(im_op, rho).real();
        phi += ev_re * expectation(commutator(re_op, hc), rho) +
               ev_im * expectation(commutator(im_op, hc), rho);
        delta += ev_re * ((-kI * commutator(re_op, model.h0) * rho.matrix()).trace() +
                          (re_op * diss).trace()) +
                 ev_im * ((-kI * commutator(im_op, model.h0) * rho.matrix()).trace() +
                          (im_op * diss).trace());
    }
    phi *= Complex{0.0, -2.0};
    delta *= 2.0;
    return {real_checked(phi, "phi_delta: Phi"), real_checked(delta, "phi_delta: Delta")};
}

double boundary_control(const SystemModel& model, const DensityMatrix& rho,
                        std::span<const CoherencePair> pairs, double t, double eps_phi) {
    const auto [phi, delta] = phi_delta(model, rho, pairs, t);
    if (std::abs(phi) < eps_phi) {
        std::ostringstream msg;
        msg << "boundary control undefined: |Phi| = " << std::abs(phi) << " < " << eps_phi
            << " (control Hamiltonian does not move the constrained coherence here)";
        throw SingularControlDirection(msg.str());
    }
    return -delta / phi;
}

MultiplierPath update_multipliers(std::span<const double> coherence_sq_path,
                                  const MultiplierPath& prev, const SolverConfig& cfg) {
    const std::size_t steps = prev.mu1.size();
    if (coherence_sq_path.size() != steps + 1)
        throw DimensionMismatch("update_multipliers: coherence path does not match grid");

    // A single pass along the grid carries running increments: an interval
    // at a bound adds eta times the local change of C^2, an interior
    // interval carries the running values forward unchanged. Under
    // warm_start the pass accumulates on top of the previous iteration's
    // path; under zero the pass alone is the answer.
    MultiplierPath next = MultiplierPath::zeros(static_cast<int>(steps));
    double running1 = 0.0;
    double running2 = 0.0;
    for (std::size_t m = 0; m < steps; ++m) {
        const double csq = coherence_sq_path[m];
        const double dcsq = (m == 0) ? 0.0 : csq - coherence_sq_path[m - 1];
        if (csq >= cfg.constraint.beta - cfg.eps_active) running1 += cfg.eta_i * dcsq;
        if (csq <= cfg.constraint.alpha + cfg.eps_active) running2 -= cfg.eta_d * dcsq;
        const double base1 = (cfg.reset == MultiplierReset::warm_start) ? prev.mu1[m] : 0.0;
        const double base2 = (cfg.reset == MultiplierReset::warm_start) ? prev.mu2[m] : 0.0;
        const double mu1 = std::max(0.0, base1 + running1);
        const double mu2 = std::max(0.0, base2 + running2);
        next.mu1[m] = mu1;
        next.mu2[m] = mu2;
        next.mu[m] = 2.0 * (mu1 - mu2);
    }
    return next;
}

namespace {

/// Component-wise maxima of the iterate differences: state, costate,
/// control, multiplier.
struct IterateDelta {
    double rho = 0.0;
    double pi = 0.0;
    double u = 0.0;
    double mu = 0.0;

    double composite() const { return std::max(std::max(rho, pi), std::max(u, mu)); }
};

IterateDelta iterate_delta(const SweepIterate& prev, const SweepIterate& curr) {
    if (prev.states.size() != curr.states.size() || prev.u.size() != curr.u.size() ||
        prev.mu.size() != curr.mu.size() || prev.costates.size() != curr.costates.size())
        throw DimensionMismatch("convergence_metric: iterates on different grids");
    IterateDelta d;
    for (std::size_t m = 0; m < prev.states.size(); ++m)
        d.rho = std::max(d.rho, max_abs(curr.states[m] - prev.states[m]));
    for (std::size_t m = 0; m < prev.costates.size(); ++m)
        d.pi = std::max(d.pi, max_abs(curr.costates[m] - prev.costates[m]));
    for (std::size_t m = 0; m < prev.u.size(); ++m)
        d.u = std::max(d.u, std::abs(curr.u[m] - prev.u[m]));
    for (std::size_t m = 0; m < prev.mu.size(); ++m)
        d.mu = std::max(d.mu, std::abs(curr.mu[m] - prev.mu[m]));
    return d;
}

}  // namespace

double convergence_metric(const SweepIterate& prev, const SweepIterate& curr) {
    return iterate_delta(prev, curr).composite();
}

namespace {

std::vector<double> coherence_sq_samples(const StateTrajectory& traj,
                                         std::span<const CoherencePair> pairs) {
    std::vector<double> csq;
    csq.reserve(traj.states.size());
    for (const auto& rho : traj.states) csq.push_back(coherence_squared(rho, pairs));
    return csq;
}

SweepIterate make_iterate(const StateTrajectory& traj, const AdjointTrajectory& adj,
                          const std::vector<double>& u, const std::vector<double>& mu) {
    SweepIterate it;
    it.states.reserve(traj.states.size());
    for (const auto& rho : traj.states) it.states.push_back(rho.matrix());
    it.costates = adj.costates;
    it.u = u;
    it.mu = mu;
    return it;
}

}  // namespace

SweepResult sweep(const SystemModel& model, const DensityMatrix& rho0, const ControlGrid& grid0,
                  const SolverConfig& cfg) {
    cfg.validate();
    const auto pairs = std::span<const CoherencePair>(cfg.constraint.pairs);
    const int n = grid0.steps();

    const double csq0 = coherence_squared(rho0, pairs);
    if (csq0 < cfg.constraint.alpha || csq0 > cfg.constraint.beta) {
        std::ostringstream msg;
        msg << "infeasible start: C^2(rho0) = " << csq0 << " outside ["
            << cfg.constraint.alpha << ", " << cfg.constraint.beta << "]";
        throw InfeasibleStart(msg.str());
    }

    ControlGrid grid = grid0;
    MultiplierPath mu_path = MultiplierPath::zeros(n);
    StateTrajectory traj = integrate_forward(model, rho0, grid);
    AdjointTrajectory adj = integrate_backward(model, traj, mu_path.mu, pairs, grid);

    SweepResult result{std::move(traj), std::move(adj), grid, mu_path, 0.0, {}, {}, 0, false};

    if (cfg.max_iters > 0) {
        SweepIterate prev_iterate =
            make_iterate(result.trajectory, result.adjoint, grid.u(), mu_path.mu);
        for (int iter = 1; iter <= cfg.max_iters; ++iter) {
            const auto csq = coherence_sq_samples(result.trajectory, pairs);
            mu_path = update_multipliers(csq, mu_path, cfg);

            // Per-step Hamiltonian evaluation; doubles as a check that the
            // traces stay real.
            std::vector<double> u_next(static_cast<std::size_t>(n));
            for (int m = 0; m < n; ++m) {
                const auto& rho_m = result.trajectory.states[static_cast<std::size_t>(m)];
                const Matrix& pi_m = result.adjoint.costates[static_cast<std::size_t>(m)];
                const double mu_m = mu_path.mu[static_cast<std::size_t>(m)];
                const double t_m = grid.time_at(m);
                pontryagin_hamiltonian(model, rho_m, pi_m, grid.u_at(m), mu_m, pairs, t_m);
                const double u_star = stationary_control(model, rho_m, pi_m, mu_m, pairs, t_m);
                u_next[static_cast<std::size_t>(m)] = cfg.zeta1 * u_star + cfg.zeta2 * grid.u_at(m);
            }

            grid = grid.with_controls(std::move(u_next));
            result.trajectory = integrate_forward(model, rho0, grid);
            result.adjoint = integrate_backward(model, result.trajectory, mu_path.mu, pairs, grid);
            result.iterations = iter;

            SweepIterate curr_iterate =
                make_iterate(result.trajectory, result.adjoint, grid.u(), mu_path.mu);
            const IterateDelta delta = iterate_delta(prev_iterate, curr_iterate);
            result.convergence_history.push_back(delta.composite());
            prev_iterate = std::move(curr_iterate);

            if (delta.rho < cfg.eps_rho && delta.pi < cfg.eps_pi && delta.u < cfg.eps_u &&
                delta.mu < cfg.eps_mu && delta.composite() < cfg.eps) {
                result.converged = true;
                break;
            }
        }
    }

    result.controls = grid;
    result.multipliers = mu_path;
    result.cost = cost(grid);
    result.coherence_path.clear();
    result.coherence_path.reserve(result.trajectory.states.size());
    for (const auto& rho : result.trajectory.states)
        result.coherence_path.push_back(std::sqrt(coherence_squared(rho, pairs)));
    return result;
}

}  // namespace qoc
