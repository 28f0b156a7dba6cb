// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit status is the number of
// failed criteria.
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qoc/models.hpp"
#include "qoc/pmp.hpp"
#include "qoc/run.hpp"

using namespace qoc;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& label, const std::string& detail) {
    std::printf("criterion %2d [%s] %s (%s)\n", id, pass ? "PASS" : "FAIL", label.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

SystemModel toy_model() {
    SystemModel model;
    model.dim = 2;
    Matrix h0(2, 2);
    h0 << Complex{0.5, 0.0}, Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{-0.3, 0.0};
    model.h0 = h0;
    Matrix sigma_x(2, 2);
    sigma_x << Complex{0.0, 0.0}, Complex{1.0, 0.0}, Complex{1.0, 0.0}, Complex{0.0, 0.0};
    model.hc_envelope = [sigma_x](double t) -> Matrix { return sigma_x * std::cos(0.3 * t); };
    Matrix lower(2, 2);
    lower << Complex{0.0, 0.0}, Complex{1.0, 0.0}, Complex{0.0, 0.0}, Complex{0.0, 0.0};
    Matrix sigma_z(2, 2);
    sigma_z << Complex{1.0, 0.0}, Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{-1.0, 0.0};
    model.channel = DecoherenceChannel({lower, sigma_z}, {0.25, 0.1});
    return model;
}

DensityMatrix toy_state() {
    Matrix rho(2, 2);
    rho << Complex{0.65, 0.0}, Complex{0.15, -0.1}, Complex{0.15, 0.1}, Complex{0.35, 0.0};
    return DensityMatrix(rho);
}

Matrix random_hermitian(std::mt19937& gen, Index dim) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) m(i, j) = Complex{dist(gen), dist(gen)};
    return 0.5 * (m + m.adjoint());
}

DensityMatrix random_density(std::mt19937& gen, Index dim) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix g(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = Complex{dist(gen), dist(gen)};
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

}  // namespace

int main() {
    const ExperimentConfig cfg = default_experiment();
    const SystemModel qutrit = build_qutrit(cfg.qutrit);
    const DensityMatrix rho0(cfg.rho0);
    std::mt19937 gen(0xacce97u);

    // 1. Initial coherence of the reference state.
    {
        const double c0 = coherence(rho0, cfg.pairs);
        report(1, std::abs(c0 - 0.5515) <= 5e-4, "initial coherence",
               fmt("C(rho0) = %.6f, target 0.5515 +- 5e-4", c0));
    }

    // Shared free-decay run at the default resolution and at half step.
    const StateTrajectory free_run =
        integrate_forward(qutrit, rho0, ControlGrid(cfg.t0, cfg.tf, cfg.steps, 0.0));
    const StateTrajectory free_run_fine =
        integrate_forward(qutrit, rho0, ControlGrid(cfg.t0, cfg.tf, 2 * cfg.steps, 0.0));

    // 2. Free-decay dephasing factor.
    {
        const double ratio = coherence(free_run.states.back(), cfg.pairs) /
                             coherence(free_run.states.front(), cfg.pairs);
        const double target = std::exp(-0.2);
        report(2, std::abs(ratio - target) <= 2e-3, "free-decay dephasing factor",
               fmt("C(T)/C(0) = %.6f, target e^-0.2 = %.6f +- 2e-3", ratio, target));
    }

    // 3. Trace and Hermiticity conservation along the forward run.
    {
        double max_trace = 0.0;
        double max_herm = 0.0;
        for (const auto& state : free_run.states) {
            max_trace = std::max(max_trace,
                                 std::abs(state.matrix().trace() - Complex{1.0, 0.0}));
            max_herm = std::max(max_herm, hermiticity_defect(state.matrix()));
        }
        report(3, max_trace <= 1e-6 && max_herm <= 1e-10, "trace/Hermiticity conservation",
               fmt("max |Tr-1| = %.2e (<=1e-6), max Hermiticity drift = %.2e (<=1e-10)",
                   max_trace, max_herm));
    }

    // 4. Non-unitality of the decoherence channel.
    {
        const Matrix defect = unital_defect(qutrit.channel);
        Matrix expected = Matrix::Zero(3, 3);
        expected(0, 0) = 0.1;
        expected(1, 1) = 0.001;
        expected(2, 2) = -0.101;
        const double dev = max_abs(defect - expected);
        const bool nonzero = max_abs(defect) > 1e-6;

        DecoherenceChannel hermitian_channel({random_hermitian(gen, 3), random_hermitian(gen, 3)},
                                             {0.7, 1.3});
        const double herm_defect = max_abs(unital_defect(hermitian_channel));
        report(4, dev <= 1e-14 && nonzero && herm_defect <= 1e-14, "non-unital channel",
               fmt("defect diag dev = %.2e (<=1e-14), Hermitian-channel defect = %.2e", dev,
                   herm_defect));
    }

    // 5. Quadratic curvature of the Pontryagin Hamiltonian in the control.
    {
        const SystemModel toy = toy_model();
        const std::vector<CoherencePair> pair01{{0, 1}};
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const DensityMatrix rho = random_density(gen, 2);
            const Matrix pi = random_hermitian(gen, 2);
            const double mu = dist(gen);
            const double t = 5.0 * dist(gen);
            const double u = dist(gen);
            const double h = 0.5;
            const double second =
                (pontryagin_hamiltonian(toy, rho, pi, u + h, mu, pair01, t) -
                 2.0 * pontryagin_hamiltonian(toy, rho, pi, u, mu, pair01, t) +
                 pontryagin_hamiltonian(toy, rho, pi, u - h, mu, pair01, t)) /
                (h * h);
            worst = std::max(worst, std::abs(second - 2.0));
        }
        report(5, worst <= 1e-10, "Hamiltonian curvature in u",
               fmt("max |d2H/du2 - 2| = %.2e over 100 random tuples (<=1e-10)", worst));
    }

    // 6. Stationarity residual against finite differences and its root.
    {
        const SystemModel toy = toy_model();
        const std::vector<CoherencePair> pair01{{0, 1}};
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        double worst_fd = 0.0;
        double worst_root = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const DensityMatrix rho = random_density(gen, 2);
            const Matrix pi = random_hermitian(gen, 2);
            const double mu = dist(gen);
            const double t = 5.0 * dist(gen);
            const double u = dist(gen);
            const double h = 1e-3;
            const double fd = (pontryagin_hamiltonian(toy, rho, pi, u + h, mu, pair01, t) -
                               pontryagin_hamiltonian(toy, rho, pi, u - h, mu, pair01, t)) /
                              (2.0 * h);
            const double residual = stationarity_residual(toy, rho, pi, mu, pair01, t, u);
            worst_fd = std::max(worst_fd, std::abs(residual - fd));
            const double u_star = stationary_control(toy, rho, pi, mu, pair01, t);
            worst_root = std::max(
                worst_root, std::abs(stationarity_residual(toy, rho, pi, mu, pair01, t, u_star)));
        }
        report(6, worst_fd <= 1e-8 && worst_root <= 1e-12, "stationarity consistency",
               fmt("max |residual - fd| = %.2e (<=1e-8), max |residual(u*)| = %.2e (<=1e-12)",
                   worst_fd, worst_root));
    }

    // 7. Adjoint gradient check on a two-level toy problem.
    {
        const SystemModel toy = toy_model();
        const DensityMatrix rho_toy = toy_state();
        const std::vector<CoherencePair> pair01{{0, 1}};
        const int steps = 10;
        ControlGrid grid(0.0, 1.0, steps, 0.0);
        std::vector<double> u(steps);
        for (int m = 0; m < steps; ++m) u[static_cast<std::size_t>(m)] = 0.3 * std::cos(1.0 * m);
        grid = grid.with_controls(u);
        const std::vector<double> mu(steps, 0.0);

        const StateTrajectory traj = integrate_forward(toy, rho_toy, grid);
        const AdjointTrajectory adj = integrate_backward(toy, traj, mu, pair01, grid);

        const double dt = grid.dt();
        const double h = 1e-6;
        double max_gradient = 0.0;
        std::vector<double> residuals(static_cast<std::size_t>(steps));
        std::vector<double> oracles(static_cast<std::size_t>(steps));
        for (int m = 0; m < steps; ++m) {
            const auto idx = static_cast<std::size_t>(m);
            residuals[idx] = stationarity_residual(toy, traj.states[idx], adj.costates[idx], 0.0,
                                                   pair01, grid.time_at(m), grid.u_at(m)) *
                             dt;
            max_gradient = std::max(max_gradient, std::abs(residuals[idx]));
            auto cost_with = [&](double du) {
                std::vector<double> u_mod = grid.u();
                u_mod[idx] += du;
                return cost(grid.with_controls(u_mod));
            };
            oracles[idx] = (cost_with(h) - cost_with(-h)) / (2.0 * h);
        }
        double worst = 0.0;
        for (int m = 0; m < steps; ++m)
            worst = std::max(worst, std::abs(residuals[static_cast<std::size_t>(m)] -
                                             oracles[static_cast<std::size_t>(m)]));
        report(7, worst <= 1e-2 * max_gradient, "adjoint gradient check",
               fmt("max |adjoint - finite-difference| = %.2e, budget 1e-2 relative = %.2e",
                   worst, 1e-2 * max_gradient));
    }

    // 8. Feasibility identities along the constant-control run.
    {
        const ControlGrid grid(cfg.t0, cfg.tf, cfg.steps, cfg.u0);
        const StateTrajectory traj = integrate_forward(qutrit, rho0, grid);
        std::vector<double> csq;
        csq.reserve(traj.states.size());
        for (const auto& state : traj.states) csq.push_back(coherence_squared(state, cfg.pairs));

        double worst_fd = 0.0;
        const double dt = grid.dt();
        for (int m = 1; m < cfg.steps; ++m) {
            const auto idx = static_cast<std::size_t>(m);
            const double fd = (csq[idx + 1] - csq[idx - 1]) / (2.0 * dt);
            const auto [phi, delta] = phi_delta(qutrit, traj.states[idx], cfg.pairs,
                                                grid.time_at(m));
            worst_fd = std::max(worst_fd, std::abs(fd - (phi * cfg.u0 + delta)));
        }

        const auto [phi0, delta0] = phi_delta(qutrit, rho0, cfg.pairs, 0.0);
        const double u_b = boundary_control(qutrit, rho0, cfg.pairs, 0.0, 1e-10);
        const double hold_residual = std::abs(phi0 * u_b + delta0);

        bool singular_raised = false;
        Matrix diag = Matrix::Zero(3, 3);
        diag(0, 0) = 0.4;
        diag(1, 1) = 0.6;
        try {
            boundary_control(qutrit, DensityMatrix(diag), cfg.pairs, 0.0, 1e-10);
        } catch (const SingularControlDirection&) {
            singular_raised = true;
        }
        report(8, worst_fd <= 1e-4 && hold_residual <= 1e-12 && singular_raised,
               "feasibility identities",
               fmt("max |dC^2/dt - (Phi u + Delta)| = %.2e (<=1e-4), hold residual = %.2e, "
                   "singular raised = %s",
                   worst_fd, hold_residual, singular_raised ? "yes" : "no"));
    }

    // 9. Constrained solve with the default configuration.
    {
        const SweepResult result =
            sweep(qutrit, rho0, ControlGrid(cfg.t0, cfg.tf, cfg.steps, 0.0), cfg.solver_config());
        double c_min = 1e300;
        double c_max = -1e300;
        for (double c : result.coherence_path) {
            c_min = std::min(c_min, c);
            c_max = std::max(c_max, c);
        }
        const bool in_band = c_min >= cfg.alpha - 1e-3 && c_max <= cfg.beta + 1e-3;
        const bool terminal_zero = max_abs(result.adjoint.costates.back()) == 0.0;
        const bool history_drops = !result.convergence_history.empty() &&
                                   result.convergence_history.back() <
                                       result.convergence_history.front();
        const bool cost_finite = std::isfinite(result.cost);
        report(9, in_band && terminal_zero && history_drops && cost_finite, "constrained solve",
               fmt("C in [%.4f, %.4f] vs band [%.4f, %.4f] +- 1e-3, pi(tf)=0 %s, history "
                   "%.1e -> %.1e, J = %.4e",
                   c_min, c_max, cfg.alpha, cfg.beta, terminal_zero ? "yes" : "no",
                   result.convergence_history.empty() ? 0.0 : result.convergence_history.front(),
                   result.convergence_history.empty() ? 0.0 : result.convergence_history.back(),
                   result.cost));
    }

    // 10. Integrator order: halving the step barely moves the terminal coherence.
    {
        const double c_coarse = coherence(free_run.states.back(), cfg.pairs);
        const double c_fine = coherence(free_run_fine.states.back(), cfg.pairs);
        report(10, std::abs(c_coarse - c_fine) <= 1e-6, "integrator order",
               fmt("|C_dt(T) - C_dt/2(T)| = %.2e (<=1e-6)", std::abs(c_coarse - c_fine)));
    }

    if (g_failures == 0) std::printf("all acceptance criteria passed\n");
    else std::printf("%d acceptance criteria failed\n", g_failures);
    return g_failures;
}
