#include "qoc/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace qoc {

namespace {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

void require_finite(const Matrix& m, const char* what, int step) {
    if (!m.allFinite()) {
        std::ostringstream msg;
        msg << what << ": non-finite value at step " << step;
        throw NonFiniteIterate(msg.str());
    }
}

/// One classical RK4 step y(t) -> y(t + h); f(y, t) evaluates the derivative.
template <class Rhs>
Matrix rk4_step(const Matrix& y, double t, double h, Rhs&& f) {
    const Matrix k1 = f(y, t);
    const Matrix k2 = f(y + (0.5 * h) * k1, t + 0.5 * h);
    const Matrix k3 = f(y + (0.5 * h) * k2, t + 0.5 * h);
    const Matrix k4 = f(y + h * k3, t + h);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

ControlGrid::ControlGrid(double t0, double tf, std::vector<double> u)
    : t0_(t0), tf_(tf), u_(std::move(u)) {
    if (!(tf_ > t0_)) throw ValidationError("control grid requires tf > t0");
    if (u_.empty()) throw ValidationError("control grid requires at least one step");
    for (double v : u_)
        if (!std::isfinite(v)) throw ValidationError("control grid has non-finite samples");
}

ControlGrid::ControlGrid(double t0, double tf, int steps, double u_init)
    : ControlGrid(t0, tf, std::vector<double>(steps > 0 ? static_cast<std::size_t>(steps) : 0,
                                              u_init)) {}

Matrix hamiltonian(const SystemModel& model, double t, double u) {
    return model.h0 + u * model.hc_envelope(t);
}

Matrix lindblad_rhs(const SystemModel& model, const Matrix& rho, double t, double u) {
    const Matrix h = hamiltonian(model, t, u);
    return (-kI / model.hbar) * commutator(h, rho) + dissipator(model.channel, rho);
}

namespace {

/// The dissipative part of chi: dissipator + dissipator_l0 collapse to the
/// adjoint Lindblad superoperator sum_k gamma_k (L^dag phi L - 1/2 {L^dag L, phi}).
Matrix dissipator_adjoint(const DecoherenceChannel& channel, const Matrix& phi) {
    Matrix out = Matrix::Zero(phi.rows(), phi.cols());
    for (std::size_t k = 0; k < channel.size(); ++k) {
        const Matrix& l = channel.ops()[k];
        const Matrix& ldl = channel.dagger_products()[k];
        out += channel.rates()[k] * (l.adjoint() * phi * l - 0.5 * (ldl * phi + phi * ldl));
    }
    return out;
}

Matrix chi_with_hamiltonian(const SystemModel& model, const Matrix& phi, const Matrix& h) {
    return (-kI / model.hbar) * commutator(phi, h) + dissipator_adjoint(model.channel, phi);
}

/// Per-pair data reused across backward stages: the coherence operators and
/// the time-independent dissipative part of their chi images.
struct PairImages {
    Matrix re;
    Matrix im;
    Matrix diss_re;
    Matrix diss_im;
};

std::vector<PairImages> make_pair_images(const SystemModel& model,
                                         std::span<const CoherencePair> pairs) {
    std::vector<PairImages> images;
    images.reserve(pairs.size());
    for (const auto& p : pairs) {
        auto [re_op, im_op] = coherence_pair_ops(p, model.dim);
        Matrix diss_re = dissipator_adjoint(model.channel, re_op);
        Matrix diss_im = dissipator_adjoint(model.channel, im_op);
        images.push_back({std::move(re_op), std::move(im_op), std::move(diss_re),
                          std::move(diss_im)});
    }
    return images;
}

Matrix adjoint_rhs_with(const SystemModel& model, const std::vector<PairImages>& images,
                        const Matrix& pi, const Matrix& rho, double mu, const Matrix& h) {
    Matrix grad = chi_with_hamiltonian(model, pi.adjoint(), h);
    if (mu != 0.0) {
        const Complex scale = -kI / model.hbar;
        for (const auto& img : images) {
            const Matrix chi_re = scale * commutator(img.re, h) + img.diss_re;
            const Matrix chi_im = scale * commutator(img.im, h) + img.diss_im;
            grad += mu * (img.re * expectation(chi_re, rho).real() +
                          img.im * expectation(chi_im, rho).real() +
                          expectation(img.re, rho).real() * chi_re +
                          expectation(img.im, rho).real() * chi_im);
        }
    }
    return -grad;
}

}  // namespace

Matrix chi(const SystemModel& model, const Matrix& phi, double t, double u) {
    return chi_with_hamiltonian(model, phi, hamiltonian(model, t, u));
}

Matrix adjoint_rhs(const SystemModel& model, const Matrix& pi, const Matrix& rho, double mu,
                   std::span<const CoherencePair> pairs, double t, double u) {
    return adjoint_rhs_with(model, make_pair_images(model, pairs), pi, rho, mu,
                            hamiltonian(model, t, u));
}

StateTrajectory integrate_forward(const SystemModel& model, const DensityMatrix& rho0,
                                  const ControlGrid& grid) {
    const int n = grid.steps();
    const double dt = grid.dt();

    StateTrajectory traj;
    traj.times.reserve(static_cast<std::size_t>(n) + 1);
    traj.states.reserve(static_cast<std::size_t>(n) + 1);
    traj.times.push_back(grid.t0());
    traj.states.push_back(rho0);

    Matrix rho = rho0.matrix();
    for (int m = 0; m < n; ++m) {
        const double u = grid.u_at(m);
        rho = rk4_step(rho, grid.time_at(m), dt,
                       [&](const Matrix& y, double t) { return lindblad_rhs(model, y, t, u); });
        require_finite(rho, "integrate_forward", m);
        rho = hermitize(rho);
        traj.times.push_back(grid.time_at(m + 1));
        traj.states.emplace_back(rho, trajectory_tolerance());
    }
    return traj;
}

AdjointTrajectory integrate_backward(const SystemModel& model, const StateTrajectory& traj,
                                     std::span<const double> mu_path,
                                     std::span<const CoherencePair> pairs,
                                     const ControlGrid& grid) {
    const int n = grid.steps();
    const double dt = grid.dt();
    if (traj.states.size() != static_cast<std::size_t>(n) + 1)
        throw DimensionMismatch("integrate_backward: trajectory does not match grid");
    if (mu_path.size() != static_cast<std::size_t>(n))
        throw DimensionMismatch("integrate_backward: multiplier path does not match grid");

    AdjointTrajectory adj;
    adj.times.assign(traj.times.begin(), traj.times.end());
    adj.costates.assign(static_cast<std::size_t>(n) + 1,
                        Matrix::Zero(model.dim, model.dim));

    const std::vector<PairImages> images = make_pair_images(model, pairs);
    Matrix pi = Matrix::Zero(model.dim, model.dim);
    for (int m = n - 1; m >= 0; --m) {
        const double t_left = grid.time_at(m);
        const double u = grid.u_at(m);
        const double mu = mu_path[static_cast<std::size_t>(m)];
        const Matrix& rho_left = traj.states[static_cast<std::size_t>(m)].matrix();
        const Matrix& rho_right = traj.states[static_cast<std::size_t>(m) + 1].matrix();
        // rho at stage times by linear interpolation of the stored samples.
        auto rhs = [&](const Matrix& y, double t) {
            const double s = (t - t_left) / dt;
            const Matrix rho = (1.0 - s) * rho_left + s * rho_right;
            return adjoint_rhs_with(model, images, y, rho, mu, hamiltonian(model, t, u));
        };
        pi = rk4_step(pi, grid.time_at(m + 1), -dt, rhs);
        require_finite(pi, "integrate_backward", m);
        pi = hermitize(pi);
        adj.costates[static_cast<std::size_t>(m)] = pi;
    }
    return adj;
}

}  // namespace qoc
