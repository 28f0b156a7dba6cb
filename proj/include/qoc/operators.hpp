// Complex-matrix quantum algebra: density matrices, coherence operators and
// measures, Lindblad superoperators, and the weight operator entering the
// extended Pontryagin Hamiltonian.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qoc/types.hpp"

namespace qoc {

/// Index pair (j, k), j < k, selecting one off-diagonal coherence.
struct CoherencePair {
    Index j = 0;
    Index k = 1;
};

/// All pairs j < k for an N-level system, row-major order.
std::vector<CoherencePair> all_pairs(Index dim);

/// Tolerances applied when validating a density matrix.
struct DensityTolerance {
    double hermiticity = 1e-10;
    double trace = 1e-8;
    double psd_floor = -1e-8;
};

/// Tolerances for freshly constructed states.
constexpr DensityTolerance construction_tolerance() { return {1e-10, 1e-8, -1e-8}; }

/// Looser trace/PSD budget for states stored along integrated trajectories,
/// where fixed-step round-off accumulates.
constexpr DensityTolerance trajectory_tolerance() { return {1e-10, 1e-6, -1e-6}; }

/// A validated quantum state: Hermitian, unit-trace, positive-semidefinite
/// complex square matrix. Immutable after construction.
class DensityMatrix {
  public:
    explicit DensityMatrix(Matrix data,
                           const DensityTolerance& tol = construction_tolerance());

    const Matrix& matrix() const { return data_; }
    Index dim() const { return data_.rows(); }

  private:
    Matrix data_;
};

/// Decoherence channel: Lindblad operators with their non-negative rates.
/// Immutable after construction; the products L_k^dag L_k are cached.
class DecoherenceChannel {
  public:
    DecoherenceChannel() = default;
    DecoherenceChannel(std::vector<Matrix> ops, std::vector<double> rates);

    std::size_t size() const { return ops_.size(); }
    const std::vector<Matrix>& ops() const { return ops_; }
    const std::vector<double>& rates() const { return rates_; }
    /// Cached L_k^dag L_k factors.
    const std::vector<Matrix>& dagger_products() const { return ldl_; }

  private:
    std::vector<Matrix> ops_;
    std::vector<double> rates_;
    std::vector<Matrix> ldl_;
};

/// Coherence constraint band alpha <= C^2(rho) <= beta over selected pairs.
struct ConstraintSpec {
    double alpha = 0.0;
    double beta = 1.0;
    std::vector<CoherencePair> pairs;

    ConstraintSpec() = default;
    ConstraintSpec(double alpha_, double beta_, std::vector<CoherencePair> pairs_);
};

/// AB - BA. Throws DimensionMismatch unless both are square of equal size.
Matrix commutator(const Matrix& a, const Matrix& b);

/// Tr(rho * op).
Complex expectation(const Matrix& op, const DensityMatrix& rho);
Complex expectation(const Matrix& op, const Matrix& rho);

/// The Hermitian pair (delta_re, delta_im) for states |j>, |k|:
/// delta_re = |j><k| + |k><j|, delta_im = -i|j><k| + i|k><j|.
std::pair<Matrix, Matrix> coherence_pair_ops(const CoherencePair& pair, Index dim);

/// C^2(rho) = sum over pairs of <delta_re>^2 + <delta_im>^2 = 4 sum |rho_jk|^2.
double coherence_squared(const DensityMatrix& rho, std::span<const CoherencePair> pairs);
double coherence_squared(const Matrix& rho, std::span<const CoherencePair> pairs);

/// C(rho) = sqrt(C^2). Defaults to all pairs j < k when none are given.
double coherence(const DensityMatrix& rho, std::span<const CoherencePair> pairs);
double coherence(const DensityMatrix& rho);

/// Dissipator sum_k gamma_k (L rho L^dag - 1/2 {L^dag L, rho}). Trace-free,
/// Hermiticity-preserving.
Matrix dissipator(const DecoherenceChannel& channel, const Matrix& rho);

/// The companion superoperator sum_k gamma_k (L^dag phi L - L phi L^dag)
/// appearing in the adjoint dynamics.
Matrix dissipator_l0(const DecoherenceChannel& channel, const Matrix& phi);

/// Dissipator applied to the identity, sum_k gamma_k [L_k, L_k^dag].
/// Zero iff the channel is unital (all L_k Hermitian).
Matrix unital_defect(const DecoherenceChannel& channel);

/// W(rho) = sum over pairs of <delta_re> delta_re + <delta_im> delta_im;
/// Hermitian, traceless, equal to half the gradient of C^2 with respect to rho.
Matrix weight_operator(const DensityMatrix& rho, std::span<const CoherencePair> pairs);
Matrix weight_operator(const Matrix& rho, std::span<const CoherencePair> pairs);

}  // namespace qoc
