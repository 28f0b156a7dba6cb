#include "qoc/operators.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qoc {

namespace {

void require_square_same(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << a.rows() << "x" << a.cols() << " vs "
            << b.rows() << "x" << b.cols() << ")";
        throw DimensionMismatch(msg.str());
    }
}

}  // namespace

std::vector<CoherencePair> all_pairs(Index dim) {
    std::vector<CoherencePair> pairs;
    pairs.reserve(static_cast<std::size_t>(dim * (dim - 1) / 2));
    for (Index j = 0; j < dim; ++j)
        for (Index k = j + 1; k < dim; ++k) pairs.push_back({j, k});
    return pairs;
}

DensityMatrix::DensityMatrix(Matrix data, const DensityTolerance& tol) : data_(std::move(data)) {
    if (data_.rows() != data_.cols() || data_.rows() < 1)
        throw ValidationError("density matrix must be square and non-empty");
    if (!data_.allFinite()) throw ValidationError("density matrix has non-finite entries");
    const double herm = hermiticity_defect(data_);
    if (herm > tol.hermiticity) {
        std::ostringstream msg;
        msg << "density matrix not Hermitian: defect " << herm << " > " << tol.hermiticity;
        throw ValidationError(msg.str());
    }
    const double trace_err = std::abs(data_.trace() - Complex{1.0, 0.0});
    if (trace_err > tol.trace) {
        std::ostringstream msg;
        msg << "density matrix trace deviates from 1 by " << trace_err << " > " << tol.trace;
        throw ValidationError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eigs(0.5 * (data_ + data_.adjoint()),
                                               Eigen::EigenvaluesOnly);
    const double min_eig = eigs.eigenvalues().minCoeff();
    if (min_eig < tol.psd_floor) {
        std::ostringstream msg;
        msg << "density matrix not positive semidefinite: min eigenvalue " << min_eig;
        throw ValidationError(msg.str());
    }
}

DecoherenceChannel::DecoherenceChannel(std::vector<Matrix> ops, std::vector<double> rates)
    : ops_(std::move(ops)), rates_(std::move(rates)) {
    if (ops_.size() != rates_.size())
        throw ValidationError("decoherence channel: operator and rate counts differ");
    ldl_.reserve(ops_.size());
    for (std::size_t k = 0; k < ops_.size(); ++k) {
        if (ops_[k].rows() != ops_[k].cols())
            throw ValidationError("decoherence channel: operators must be square");
        if (ops_[k].rows() != ops_[0].rows())
            throw ValidationError("decoherence channel: operators must share one dimension");
        if (!(rates_[k] >= 0.0))
            throw ValidationError("decoherence channel: rates must be non-negative");
        ldl_.push_back(ops_[k].adjoint() * ops_[k]);
    }
}

ConstraintSpec::ConstraintSpec(double alpha_, double beta_, std::vector<CoherencePair> pairs_)
    : alpha(alpha_), beta(beta_), pairs(std::move(pairs_)) {
    if (!(alpha >= 0.0) || !(alpha < beta)) {
        std::ostringstream msg;
        msg << "constraint bounds require 0 <= alpha < beta, got alpha=" << alpha
            << " beta=" << beta;
        throw ValidationError(msg.str());
    }
}

Matrix commutator(const Matrix& a, const Matrix& b) {
    require_square_same(a, b, "commutator");
    return a * b - b * a;
}

Complex expectation(const Matrix& op, const Matrix& rho) {
    require_square_same(op, rho, "expectation");
    return (rho * op).trace();
}

Complex expectation(const Matrix& op, const DensityMatrix& rho) {
    return expectation(op, rho.matrix());
}

std::pair<Matrix, Matrix> coherence_pair_ops(const CoherencePair& pair, Index dim) {
    if (!(pair.j >= 0 && pair.j < pair.k && pair.k < dim)) {
        std::ostringstream msg;
        msg << "coherence pair (" << pair.j << "," << pair.k << ") out of range for dim " << dim;
        throw ValidationError(msg.str());
    }
    Matrix re = Matrix::Zero(dim, dim);
    Matrix im = Matrix::Zero(dim, dim);
    re(pair.j, pair.k) = 1.0;
    re(pair.k, pair.j) = 1.0;
    im(pair.j, pair.k) = -kI;
    im(pair.k, pair.j) = kI;
    return {std::move(re), std::move(im)};
}

double coherence_squared(const Matrix& rho, std::span<const CoherencePair> pairs) {
    double total = 0.0;
    const Index dim = rho.rows();
    for (const auto& p : pairs) {
        if (!(p.j >= 0 && p.j < p.k && p.k < dim))
            throw ValidationError("coherence pair out of range");
        // <delta_re> = 2 Re rho_jk, <delta_im> = -2 Im rho_jk for Hermitian rho.
        const auto [re_op, im_op] = coherence_pair_ops(p, dim);
        const double ev_re = expectation(re_op, rho).real();
        const double ev_im = expectation(im_op, rho).real();
        total += ev_re * ev_re + ev_im * ev_im;
    }
    return total;
}

double coherence_squared(const DensityMatrix& rho, std::span<const CoherencePair> pairs) {
    return coherence_squared(rho.matrix(), pairs);
}

double coherence(const DensityMatrix& rho, std::span<const CoherencePair> pairs) {
    return std::sqrt(coherence_squared(rho, pairs));
}

double coherence(const DensityMatrix& rho) {
    const auto pairs = all_pairs(rho.dim());
    return coherence(rho, pairs);
}

Matrix dissipator(const DecoherenceChannel& channel, const Matrix& rho) {
    if (rho.rows() != rho.cols()) throw DimensionMismatch("dissipator: state must be square");
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (std::size_t k = 0; k < channel.size(); ++k) {
        const Matrix& l = channel.ops()[k];
        require_square_same(l, rho, "dissipator");
        const Matrix& ldl = channel.dagger_products()[k];
        out += channel.rates()[k] * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
    }
    return out;
}

Matrix dissipator_l0(const DecoherenceChannel& channel, const Matrix& phi) {
    if (phi.rows() != phi.cols()) throw DimensionMismatch("dissipator_l0: input must be square");
    Matrix out = Matrix::Zero(phi.rows(), phi.cols());
    for (std::size_t k = 0; k < channel.size(); ++k) {
        const Matrix& l = channel.ops()[k];
        require_square_same(l, phi, "dissipator_l0");
        out += channel.rates()[k] * (l.adjoint() * phi * l - l * phi * l.adjoint());
    }
    return out;
}

Matrix unital_defect(const DecoherenceChannel& channel) {
    if (channel.size() == 0) return Matrix::Zero(0, 0);
    const Index dim = channel.ops()[0].rows();
    return dissipator(channel, Matrix::Identity(dim, dim));
}

Matrix weight_operator(const Matrix& rho, std::span<const CoherencePair> pairs) {
    const Index dim = rho.rows();
    Matrix w = Matrix::Zero(dim, dim);
    for (const auto& p : pairs) {
        const auto [re_op, im_op] = coherence_pair_ops(p, dim);
        w += expectation(re_op, rho).real() * re_op + expectation(im_op, rho).real() * im_op;
    }
    return w;
}

Matrix weight_operator(const DensityMatrix& rho, std::span<const CoherencePair> pairs) {
    return weight_operator(rho.matrix(), pairs);
}

}  // namespace qoc
