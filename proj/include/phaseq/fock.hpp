#ifndef PHASEQ_FOCK_HPP
#define PHASEQ_FOCK_HPP

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "phaseq/errors.hpp"

namespace phaseq {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;

/// Dense operator on a truncated number basis of dimension `dim`.
/// Carries hbar so that operators from different unit conventions
/// cannot be combined silently.
struct FockOperator {
    int    dim  = 0;
    double hbar = 1.0;
    Matrix entries;

    FockOperator() = default;
    FockOperator(int d, double hb) : dim(d), hbar(hb), entries(Matrix::Zero(d, d)) {
        if (d < 2) throw ContractError("FockOperator: dim must be >= 2");
        if (!(hb > 0)) throw ContractError("FockOperator: hbar must be positive");
    }
    FockOperator(Matrix m, double hb)
        : dim(static_cast<int>(m.rows())), hbar(hb), entries(std::move(m)) {
        if (entries.rows() != entries.cols() || dim < 2)
            throw ContractError("FockOperator: entries must be square, dim >= 2");
        if (!(hb > 0)) throw ContractError("FockOperator: hbar must be positive");
    }

    FockOperator dagger() const { return {entries.adjoint().eval(), hbar}; }

    /// max |entry| over the leading k x k block (whole matrix if k <= 0).
    double max_abs(int k = 0) const {
        if (k <= 0 || k > dim) k = dim;
        return entries.topLeftCorner(k, k).cwiseAbs().maxCoeff();
    }

    bool is_hermitian(double tol = 1e-12) const {
        return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }
};

/// Complex vector in the truncated number basis.
struct StateVector {
    int    dim = 0;
    Vector entries;

    StateVector() = default;
    explicit StateVector(Vector v) : dim(static_cast<int>(v.size())), entries(std::move(v)) {
        if (dim < 2) throw ContractError("StateVector: dim must be >= 2");
    }

    double norm() const { return entries.norm(); }
    bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }

    /// Number-ground state |0>.
    static StateVector ground(int dim) {
        Vector v = Vector::Zero(dim);
        v(0) = 1.0;
        return StateVector(std::move(v));
    }
    /// Number state |n>.
    static StateVector number(int dim, int n) {
        if (n < 0 || n >= dim) throw ContractError("StateVector::number: n out of range");
        Vector v = Vector::Zero(dim);
        v(n) = 1.0;
        return StateVector(std::move(v));
    }
};

/// Sub-block on which truncated-space identities are asserted.
/// Default margin is dim/4.
inline int trust_dim(int dim, int margin = -1) {
    if (margin < 0) margin = dim / 4;
    int t = dim - margin;
    return t < 2 ? 2 : t;
}

inline void check_compatible(const FockOperator& a, const FockOperator& b) {
    if (a.dim != b.dim) throw ContractError("operator dimensions differ");
    if (a.hbar != b.hbar) throw ContractError("operators carry different hbar");
}
inline void check_compatible(const FockOperator& a, const StateVector& v) {
    if (a.dim != v.dim) throw ContractError("operator/state dimensions differ");
}

/// Annihilation and creation operators: A[n-1,n] = sqrt(n).
std::pair<FockOperator, FockOperator> build_ladder(int dim, double hbar = 1.0);

/// Canonical pair Q = sqrt(hbar/2)(A+A'), P = -i sqrt(hbar/2)(A-A'),
/// so that (Q+iP)|0> = 0 exactly and [Q,P] = i hbar on the trusted block.
std::pair<FockOperator, FockOperator> build_canonical(int dim, double hbar);

/// Matrix exponential. Hermitian and anti-Hermitian inputs go through an
/// eigendecomposition; everything else through scaling-and-squaring Pade.
FockOperator expm(const FockOperator& m);

struct EighResult {
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix          eigenvectors; // orthonormal columns
};

/// Hermitian eigensolver; throws ContractError on non-Hermitian input.
EighResult eigh(const FockOperator& h);

/// Eigensolve of the leading principal block. Truncation corrupts the last
/// rows of operator products, so physical spectra are read off the trusted
/// sub-block (default trust_dim).
EighResult eigh_block(const FockOperator& h, int block = -1);

/// psi(T) = exp(-i H T / hbar) psi0 for Hermitian H.
StateVector schrodinger_evolve(const StateVector& psi0, const FockOperator& h, double t);

/// X(T) = exp(+i H T / hbar) X0 exp(-i H T / hbar) for Hermitian H.
FockOperator heisenberg_evolve(const FockOperator& x0, const FockOperator& h, double t);

} // namespace phaseq

#endif
