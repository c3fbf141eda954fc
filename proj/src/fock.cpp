#include "phaseq/fock.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace phaseq {

std::pair<FockOperator, FockOperator> build_ladder(int dim, double hbar) {
    if (dim < 2) throw ContractError("build_ladder: dim must be >= 2");
    FockOperator a(dim, hbar);
    for (int n = 1; n < dim; ++n)
        a.entries(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {a, a.dagger()};
}

std::pair<FockOperator, FockOperator> build_canonical(int dim, double hbar) {
    if (dim < 2) throw ContractError("build_canonical: dim must be >= 2");
    if (!(hbar > 0)) throw ContractError("build_canonical: hbar must be positive");
    auto [a, ad] = build_ladder(dim, hbar);
    const double s = std::sqrt(hbar / 2.0);
    FockOperator q(dim, hbar), p(dim, hbar);
    q.entries = s * (a.entries + ad.entries);
    p.entries = Complex(0, -1) * s * (a.entries - ad.entries);
    return {q, p};
}

FockOperator expm(const FockOperator& m) {
    if (!m.entries.allFinite()) throw NumericError("expm: non-finite entries");
    const double scale = std::max(1.0, m.max_abs());
    const double tol = 1e-13 * scale;

    // Hermitian: exp through the spectral decomposition.
    if ((m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff() <= tol) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m.entries);
        Matrix r = es.eigenvectors() *
                   es.eigenvalues().array().exp().matrix().asDiagonal() *
                   es.eigenvectors().adjoint();
        return {std::move(r), m.hbar};
    }
    // Anti-Hermitian: m = iH with H Hermitian, exp(m) = V e^{i lambda} V'.
    if ((m.entries + m.entries.adjoint()).cwiseAbs().maxCoeff() <= tol) {
        Matrix h = Complex(0, -1) * m.entries;
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        Eigen::VectorXcd ph =
            (Complex(0, 1) * es.eigenvalues().cast<Complex>().array()).exp();
        Matrix r = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
        return {std::move(r), m.hbar};
    }
    return {m.entries.exp().eval(), m.hbar};
}

EighResult eigh(const FockOperator& h) {
    const double scale = std::max(1.0, h.max_abs());
    if (!h.is_hermitian(1e-10 * scale))
        throw ContractError("eigh: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es((h.entries + h.entries.adjoint()) / 2.0);
    return {es.eigenvalues(), es.eigenvectors()};
}

EighResult eigh_block(const FockOperator& h, int block) {
    if (block <= 0) block = trust_dim(h.dim);
    if (block > h.dim) block = h.dim;
    FockOperator sub{h.entries.topLeftCorner(block, block).eval(), h.hbar};
    return eigh(sub);
}

StateVector schrodinger_evolve(const StateVector& psi0, const FockOperator& h, double t) {
    check_compatible(h, psi0);
    auto es = eigh(h);
    Eigen::VectorXcd ph =
        (Complex(0, -t / h.hbar) * es.eigenvalues.cast<Complex>().array()).exp();
    Vector v = es.eigenvectors *
               (ph.asDiagonal() * (es.eigenvectors.adjoint() * psi0.entries));
    return StateVector(std::move(v));
}

FockOperator heisenberg_evolve(const FockOperator& x0, const FockOperator& h, double t) {
    check_compatible(x0, h);
    auto es = eigh(h);
    Eigen::VectorXcd ph =
        (Complex(0, t / h.hbar) * es.eigenvalues.cast<Complex>().array()).exp();
    Matrix u = es.eigenvectors * ph.asDiagonal() * es.eigenvectors.adjoint();
    return {(u * x0.entries * u.adjoint()).eval(), x0.hbar};
}

} // namespace phaseq
