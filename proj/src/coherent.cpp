#include "phaseq/coherent.hpp"

#include <cmath>
#include <vector>

#include "phaseq/detail/parallel.hpp"

namespace phaseq {

namespace {

Complex alpha_of(PhasePoint pt, double hbar) {
    return Complex(pt.q, pt.p) / std::sqrt(2.0 * hbar);
}

Eigen::VectorXcd number_phases(int dim, double phi) {
    Eigen::VectorXcd ph(dim);
    for (int n = 0; n < dim; ++n) ph(n) = std::polar(1.0, phi * n);
    return ph;
}

} // namespace

DisplacementEngine::DisplacementEngine(int dim, double hbar) : dim_(dim), hbar_(hbar) {
    if (dim < 2) throw ContractError("DisplacementEngine: dim must be >= 2");
    if (!(hbar > 0)) throw ContractError("DisplacementEngine: hbar must be positive");
    Matrix s = Matrix::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        double r = std::sqrt(n + 1.0);
        s(n, n + 1) = Complex(0, r);   // -i(A' - A)
        s(n + 1, n) = Complex(0, -r);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    lambda_ = es.eigenvalues();
    v_ = es.eigenvectors();
}

Vector DisplacementEngine::apply(const Vector& v, PhasePoint pt) const {
    if (v.size() != dim_) throw ContractError("DisplacementEngine::apply: size mismatch");
    if (!std::isfinite(pt.p) || !std::isfinite(pt.q))
        throw NumericError("DisplacementEngine::apply: non-finite phase point");
    const Complex al = alpha_of(pt, hbar_);
    const double r = std::abs(al);
    if (r < 1e-150) return v;
    const double phi = std::arg(al);
    Eigen::VectorXcd ph = number_phases(dim_, phi);
    Vector w = ph.conjugate().cwiseProduct(v);
    w = v_.adjoint() * w;
    for (int k = 0; k < dim_; ++k) w(k) *= std::polar(1.0, r * lambda_(k));
    w = v_ * w;
    return ph.cwiseProduct(w);
}

Matrix DisplacementEngine::unitary(PhasePoint pt) const {
    const Complex al = alpha_of(pt, hbar_);
    const double r = std::abs(al);
    if (r < 1e-150) return Matrix::Identity(dim_, dim_);
    const double phi = std::arg(al);
    Eigen::VectorXcd e(dim_);
    for (int k = 0; k < dim_; ++k) e(k) = std::polar(1.0, r * lambda_(k));
    Matrix m = v_ * e.asDiagonal() * v_.adjoint();
    Eigen::VectorXcd ph = number_phases(dim_, phi);
    return ph.asDiagonal() * m * ph.conjugate().asDiagonal();
}

int displacement_work_dim(int dim, double max_alpha2) {
    if (max_alpha2 < 0) max_alpha2 = 0;
    int extra = static_cast<int>(std::ceil(max_alpha2 + 10.0 * std::sqrt(max_alpha2 + 1.0))) + 20;
    return dim + extra;
}

Vector displaced_projected(const DisplacementEngine& eng, const Vector& fid_work,
                           PhasePoint pt, int out_dim, double* leak) {
    Vector w = eng.apply(fid_work, pt);
    Vector out = w.head(out_dim);
    if (leak) {
        double kept = out.squaredNorm();
        double total = w.squaredNorm();
        *leak = std::max(0.0, total - kept);
    }
    return out;
}

FockOperator displacement(PhasePoint pt, int dim, double hbar) {
    DisplacementEngine eng(dim, hbar);
    return {eng.unitary(pt), hbar};
}

CoherentFamily::CoherentFamily(StateVector fiducial, double hbar)
    : fiducial_(std::move(fiducial)), hbar_(hbar), engine_(fiducial_.dim, hbar) {
    double n = fiducial_.norm();
    if (std::abs(n - 1.0) > 1e-9)
        throw ContractError("CoherentFamily: fiducial must be normalized");
    fiducial_.entries /= n;
    auto [q, p] = build_canonical(fiducial_.dim, hbar_);
    Vector qe = q.entries * fiducial_.entries;
    Vector pe = p.entries * fiducial_.entries;
    mean_q_ = fiducial_.entries.dot(qe).real();
    mean_p_ = fiducial_.entries.dot(pe).real();
    Vector dq = qe - mean_q_ * fiducial_.entries;
    Vector dp = pe - mean_p_ * fiducial_.entries;
    var_q_ = dq.squaredNorm();
    var_p_ = dp.squaredNorm();
    cov_sym_ = 2.0 * dp.dot(dq).real();
}

StateVector CoherentFamily::state(PhasePoint pt, double* leaked_weight) const {
    Vector w = engine_.apply(fiducial_.entries, pt);
    if (leaked_weight) {
        double tail = 0.0;
        for (int n = trust(); n < dim(); ++n) tail += std::norm(w(n));
        *leaked_weight = tail;
    }
    return StateVector(std::move(w));
}

Complex CoherentFamily::overlap(PhasePoint a, PhasePoint b) const {
    StateVector sa = state(a);
    StateVector sb = state(b);
    return sa.entries.dot(sb.entries);
}

ResolutionResult resolution_check(const CoherentFamily& family, double L, int n_grid,
                                  int states, int n_workers) {
    if (!(L > 0)) throw ContractError("resolution_check: L must be positive");
    if (n_grid < 16) throw ContractError("resolution_check: n_grid must be >= 16");
    const int dim = family.dim();
    const double hbar = family.hbar();
    if (states <= 0) states = family.trust() / 2;
    states = std::min(states, dim);

    const double max_alpha2 = L * L / hbar; // box corner
    DisplacementEngine eng(displacement_work_dim(dim, max_alpha2), hbar);
    Vector fid = Vector::Zero(eng.dim());
    fid.head(dim) = family.fiducial().entries;

    const double dx = 2.0 * L / n_grid;
    const double w = dx * dx;
    std::vector<double> xs(n_grid);
    for (int i = 0; i < n_grid; ++i) xs[i] = -L + (i + 0.5) * dx;

    const std::size_t n_chunks = std::min<std::size_t>(n_grid, 64);
    std::vector<Matrix> parts(n_chunks, Matrix::Zero(dim, dim));
    detail::run_chunks(n_chunks, n_workers, [&](std::size_t c) {
        Matrix& acc = parts[c];
        for (std::size_t i = c; i < static_cast<std::size_t>(n_grid); i += n_chunks) {
            for (int j = 0; j < n_grid; ++j) {
                Vector psi = displaced_projected(eng, fid, {xs[i], xs[j]}, dim);
                acc.noalias() += w * (psi * psi.adjoint());
            }
        }
    });
    Matrix total = Matrix::Zero(dim, dim);
    for (const auto& m : parts) total += m;
    total /= (2.0 * M_PI * hbar);

    Matrix diff = total.topLeftCorner(states, states) - Matrix::Identity(states, states);
    return {FockOperator(std::move(total), hbar), diff.cwiseAbs().maxCoeff(), states};
}

OneForm symplectic_potential(const CoherentFamily& family, PhasePoint pt) {
    return {-pt.q / 2.0 - family.mean_q(), pt.p / 2.0 + family.mean_p()};
}

MetricReport fubini_study_metric(const CoherentFamily& family, PhasePoint pt) {
    MetricReport r;
    r.mean_q = family.mean_q();
    r.mean_p = family.mean_p();
    r.var_q = family.var_q();
    r.var_p = family.var_p();
    r.cov_sym = family.cov_sym();
    // Displacing by dp moves the state along Q, by dq along P, so the
    // covariance enters the metric through the symplectic rotation: the
    // cross coefficient carries the opposite sign of <dP dQ + dQ dP>.
    // Validated against second differences of |<z|z'>|^2.
    r.gpp = 2.0 * r.var_q;
    r.gqq = 2.0 * r.var_p;
    r.gpq = -r.cov_sym;
    OneForm th = symplectic_potential(family, pt);
    r.theta_p = th.theta_p;
    r.theta_q = th.theta_q;
    r.physical_ratio = (r.var_q + r.var_p) / family.hbar();
    return r;
}

} // namespace phaseq
