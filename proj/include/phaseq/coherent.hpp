#ifndef PHASEQ_COHERENT_HPP
#define PHASEQ_COHERENT_HPP

#include <optional>

#include "phaseq/fock.hpp"

namespace phaseq {

/// A point (p, q) of the flat phase plane.
struct PhasePoint {
    double p = 0.0;
    double q = 0.0;
};

/// Applies the Weyl operator U[p,q] = exp(i(pQ - qP)/hbar) exactly within a
/// truncated basis of dimension `dim`.
///
/// The generator equals alpha A' - conj(alpha) A with alpha = (q+ip)/sqrt(2 hbar).
/// Writing alpha = r e^{i phi}, conjugation by the number-phase e^{i phi N}
/// reduces it to r(A' - A), whose eigendecomposition is computed once, so a
/// single engine serves every phase point at O(dim^2) per application.
class DisplacementEngine {
  public:
    DisplacementEngine(int dim, double hbar);

    int dim() const { return dim_; }
    double hbar() const { return hbar_; }

    /// U[p,q] v.
    Vector apply(const Vector& v, PhasePoint pt) const;
    /// Full unitary matrix U[p,q].
    Matrix unitary(PhasePoint pt) const;

  private:
    int dim_;
    double hbar_;
    Eigen::VectorXd lambda_; // spectrum of -i(A' - A)
    Matrix v_;               // its eigenvectors
};

/// Working dimension large enough that a displaced state of squared radius
/// alpha2 = (p^2+q^2)/(2 hbar) keeps its weight away from the corner.
int displacement_work_dim(int dim, double max_alpha2);

/// U[p,q] |fid>, truncated back to out_dim components. fid_work must be padded
/// to the engine's dimension. If leak is given it receives the weight lost to
/// the projection.
Vector displaced_projected(const DisplacementEngine& eng, const Vector& fid_work,
                           PhasePoint pt, int out_dim, double* leak = nullptr);

/// The Weyl operator U[p,q] at dimension dim as a FockOperator.
FockOperator displacement(PhasePoint pt, int dim, double hbar);

/// Flat-metric data of a coherent family, with the one-form coefficients
/// evaluated at one phase point. Line element:
///   dsigma^2 = gpp dp^2 + 2 gpq dp dq + gqq dq^2.
struct MetricReport {
    double gpp = 0, gpq = 0, gqq = 0;
    double theta_p = 0, theta_q = 0;
    double mean_q = 0, mean_p = 0;
    double var_q = 0, var_p = 0;   // <(dQ)^2>, <(dP)^2>
    double cov_sym = 0;            // <dP dQ + dQ dP>
    double physical_ratio = 0;     // (<(dQ)^2> + <(dP)^2>)/hbar, diagnostic only
};

struct OneForm {
    double theta_p = 0;
    double theta_q = 0;
};

struct ResolutionResult {
    FockOperator matrix;
    double deviation = 0;
    int states_checked = 0;
};

/// Coherent states |p,q> = U[p,q]|eta> for a fixed normalized fiducial.
/// Immutable after construction; all member calls are const and thread-safe.
class CoherentFamily {
  public:
    CoherentFamily(StateVector fiducial, double hbar);

    int dim() const { return fiducial_.dim; }
    double hbar() const { return hbar_; }
    int trust() const { return trust_dim(dim()); }
    const StateVector& fiducial() const { return fiducial_; }
    const DisplacementEngine& engine() const { return engine_; }

    double mean_q() const { return mean_q_; }
    double mean_p() const { return mean_p_; }
    double var_q() const { return var_q_; }
    double var_p() const { return var_p_; }
    double cov_sym() const { return cov_sym_; }

    /// |p,q>. If leaked_weight is given it receives the state's weight beyond
    /// the trust index; a value above 1e-8 means pt is outside the trust region.
    StateVector state(PhasePoint pt, double* leaked_weight = nullptr) const;

    /// <p1,q1 | p2,q2>.
    Complex overlap(PhasePoint a, PhasePoint b) const;

  private:
    StateVector fiducial_;
    double hbar_;
    DisplacementEngine engine_;
    double mean_q_, mean_p_, var_q_, var_p_, cov_sym_;
};

/// Midpoint quadrature of |p,q><p,q| dp dq / (2 pi hbar) over [-L,L]^2 and its
/// max-norm deviation from the identity on the first `states` basis states
/// (default trust/2). Uses exact displaced amplitudes computed in an enlarged
/// working space, so far grid points carry true Gaussian tails.
ResolutionResult resolution_check(const CoherentFamily& family, double L, int n_grid,
                                  int states = -1, int n_workers = 0);

/// Coefficients of theta = theta_p dp + theta_q dq at pt:
/// theta_q = p/2 + <P>, theta_p = -q/2 - <Q>.
OneForm symplectic_potential(const CoherentFamily& family, PhasePoint pt);

/// Metric coefficients from exact fiducial moments (position independent).
MetricReport fubini_study_metric(const CoherentFamily& family, PhasePoint pt = {});

} // namespace phaseq

#endif
