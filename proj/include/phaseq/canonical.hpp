#ifndef PHASEQ_CANONICAL_HPP
#define PHASEQ_CANONICAL_HPP

#include <functional>
#include <string>

#include "phaseq/classical.hpp"
#include "phaseq/quantize.hpp"

namespace phaseq {

/// Invertible unit-Jacobian coordinate change (p,q) <-> (r,s).
/// Both directions are supplied in closed form; nothing is inverted numerically.
struct CanonicalMap {
    std::function<PhasePoint(PhasePoint)> forward;          // (p,q) -> (r,s)
    std::function<PhasePoint(PhasePoint)> inverse;          // (r,s) -> (p,q)
    std::function<Eigen::Matrix2d(PhasePoint)> jacobian;    // d(r,s)/d(p,q)
    double q_min = -1e18, q_max = 1e18;                     // domain restriction in q
    std::string kind = "user";

    bool in_domain(PhasePoint z) const { return z.q >= q_min && z.q <= q_max; }
};

/// r = p / lambda, s = lambda q; r ds = p dq exactly (F = 0).
CanonicalMap make_scaling(double lambda);

/// Point transform s = f(q), r = p / f'(q) with monotone f (f' > 0 on the
/// domain). The caller supplies both f and its closed-form inverse.
CanonicalMap make_point_transform(std::function<double(double)> f,
                                  std::function<double(double)> f_prime,
                                  std::function<double(double)> f_inverse,
                                  std::function<double(double)> f_second,
                                  double q_min, double q_max);

/// Built-in cubic family f(q) = q + c q^3 (c >= 0), Cardano inverse.
CanonicalMap make_cubic(double c, double q_min, double q_max);

/// Scalar rule: hbar(r,s) = h(p(r,s), q(r,s)). Throws DomainError outside the
/// forward image of the map's domain.
std::function<double(PhasePoint)> transform_symbol(const PolySymbol& h,
                                                   const CanonicalMap& map);

/// Quantize through the transformed chart: midpoint quadrature on a regular
/// (r,s) grid covering the image of [-L,L]^2, nodes pulled back through the
/// inverse map (unit Jacobian, weights dr ds), integrand h(p,q)|p,q><p,q|.
/// Nodes pulling back outside [-L,L]^2 or outside the map's domain are
/// dropped, so the captured Gaussian mass matches the untransformed quadrature
/// clipped the same way.
QuadratureQuantization quantize_in_transformed_coords(const PolySymbol& h,
                                                      const CanonicalMap& map,
                                                      int dim, double hbar, double L,
                                                      int n_grid, int n_workers = 0);

/// Shared-sweep variant over several symbols.
std::vector<QuadratureQuantization> quantize_in_transformed_coords_batch(
    const std::vector<PolySymbol>& hs, const CanonicalMap& map, int dim, double hbar,
    double L, int n_grid, int n_workers = 0);

/// Matching untransformed quadrature (same clip) for invariance comparisons.
QuadratureQuantization quantize_reference_for_map(const PolySymbol& h,
                                                  const CanonicalMap& map, int dim,
                                                  double hbar, double L, int n_grid,
                                                  int n_workers = 0);

std::vector<QuadratureQuantization> quantize_reference_for_map_batch(
    const std::vector<PolySymbol>& hs, const CanonicalMap& map, int dim, double hbar,
    double L, int n_grid, int n_workers = 0);

struct GaugePhaseReport {
    Complex phase_start{1, 0};
    Complex phase_end{1, 0};
    Complex relative_phase{1, 0}; // e^{i(G(end)-G(start))/hbar}
};

/// Endpoint phase factors e^{iG/hbar} of a total-differential gauge term.
GaugePhaseReport gauge_phase_report(const CanonicalMap& map, const PolySymbol& g,
                                    PhasePoint start, PhasePoint end, double hbar);

/// | sum_l [G(z_{l+1}) - G(z_l)]  -  (G(end) - G(start)) | over a discrete
/// path: the total-differential term is a telescoping sum.
double total_differential_residual(const PolySymbol& g, const PhasePath& path);

} // namespace phaseq

#endif
