#ifndef PHASEQ_QUANTIZE_HPP
#define PHASEQ_QUANTIZE_HPP

#include <map>
#include <vector>

#include "phaseq/coherent.hpp"
#include "phaseq/symbol.hpp"

namespace phaseq {

/// Coefficients of a polynomial in the holomorphic pair w = q+ip, wbar = q-ip:
/// key (k, l) maps to the coefficient of w^k wbar^l.
using HoloCoeffs = std::map<std::pair<int, int>, Complex>;

/// Exact basis change p^a q^b -> w, wbar monomials.
HoloCoeffs to_holomorphic_basis(const PolySymbol& h);
/// Inverse basis change, for round-trip checks.
PolySymbol from_holomorphic_basis(const HoloCoeffs& c);

/// Anti-normal-ordering quantization: w^k wbar^l maps to (Q+iP)^k (Q-iP)^l,
/// every (Q+iP) factor to the left. Exactly Hermitian for real symbols.
FockOperator antinormal_quantize_rule(const PolySymbol& h, int dim, double hbar);

struct QuadratureQuantization {
    FockOperator op;
    double tail_estimate = 0; // outer-ring contribution, proxy for the lost tail
    bool tail_ok = true;
};

/// Quantization as the projector integral: midpoint quadrature of
/// h(p,q) |p,q><p,q| dp dq / (2 pi hbar) over [-L,L]^2, fiducial |0>.
QuadratureQuantization antinormal_quantize_quadrature(const PolySymbol& h,
                                                      const CoherentFamily& family,
                                                      double L, int n_grid,
                                                      int n_workers = 0);

/// Same sweep shared across several symbols (the states dominate the cost).
std::vector<QuadratureQuantization> antinormal_quantize_quadrature_batch(
    const std::vector<PolySymbol>& hs, const CoherentFamily& family, double L,
    int n_grid, int n_workers = 0);

/// Rectangle variant with domain edges on cell boundaries, a disk cap
/// (p^2+q^2)/(2 hbar) <= alpha2_cap, and the Euler-Maclaurin q-edge
/// correction, so a cut through live integrand still integrates cleanly.
/// Used by the canonical-transform invariance machinery.
std::vector<QuadratureQuantization> antinormal_quantize_quadrature_rect(
    const std::vector<PolySymbol>& hs, const CoherentFamily& family, double pmin,
    double pmax, double qmin, double qmax, int n_p, int n_q, double alpha2_cap,
    int n_workers = 0);

/// <p,q| H |p,q>.
Complex lower_symbol(const FockOperator& h, const CoherentFamily& family, PhasePoint pt,
                     double* leaked_weight = nullptr);

/// Default quadrature half-width: 8 sqrt(hbar) plus degree * sqrt(hbar)
/// to hold the polynomial growth against the Gaussian damping.
double default_quadrature_halfwidth(const PolySymbol& h, double hbar);

} // namespace phaseq

#endif
