#ifndef PHASEQ_PATHINT_HPP
#define PHASEQ_PATHINT_HPP

#include <cstdint>

#include "phaseq/classical.hpp"
#include "phaseq/coherent.hpp"
#include "phaseq/symbol.hpp"

namespace phaseq {

struct MCEstimate {
    Complex value{0, 0};
    double std_err_re = 0;
    double std_err_im = 0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    bool low_precision = false;
};

/// Sharp-position lattice propagator for H = p^2/(2m) + V(q): the momenta are
/// integrated analytically per slice, and the resulting short-time position
/// kernel (midpoint V) is iterated spectrally on a periodized grid of n_x
/// points over [-L, L] with a band-limited endpoint delta. Endpoints snap to
/// the nearest grid node.
Complex lattice_feynman_propagator(const PolySymbol& h, double qa, double qb,
                                   double T, int N, double L, int n_x);

/// Grid that keeps qa and qb on nodes and refines jointly with N
/// (L ~ 0.8 N sqrt(hbar T / m), dx ~ 1.2 sqrt(hbar T / m) / N).
struct FeynmanGrid {
    double L = 0;
    int n_x = 0;
};
FeynmanGrid feynman_grid_defaults(double qa, double qb, double T, int N, double m,
                                  double hbar);

/// Exact Brownian-bridge path, both coordinates pinned, diffusion constant nu.
PhasePath sample_brownian_bridge(PhasePoint start, PhasePoint end, double T, int N,
                                 double nu, std::uint64_t seed);

/// Steps per propagator call: at least 400 per unit T, and enough that
/// nu * eps stays small (the midpoint stochastic area is biased ~ nu eps).
int default_bridge_steps(double T, double nu);

/// Monte Carlo evaluation of the Wiener-regularized coherent-state propagator:
///   2 pi hbar e^{nu T/2} int exp{(i/hbar)[int (p dq - q dp)/2 - int h dt]} dmu
/// with the pinned-measure mass (2 pi nu T)^{-1} exp(-|dz|^2/(2 nu T)) applied
/// explicitly since bridges are sampled from a probability law. Stochastic
/// integrals use the Stratonovich midpoint rule. Deterministic for fixed seed
/// and any worker count.
MCEstimate wiener_mc_propagator(const PolySymbol& h, PhasePoint start, PhasePoint end,
                                double T, double nu, int N, std::size_t n_samples,
                                std::uint64_t seed, double hbar = 1.0,
                                int n_workers = 0);

/// Deterministic transfer-matrix evaluation of the same object on an n_pq^2
/// phase-space grid over [-L, L]^2: per step a 2D heat kernel of variance
/// nu*eps times the midpoint phase factor. Requires separable h = hp(p)+hq(q).
Complex wiener_lattice_propagator(const PolySymbol& h, PhasePoint start,
                                  PhasePoint end, double T, double nu, int N,
                                  double L, int n_pq, double hbar = 1.0,
                                  int n_workers = 0);

/// <end| exp(-i H T / hbar) |start> with H the anti-normal quantization of h
/// and coherent states over the ground fiducial: the operator-side value both
/// path integrals approximate.
Complex exact_coherent_propagator(const PolySymbol& h, PhasePoint start,
                                  PhasePoint end, double T, int dim, double hbar);

} // namespace phaseq

#endif
