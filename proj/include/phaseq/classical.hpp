#ifndef PHASEQ_CLASSICAL_HPP
#define PHASEQ_CLASSICAL_HPP

#include <iosfwd>
#include <vector>

#include "phaseq/coherent.hpp"
#include "phaseq/symbol.hpp"

namespace phaseq {

/// {A,B} = dA/dq dB/dp - dA/dp dB/dq, exact on polynomial coefficients.
PolySymbol poisson_bracket(const PolySymbol& a, const PolySymbol& b);

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::vector<double> energy;

    void write_csv(std::ostream& os) const; // columns t, p, q, E
};

/// Integrate Hamilton's equations from `start` for time T with step ~dt.
/// Separable H = T(p) + V(q): Strang splitting (order 2) or a Yoshida
/// triple-jump composition (order 4). Non-separable H falls back to the
/// implicit midpoint rule with fixed-point iteration.
Trajectory integrate_hamilton(const PolySymbol& h, PhasePoint start, double T,
                              double dt, int order = 2);

/// One integrator step (exposed for Jacobian tests).
PhasePoint hamilton_step(const PolySymbol& h, PhasePoint z, double dt, int order = 2);

/// Time-discretized path with paired nodes (p_l, q_l), l = 0..N+1, step eps.
struct PhasePath {
    double eps = 0;
    std::vector<double> p, q;

    std::size_t nodes() const { return p.size(); }
    void validate() const;
};

/// Midpoint discretization of I = int [p qdot + Gdot - H] dt. The total
/// derivative term telescopes to G(end) - G(start).
double evaluate_action(const PhasePath& path, const PolySymbol& h, const PolySymbol& g);

/// Analytic gradient of the discrete action with respect to the interior
/// nodes; rows are (dI/dp_l, dI/dq_l), l = 1..N. Vanishes O(dt^3) per node on
/// a true trajectory. Independent of the gauge polynomial by construction.
std::vector<std::pair<double, double>> action_gradient(const PhasePath& path,
                                                       const PolySymbol& h);

/// Max over interior trajectory nodes of |d/dt W - {W,H}| with d/dt taken by
/// central differences along the trajectory.
double bracket_evolution_check(const PolySymbol& w, const PolySymbol& h,
                               const Trajectory& traj);

} // namespace phaseq

#endif
