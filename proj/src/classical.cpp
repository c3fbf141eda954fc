#include "phaseq/classical.hpp"

#include <cmath>
#include <ostream>

namespace phaseq {

PolySymbol poisson_bracket(const PolySymbol& a, const PolySymbol& b) {
    return a.d_dq() * b.d_dp() - a.d_dp() * b.d_dq();
}

void Trajectory::write_csv(std::ostream& os) const {
    os << "t,p,q,E\n";
    os.precision(17);
    for (std::size_t i = 0; i < times.size(); ++i)
        os << times[i] << ',' << points[i].p << ',' << points[i].q << ',' << energy[i]
           << '\n';
}

namespace {

struct Splitting {
    PolySymbol dT_dp; // qdot
    PolySymbol dV_dq; // -pdot
};

Splitting split_separable(const PolySymbol& h) {
    PolySymbol::Terms tp, vq;
    for (const auto& [k, c] : h.terms()) {
        if (k.first > 0)
            tp[k] = c;
        else
            vq[k] = c;
    }
    return {PolySymbol(std::move(tp)).d_dp(), PolySymbol(std::move(vq)).d_dq()};
}

PhasePoint strang_step(const Splitting& s, PhasePoint z, double dt) {
    z.q += 0.5 * dt * s.dT_dp.evaluate_real(z.p, z.q);
    z.p -= dt * s.dV_dq.evaluate_real(z.p, z.q);
    z.q += 0.5 * dt * s.dT_dp.evaluate_real(z.p, z.q);
    return z;
}

PhasePoint midpoint_step(const PolySymbol& hp, const PolySymbol& hq, PhasePoint z,
                         double dt) {
    // z' = z + dt J grad H((z+z')/2), solved by fixed-point iteration.
    PhasePoint zn = z;
    for (int it = 0; it < 64; ++it) {
        const double pm = 0.5 * (z.p + zn.p), qm = 0.5 * (z.q + zn.q);
        PhasePoint znext{z.p - dt * hq.evaluate_real(pm, qm),
                         z.q + dt * hp.evaluate_real(pm, qm)};
        const double delta =
            std::abs(znext.p - zn.p) + std::abs(znext.q - zn.q);
        zn = znext;
        if (delta < 1e-14 * (1.0 + std::abs(zn.p) + std::abs(zn.q))) return zn;
    }
    throw IntegrationError("implicit midpoint iteration did not converge");
}

// Yoshida triple-jump coefficients for a symmetric second-order base step.
constexpr double kYoshidaW1 = 1.3512071919596576; // 1/(2 - 2^{1/3})
constexpr double kYoshidaW0 = 1.0 - 2.0 * kYoshidaW1;

} // namespace

PhasePoint hamilton_step(const PolySymbol& h, PhasePoint z, double dt, int order) {
    if (order != 2 && order != 4) throw ContractError("hamilton_step: order must be 2 or 4");
    if (h.is_separable()) {
        Splitting s = split_separable(h);
        if (order == 2) return strang_step(s, z, dt);
        z = strang_step(s, z, kYoshidaW1 * dt);
        z = strang_step(s, z, kYoshidaW0 * dt);
        return strang_step(s, z, kYoshidaW1 * dt);
    }
    PolySymbol hp = h.d_dp(), hq = h.d_dq();
    if (order == 2) return midpoint_step(hp, hq, z, dt);
    z = midpoint_step(hp, hq, z, kYoshidaW1 * dt);
    z = midpoint_step(hp, hq, z, kYoshidaW0 * dt);
    return midpoint_step(hp, hq, z, kYoshidaW1 * dt);
}

Trajectory integrate_hamilton(const PolySymbol& h, PhasePoint start, double T,
                              double dt, int order) {
    if (!(dt > 0) || !(T > 0)) throw ContractError("integrate_hamilton: need T > 0, dt > 0");
    if (!h.is_real()) throw ContractError("integrate_hamilton: Hamiltonian must be real");
    const long n = std::lround(std::ceil(T / dt - 1e-12));
    const double step = T / static_cast<double>(n);

    Trajectory traj;
    traj.times.reserve(n + 1);
    traj.points.reserve(n + 1);
    traj.energy.reserve(n + 1);
    PhasePoint z = start;
    traj.times.push_back(0.0);
    traj.points.push_back(z);
    traj.energy.push_back(h.evaluate_real(z.p, z.q));
    for (long i = 1; i <= n; ++i) {
        z = hamilton_step(h, z, step, order);
        if (!std::isfinite(z.p) || !std::isfinite(z.q))
            throw IntegrationError("trajectory diverged");
        traj.times.push_back(step * static_cast<double>(i));
        traj.points.push_back(z);
        traj.energy.push_back(h.evaluate_real(z.p, z.q));
    }
    return traj;
}

void PhasePath::validate() const {
    if (p.size() != q.size()) throw ContractError("PhasePath: p and q lengths differ");
    if (p.size() < 3) throw ContractError("PhasePath: need at least 3 nodes");
    if (!(eps > 0)) throw ContractError("PhasePath: eps must be positive");
}

double evaluate_action(const PhasePath& path, const PolySymbol& h, const PolySymbol& g) {
    path.validate();
    const std::size_t n = path.nodes();
    double act = 0;
    for (std::size_t l = 0; l + 1 < n; ++l) {
        const double pb = 0.5 * (path.p[l] + path.p[l + 1]);
        const double qb = 0.5 * (path.q[l] + path.q[l + 1]);
        act += pb * (path.q[l + 1] - path.q[l]) - path.eps * h.evaluate_real(pb, qb);
    }
    act += g.evaluate_real(path.p[n - 1], path.q[n - 1]) -
           g.evaluate_real(path.p[0], path.q[0]);
    return act;
}

std::vector<std::pair<double, double>> action_gradient(const PhasePath& path,
                                                       const PolySymbol& h) {
    path.validate();
    const PolySymbol hp = h.d_dp(), hq = h.d_dq();
    const std::size_t n = path.nodes();
    std::vector<std::pair<double, double>> grad;
    grad.reserve(n - 2);
    for (std::size_t l = 1; l + 1 < n; ++l) {
        const double pbl = 0.5 * (path.p[l - 1] + path.p[l]);
        const double qbl = 0.5 * (path.q[l - 1] + path.q[l]);
        const double pbr = 0.5 * (path.p[l] + path.p[l + 1]);
        const double qbr = 0.5 * (path.q[l] + path.q[l + 1]);
        const double dIdp = 0.5 * (path.q[l + 1] - path.q[l - 1]) -
                            0.5 * path.eps *
                                (hp.evaluate_real(pbl, qbl) + hp.evaluate_real(pbr, qbr));
        const double dIdq = 0.5 * (path.p[l - 1] + path.p[l]) -
                            0.5 * (path.p[l] + path.p[l + 1]) -
                            0.5 * path.eps *
                                (hq.evaluate_real(pbl, qbl) + hq.evaluate_real(pbr, qbr));
        grad.emplace_back(dIdp, dIdq);
    }
    return grad;
}

double bracket_evolution_check(const PolySymbol& w, const PolySymbol& h,
                               const Trajectory& traj) {
    if (traj.times.size() < 3) throw ContractError("bracket_evolution_check: trajectory too short");
    const PolySymbol wh = poisson_bracket(w, h);
    double worst = 0;
    for (std::size_t l = 1; l + 1 < traj.times.size(); ++l) {
        const double dt2 = traj.times[l + 1] - traj.times[l - 1];
        const double wdot = (w.evaluate_real(traj.points[l + 1].p, traj.points[l + 1].q) -
                             w.evaluate_real(traj.points[l - 1].p, traj.points[l - 1].q)) /
                            dt2;
        const double expect = wh.evaluate_real(traj.points[l].p, traj.points[l].q);
        worst = std::max(worst, std::abs(wdot - expect));
    }
    return worst;
}

} // namespace phaseq
