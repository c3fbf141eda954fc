#include <doctest.h>

#include <cmath>
#include <sstream>

#include "phaseq/classical.hpp"

using namespace phaseq;

TEST_CASE("poisson bracket basics") {
    PolySymbol q = PolySymbol::q(), p = PolySymbol::p();
    PolySymbol one = poisson_bracket(q, p);
    CHECK(one.terms().size() == 1);
    CHECK(std::abs(one.terms().at({0, 0}) - Complex(1.0)) < 1e-15);

    PolySymbol h = parse_symbol("p^2 + q^2 + q^4");
    CHECK(poisson_bracket(h, h).near_zero(1e-14));

    // antisymmetry as an exact polynomial identity
    PolySymbol a = parse_symbol("p^2 q"), b = parse_symbol("q^3 - p");
    CHECK((poisson_bracket(a, b) + poisson_bracket(b, a)).near_zero(1e-14));

    // Jacobi identity for A=p^2, B=q^3, C=pq
    PolySymbol A = parse_symbol("p^2"), B = parse_symbol("q^3"), C = parse_symbol("p q");
    PolySymbol jac = poisson_bracket(A, poisson_bracket(B, C)) +
                     poisson_bracket(B, poisson_bracket(C, A)) +
                     poisson_bracket(C, poisson_bracket(A, B));
    CHECK(jac.near_zero(1e-14));

    // Leibniz rule {AB, C} = A{B,C} + {A,C}B for degree <= 3 generators
    PolySymbol lhs = poisson_bracket(A * B, C);
    PolySymbol rhs = A * poisson_bracket(B, C) + poisson_bracket(A, C) * B;
    CHECK((lhs - rhs).near_zero(1e-14));
}

TEST_CASE("oscillator orbit closes after one period") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    Trajectory t = integrate_hamilton(h, {0.0, 1.0}, 2.0 * M_PI, 1e-3);
    PhasePoint last = t.points.back();
    CHECK(std::abs(last.p - 0.0) < 1e-6);
    CHECK(std::abs(last.q - 1.0) < 1e-6);
}

TEST_CASE("free flow is exact") {
    PolySymbol h = parse_symbol("0.5 p^2");
    Trajectory t = integrate_hamilton(h, {1.0, 0.0}, 1.0, 0.01);
    CHECK(std::abs(t.points.back().q - 1.0) <= 1e-12);
    CHECK(std::abs(t.points.back().p - 1.0) <= 1e-12);
}

TEST_CASE("energy drift halves as expected with dt and with order") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2 + 0.25 q^4");
    auto drift = [&](double dt, int order) {
        Trajectory t = integrate_hamilton(h, {0.0, 1.0}, 10.0, dt, order);
        double e0 = t.energy.front(), worst = 0;
        for (double e : t.energy) worst = std::max(worst, std::abs(e - e0));
        return worst;
    };
    const double d1 = drift(2e-3, 2), d2 = drift(1e-3, 2);
    const double ratio = d1 / d2;
    CHECK(ratio > 2.8); // order 2: expect ~4
    CHECK(ratio < 5.5);
    CHECK(drift(1e-3, 4) < d2 / 50.0);
}

TEST_CASE("long-run oscillator energy error stays bounded") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    Trajectory t = integrate_hamilton(h, {0.0, 1.0}, 100.0, 1e-2);
    const double e0 = t.energy.front();
    double worst = 0;
    for (double e : t.energy) worst = std::max(worst, std::abs(e - e0));
    CHECK(worst <= 1e-4 * e0);
}

TEST_CASE("one integrator step has unit Jacobian (finite differences)") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2 + 0.1 q^3");
    const double dt = 1e-2, fd = 1e-6;
    PhasePoint z{0.3, -0.7};
    auto step = [&](PhasePoint x) { return hamilton_step(h, x, dt); };
    PhasePoint pp = step({z.p + fd, z.q}), pm = step({z.p - fd, z.q});
    PhasePoint qp = step({z.p, z.q + fd}), qm = step({z.p, z.q - fd});
    const double j11 = (pp.p - pm.p) / (2 * fd), j12 = (qp.p - qm.p) / (2 * fd);
    const double j21 = (pp.q - pm.q) / (2 * fd), j22 = (qp.q - qm.q) / (2 * fd);
    CHECK(std::abs(j11 * j22 - j12 * j21 - 1.0) <= 1e-8);
}

TEST_CASE("non-separable Hamiltonian falls back to implicit midpoint") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2 + 0.1 p^2 q^2");
    Trajectory t = integrate_hamilton(h, {0.2, 0.8}, 5.0, 1e-3);
    const double e0 = t.energy.front();
    double worst = 0;
    for (double e : t.energy) worst = std::max(worst, std::abs(e - e0));
    CHECK(worst < 1e-6);

    // the implicit step is symplectic as well
    const double dt = 1e-2, fd = 1e-6;
    PhasePoint z{0.3, -0.2};
    auto step = [&](PhasePoint x) { return hamilton_step(h, x, dt); };
    PhasePoint pp = step({z.p + fd, z.q}), pm = step({z.p - fd, z.q});
    PhasePoint qp = step({z.p, z.q + fd}), qm = step({z.p, z.q - fd});
    const double det = ((pp.p - pm.p) * (qp.q - qm.q) - (qp.p - qm.p) * (pp.q - pm.q)) /
                       (4 * fd * fd);
    CHECK(std::abs(det - 1.0) <= 1e-8);
}

namespace {

PhasePath path_from(const Trajectory& t) {
    PhasePath path;
    path.eps = t.times[1] - t.times[0];
    for (const auto& z : t.points) {
        path.p.push_back(z.p);
        path.q.push_back(z.q);
    }
    return path;
}

} // namespace

TEST_CASE("action: constant path, gauge invariance, stationarity") {
    PolySymbol zero;
    PolySymbol g0;
    PhasePath constant;
    constant.eps = 0.1;
    constant.p.assign(5, 0.7);
    constant.q.assign(5, -0.3);
    CHECK(evaluate_action(constant, zero, g0) == doctest::Approx(0.0));

    // discrete Euler-Lagrange residual is untouched by the gauge polynomial
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    Trajectory t = integrate_hamilton(h, {0.0, 1.0}, 2.0 * M_PI, 1e-3, 4);
    PhasePath path = path_from(t);
    auto grad0 = action_gradient(path, h);
    // gradient is independent of G by construction (G telescopes); assert the
    // action itself shifts by exactly G(end)-G(start)
    PolySymbol g = parse_symbol("p q");
    const double i0 = evaluate_action(path, h, g0);
    const double i1 = evaluate_action(path, h, g);
    const double shift = g.evaluate_real(path.p.back(), path.q.back()) -
                         g.evaluate_real(path.p.front(), path.q.front());
    CHECK(std::abs((i1 - i0) - shift) <= 1e-12);

    // stationarity on a true trajectory: gradient O(dt^3) per node
    const double dt = path.eps;
    double worst = 0;
    for (auto& [gp, gq] : grad0) worst = std::max({worst, std::abs(gp), std::abs(gq)});
    CHECK(worst <= 1e-4 * dt * dt);
    CHECK(worst <= 1e-6);
}

TEST_CASE("bracket evolution along trajectories") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    Trajectory t4 = integrate_hamilton(h, {0.0, 1.0}, 6.0, 1e-3, 4);

    CHECK(bracket_evolution_check(h, h, t4) <= 1e-8);
    CHECK(bracket_evolution_check(PolySymbol::q(), h, t4) <= 1e-6);
    CHECK(bracket_evolution_check(parse_symbol("p q"), h, t4) <= 1e-5);
}

TEST_CASE("trajectory CSV export") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    Trajectory t = integrate_hamilton(h, {0.0, 1.0}, 0.02, 1e-2);
    std::ostringstream os;
    t.write_csv(os);
    const std::string csv = os.str();
    CHECK(csv.substr(0, 8) == "t,p,q,E\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4); // header + 3 rows
}
