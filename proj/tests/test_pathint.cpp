#include <doctest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "phaseq/pathint.hpp"
#include "phaseq/quantize.hpp"

using namespace phaseq;

TEST_CASE("free-particle lattice kernel: accuracy and joint-refinement order") {
    PolySymbol h = parse_symbol("0.5 p^2");
    const double T = 1.0, qa = 0.0, qb = 1.0;
    auto run = [&](int N) {
        FeynmanGrid g = feynman_grid_defaults(qa, qb, T, N, 1.0, 1.0);
        Complex k = lattice_feynman_propagator(h, qa, qb, T, N, g.L, g.n_x);
        Complex ref = oracles::free_kernel(qa, qb, T, 1.0, 1.0);
        return std::abs(k - ref) / std::abs(ref);
    };
    const double e25 = run(25), e50 = run(50), e100 = run(100);
    CHECK(e100 <= 1e-2);
    CHECK(e50 <= e25);
    CHECK(e100 <= e50);
    const double slope = std::log2(e25 / e100) / 2.0;
    CHECK(slope >= 1.0);
}

TEST_CASE("oscillator lattice kernel matches the eigenfunction expansion") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    const double T = M_PI / 4.0;
    Complex k = lattice_feynman_propagator(h, 0.0, 1.0, T, 200, 24.0, 4000);
    Complex ref = oracles::oscillator_kernel(0.0, 1.0, T);
    CHECK(std::abs(k - ref) / std::abs(ref) <= 2e-2);
}

TEST_CASE("single-slice short-time kernel has the free modulus profile") {
    PolySymbol h = parse_symbol("0.5 p^2");
    const double T = 0.02;
    Complex kaa = lattice_feynman_propagator(h, 0.0, 0.0, T, 1, 8.0, 4000);
    Complex kab = lattice_feynman_propagator(h, 0.0, 1.0, T, 1, 8.0, 4000);
    const double ratio = std::abs(kaa) / std::abs(kab);
    // the free kernel has position-independent modulus
    CHECK(std::abs(ratio - 1.0) <= 0.05);
    CHECK(std::abs(std::abs(kaa) - std::abs(oracles::free_kernel(0, 0, T, 1, 1))) <=
          0.05 * std::abs(oracles::free_kernel(0, 0, T, 1, 1)));
}

TEST_CASE("lattice kernel guards") {
    PolySymbol h = parse_symbol("0.5 p^2");
    CHECK_THROWS_AS(lattice_feynman_propagator(h, 0.0, 6.5, 1.0, 50, 7.0, 1024),
                    DomainError);
    CHECK_THROWS_AS(
        lattice_feynman_propagator(parse_symbol("0.5 p^2 + p q"), 0, 1, 1.0, 50, 16.0, 1024),
        ContractError);
    CHECK_THROWS_AS(
        lattice_feynman_propagator(parse_symbol("q^2"), 0, 1, 1.0, 50, 16.0, 1024),
        ContractError);
}

TEST_CASE("brownian bridge: pinning, marginals, degenerate limit, determinism") {
    const double T = 1.0, nu = 2.0;
    const int N = 3; // nodes at 0, T/4, T/2, 3T/4, T

    PhasePath one = sample_brownian_bridge({0.2, -0.3}, {1.0, 0.7}, T, N, nu, 99);
    CHECK(one.p.front() == 0.2);
    CHECK(one.q.front() == -0.3);
    CHECK(one.p.back() == 1.0);
    CHECK(one.q.back() == 0.7);
    CHECK(one.eps * (N + 1) == doctest::Approx(T).epsilon(1e-12));

    // marginal law of interior nodes: mean = linear interpolation,
    // var(midpoint) = nu T / 4, within three standard errors
    const int samples = 100000;
    std::vector<double> sum(N + 2, 0.0), sum2(N + 2, 0.0);
    for (int s = 0; s < samples; ++s) {
        PhasePath path = sample_brownian_bridge({0, 0}, {1, 0}, T, N, nu, 1000 + s);
        for (int l = 0; l <= N + 1; ++l) {
            sum[l] += path.p[l];
            sum2[l] += path.p[l] * path.p[l];
        }
    }
    for (int l = 1; l <= N; ++l) {
        const double t = one.eps * l;
        const double mean = sum[l] / samples;
        const double var = sum2[l] / samples - mean * mean;
        const double want_mean = t / T; // line from 0 to 1
        const double want_var = nu * t * (T - t) / T;
        const double se_mean = std::sqrt(want_var / samples);
        CHECK(std::abs(mean - want_mean) <= 3.0 * se_mean);
        if (l == 2) { // the T/2 node
            const double se_var = want_var * std::sqrt(2.0 / samples);
            CHECK(std::abs(want_var - nu * T / 4.0) < 1e-12);
            CHECK(std::abs(var - nu * T / 4.0) <= 3.0 * se_var);
        }
    }

    // nu -> 0 degenerates to the straight line
    PhasePath line = sample_brownian_bridge({0, 0}, {1, 1}, T, 16, 1e-8, 7);
    for (std::size_t l = 0; l < line.nodes(); ++l) {
        const double t = line.eps * l;
        CHECK(std::abs(line.p[l] - t / T) <= 1e-3);
        CHECK(std::abs(line.q[l] - t / T) <= 1e-3);
    }

    // identical seed, identical path
    PhasePath again = sample_brownian_bridge({0.2, -0.3}, {1.0, 0.7}, T, N, nu, 99);
    CHECK(std::memcmp(again.p.data(), one.p.data(), sizeof(double) * one.p.size()) == 0);
    CHECK(std::memcmp(again.q.data(), one.q.data(), sizeof(double) * one.q.size()) == 0);
}

TEST_CASE("wiener MC estimate is bit-identical for any worker count") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    MCEstimate base = wiener_mc_propagator(h, {0, 0}, {1, 0}, 0.25, 5.0, 50, 20000, 4242,
                                           1.0, 1);
    for (int workers : {2, 5}) {
        MCEstimate other =
            wiener_mc_propagator(h, {0, 0}, {1, 0}, 0.25, 5.0, 50, 20000, 4242, 1.0,
                                 workers);
        CHECK(std::memcmp(&base.value, &other.value, sizeof(base.value)) == 0);
        CHECK(base.std_err_re == other.std_err_re);
        CHECK(base.std_err_im == other.std_err_im);
    }
    MCEstimate reseeded = wiener_mc_propagator(h, {0, 0}, {1, 0}, 0.25, 5.0, 50, 20000,
                                               4243, 1.0, 1);
    CHECK(reseeded.value != base.value);
}

TEST_CASE("wiener MC with h = 0 matches the closed-form Gaussian value") {
    PolySymbol zero;
    const double nu = 20.0, T = 0.25;
    const int N = 600;
    MCEstimate est =
        wiener_mc_propagator(zero, {0, 0}, {1, 0}, T, nu, N, 200000, 20260811, 1.0);
    Complex want = oracles::wiener_h0_value(0, 0, 1, 0, nu, T);
    const double stat = 4.0 * std::hypot(est.std_err_re, est.std_err_im);
    CHECK(std::abs(est.value - want) <= stat + 0.012); // statistics + N bias
    CHECK(!est.low_precision);

    // at nu T = 10 the closed form is already the coherent-state overlap
    Complex far = oracles::wiener_h0_value(0, 0, 1, 0, 50.0, 0.2);
    Complex ov = oracles::gaussian_overlap(1, 0, 0, 0, 1.0);
    CHECK(std::abs(far - ov) <= 0.05 * std::abs(ov));
}

TEST_CASE("wiener MC oscillator: finite-nu bias shrinks as nu grows") {
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    const double T = 0.25;
    const int N = 600;
    Complex exact = exact_coherent_propagator(h, {0, 0}, {1, 0}, T, 60, 1.0);

    MCEstimate lo = wiener_mc_propagator(h, {0, 0}, {1, 0}, T, 5.0, N, 100000, 11, 1.0);
    MCEstimate hi = wiener_mc_propagator(h, {0, 0}, {1, 0}, T, 20.0, N, 100000, 11, 1.0);
    const double bias_lo = std::abs(lo.value - exact);
    const double bias_hi = std::abs(hi.value - exact);
    const double noise = 3.0 * (std::hypot(lo.std_err_re, lo.std_err_im) +
                                std::hypot(hi.std_err_re, hi.std_err_im));
    CHECK(bias_hi <= bias_lo + noise);
    CHECK(bias_hi <= 0.15 * std::abs(exact)); // ~8 percent observed at nu = 20

    // propagator reciprocity for a time-reversal-even symbol:
    // K(b,T;a) = K(abar,T;bbar) with (p,q)bar = (-p,q). (The conjugate form
    // K(b,T;a) = conj K(a,T;b) would need e^{-iHT} Hermitian and fails for
    // T != 0; the exact values differ by 2 sin(T) |K|.)
    MCEstimate fwd = wiener_mc_propagator(h, {0, 0}, {1, 0}, T, 20.0, N, 100000, 13, 1.0);
    MCEstimate rev = wiener_mc_propagator(h, {-1, 0}, {0, 0}, T, 20.0, N, 100000, 17, 1.0);
    const double recip = std::abs(fwd.value - rev.value);
    const double h_noise = 3.0 * (std::hypot(fwd.std_err_re, fwd.std_err_im) +
                                  std::hypot(rev.std_err_re, rev.std_err_im));
    CHECK(recip <= h_noise + 0.01);
    Complex ex_fwd = exact_coherent_propagator(h, {0, 0}, {1, 0}, T, 60, 1.0);
    Complex ex_rev = exact_coherent_propagator(h, {-1, 0}, {0, 0}, T, 60, 1.0);
    CHECK(std::abs(ex_fwd - ex_rev) <= 1e-10);
}

TEST_CASE("wiener lattice propagator: closed form, MC agreement, nu trend") {
    PolySymbol zero;
    const double T = 0.25;

    // h = 0 against the exact finite-nu Gaussian value; N keeps the
    // midpoint-rule bias (~0.7 nu eps) small
    Complex v10 = wiener_lattice_propagator(zero, {0, 0}, {0, 0}, T, 10.0, 125, 7.0, 120);
    Complex want10 = oracles::wiener_h0_value(0, 0, 0, 0, 10.0, T);
    CHECK(std::abs(v10 - want10) <= 0.03 * std::abs(want10));

    // at nu T = 5 the value approaches the overlap <0,0|0,0> = 1, and
    // doubling nu moves it closer
    Complex v20 = wiener_lattice_propagator(zero, {0, 0}, {0, 0}, T, 20.0, 250, 9.5, 160);
    CHECK(std::abs(v20 - Complex(1, 0)) <= 0.05);
    CHECK(std::abs(v20 - Complex(1, 0)) < std::abs(v10 - Complex(1, 0)));

    // oscillator at matched time discretization agrees with the MC branch
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    const int N = 40;
    Complex lat = wiener_lattice_propagator(h, {0, 0}, {1, 0}, T, 20.0, N, 10.5, 176);
    MCEstimate mc = wiener_mc_propagator(h, {0, 0}, {1, 0}, T, 20.0, N, 200000, 31, 1.0);
    const double tol = 2.0 * (std::hypot(mc.std_err_re, mc.std_err_im) + 0.05 * std::abs(lat));
    CHECK(std::abs(lat - mc.value) <= tol);

    // guards
    CHECK_THROWS_AS(
        wiener_lattice_propagator(zero, {0, 0}, {0, 0}, T, 20.0, 40, 4.0, 64),
        DomainError);
    CHECK_THROWS_AS(wiener_lattice_propagator(parse_symbol("p q"), {0, 0}, {0, 0}, T,
                                              20.0, 40, 9.5, 160),
                    ContractError);
}

TEST_CASE("oracle-level Chapman-Kolmogorov composition") {
    // int K(b,T;m,T/2) K(m,T/2;a,0) dm/(2 pi hbar) = K(b,T;a,0)
    PolySymbol h = parse_symbol("0.5 p^2 + 0.5 q^2");
    const int dim = 60;
    const double hbar = 1.0, T = 0.8;
    FockOperator ham = antinormal_quantize_rule(h, dim, hbar);
    CoherentFamily fam(StateVector::ground(dim), hbar);
    PhasePoint a{0.3, -0.5}, b{-0.2, 0.9};

    StateVector phi = schrodinger_evolve(fam.state(a), ham, T / 2); // e^{-iHT/2}|a>
    StateVector chi = schrodinger_evolve(fam.state(b), ham, -T / 2); // e^{+iHT/2}|b>
    Complex direct = chi.entries.dot(phi.entries);

    const double L = 8.0;
    const int n = 100;
    const double dx = 2 * L / n;
    DisplacementEngine eng(displacement_work_dim(dim, L * L / hbar), hbar);
    Vector fid = Vector::Zero(eng.dim());
    fid(0) = 1.0;
    Complex acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            PhasePoint m{-L + (i + 0.5) * dx, -L + (j + 0.5) * dx};
            Vector psim = displaced_projected(eng, fid, m, dim);
            acc += (chi.entries.dot(psim)) * (psim.dot(phi.entries)) * dx * dx;
        }
    acc /= 2 * M_PI * hbar;
    CHECK(std::abs(acc - direct) <= 1e-3);
}

TEST_CASE("default bridge steps keep nu*eps small") {
    CHECK(default_bridge_steps(1.0, 1.0) >= 400);
    const int n = default_bridge_steps(0.5, 50.0);
    CHECK(50.0 * 0.5 / (n + 1) <= 0.021);
}
