#include "phaseq/pathint.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "phaseq/detail/parallel.hpp"
#include "phaseq/quantize.hpp"
#include "phaseq/rng.hpp"

namespace phaseq {

namespace {

struct KineticPotential {
    double mass;
    PolySymbol v; // pure q polynomial
    double vpp;   // constant second derivative if V is quadratic, else 0
    bool v_quadratic;
};

KineticPotential split_kinetic(const PolySymbol& h) {
    double c2 = 0;
    PolySymbol::Terms vterms;
    for (const auto& [k, c] : h.terms()) {
        if (std::abs(c.imag()) > 1e-12)
            throw ContractError("lattice propagator: Hamiltonian must be real");
        if (k.first == 2 && k.second == 0) {
            c2 = c.real();
        } else if (k.first == 0) {
            vterms[k] = c;
        } else {
            throw ContractError("lattice propagator: Hamiltonian must be p^2/(2m) + V(q)");
        }
    }
    if (!(c2 > 0))
        throw ContractError("lattice propagator: kinetic term p^2/(2m) missing");
    PolySymbol v(std::move(vterms));
    const bool quad = v.max_degree() <= 2;
    double vpp = 0;
    if (quad) {
        auto it = v.terms().find({0, 2});
        if (it != v.terms().end()) vpp = 2.0 * it->second.real();
    }
    return {1.0 / (2.0 * c2), v, vpp, quad};
}

int next_fft_friendly(int n) {
    auto smooth = [](int m) {
        for (int f : {2, 3, 5})
            while (m % f == 0) m /= f;
        return m == 1;
    };
    if (n % 2) ++n;
    while (!smooth(n)) n += 2;
    return n;
}

} // namespace

FeynmanGrid feynman_grid_defaults(double qa, double qb, double T, int N, double m,
                                  double hbar) {
    const double unit = std::sqrt(hbar * T / m);
    double dx = 1.2 * unit / N;
    const double span = std::abs(qb - qa);
    if (span > 1e-12) {
        const int k = std::max(1, static_cast<int>(std::lround(span / dx)));
        dx = span / k;
    }
    const double reach = 0.8 * N * unit + std::max(std::abs(qa), std::abs(qb));
    int half = static_cast<int>(std::ceil(reach / dx));
    int n_x = next_fft_friendly(2 * half);
    return {n_x * dx / 2.0, n_x};
}

Complex lattice_feynman_propagator(const PolySymbol& h, double qa, double qb,
                                   double T, int N, double L, int n_x) {
    if (!(T > 0) || N < 1) throw ContractError("lattice propagator: need T > 0, N >= 1");
    if (!(L > 0) || n_x < 16) throw ContractError("lattice propagator: bad grid");
    const KineticPotential kp = split_kinetic(h);
    const double hbar = 1.0; // the CLI fixes units; hbar enters via the symbol scale
    const double width = 2.0 * std::sqrt(hbar * T / kp.mass);
    if (L - std::abs(qa) < width || L - std::abs(qb) < width)
        throw DomainError("lattice propagator: endpoint too close to the grid boundary");

    const int n = n_x;
    const double dx = 2.0 * L / n;
    const double eps = T / (N + 1);
    const int ja = static_cast<int>(std::lround((qa + L) / dx));
    const int jb = static_cast<int>(std::lround((qb + L) / dx));

    // Band-limited delta: stationary wrap images must stay outside the window,
    // so the band scales with the wrap distance over hbar*T/m.
    const double reach = 2.0 * L - std::max(std::abs(qa), std::abs(qb));
    double k2 = 0.75 * kp.mass * reach / (hbar * T);
    k2 = std::min(k2, 0.45 * M_PI / dx);
    const double k1 = std::min(0.5 * kp.mass * reach / (hbar * T), k2 / 1.5);

    std::vector<double> ks(n);
    for (int i = 0; i < n; ++i) {
        const int m = (i <= n / 2) ? i : i - n;
        ks[i] = 2.0 * M_PI * m / (n * dx);
    }

    std::vector<Complex> psi_k(n);
    for (int i = 0; i < n; ++i) {
        const double a = std::abs(ks[i]);
        double wgt = 0.0;
        if (a <= k1)
            wgt = 1.0;
        else if (a < k2)
            wgt = 0.5 * (1.0 + std::cos(M_PI * (a - k1) / (k2 - k1)));
        psi_k[i] = wgt * std::polar(1.0, -ks[i] * (qa + L));
    }
    Eigen::FFT<double> fft;
    std::vector<Complex> psi(n);
    fft.inv(psi, psi_k);
    const double norm0 = static_cast<double>(n) / (2.0 * L);
    for (auto& c : psi) c *= norm0;

    // Midpoint V is exactly splittable for quadratic V with a shifted kinetic
    // mass; otherwise the symmetric endpoint average is used.
    const double m_eff = kp.mass + (kp.v_quadratic ? eps * eps * kp.vpp / 4.0 : 0.0);
    const double scal = std::sqrt(kp.mass / m_eff);
    std::vector<Complex> kin(n), vhalf(n);
    for (int i = 0; i < n; ++i)
        kin[i] = std::polar(1.0, -hbar * eps * ks[i] * ks[i] / (2.0 * m_eff));
    for (int j = 0; j < n; ++j) {
        const double x = -L + j * dx;
        vhalf[j] = std::polar(1.0, -eps * kp.v.evaluate_real(0.0, x) / (2.0 * hbar));
    }

    std::vector<Complex> tmp(n);
    for (int step = 0; step <= N; ++step) {
        for (int j = 0; j < n; ++j) psi[j] *= vhalf[j];
        fft.fwd(tmp, psi);
        for (int i = 0; i < n; ++i) tmp[i] *= kin[i];
        fft.inv(psi, tmp);
        for (int j = 0; j < n; ++j) psi[j] *= vhalf[j] * scal;
    }
    return psi[jb];
}

int default_bridge_steps(double T, double nu) {
    const double n = std::max(400.0 * T, 50.0 * nu * T);
    return std::max(8, static_cast<int>(std::ceil(n)));
}

PhasePath sample_brownian_bridge(PhasePoint start, PhasePoint end, double T, int N,
                                 double nu, std::uint64_t seed) {
    if (N < 2 || !(nu > 0) || !(T > 0))
        throw ContractError("sample_brownian_bridge: need N >= 2, nu > 0, T > 0");
    const double eps = T / (N + 1);
    PhasePath path;
    path.eps = eps;
    path.p.resize(N + 2);
    path.q.resize(N + 2);
    path.p[0] = start.p;
    path.q[0] = start.q;
    path.p[N + 1] = end.p;
    path.q[N + 1] = end.q;
    SplitMix64 g(mix_stream_seed(seed, 0));
    for (int l = 1; l <= N; ++l) {
        const double tau = T - (l - 1) * eps;
        const double w = eps / tau;
        const double var = nu * eps * (tau - eps) / tau;
        const double sd = std::sqrt(std::max(0.0, var));
        double z0, z1;
        g.normal_pair(z0, z1);
        path.p[l] = path.p[l - 1] + (end.p - path.p[l - 1]) * w + sd * z0;
        path.q[l] = path.q[l - 1] + (end.q - path.q[l - 1]) * w + sd * z1;
    }
    return path;
}

namespace {

struct CompiledSymbol {
    struct Term {
        int a, b;
        double c;
    };
    std::vector<Term> terms;
    explicit CompiledSymbol(const PolySymbol& h) {
        for (const auto& [k, c] : h.terms()) terms.push_back({k.first, k.second, c.real()});
    }
    double operator()(double p, double q) const {
        double r = 0;
        for (const auto& t : terms) {
            double v = t.c;
            for (int i = 0; i < t.a; ++i) v *= p;
            for (int i = 0; i < t.b; ++i) v *= q;
            r += v;
        }
        return r;
    }
};

} // namespace

MCEstimate wiener_mc_propagator(const PolySymbol& h, PhasePoint start, PhasePoint end,
                                double T, double nu, int N, std::size_t n_samples,
                                std::uint64_t seed, double hbar, int n_workers) {
    if (!(nu > 0) || !(T > 0) || N < 2 || n_samples < 1)
        throw ContractError("wiener_mc_propagator: bad parameters");
    if (!h.is_real()) throw ContractError("wiener_mc_propagator: symbol must be real");
    const CompiledSymbol hf(h);
    const double eps = T / (N + 1);

    constexpr std::size_t kChunk = 4096;
    const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;
    struct Part {
        double re = 0, im = 0, re2 = 0, im2 = 0;
    };
    std::vector<Part> parts(n_chunks);

    detail::run_chunks(n_chunks, n_workers, [&](std::size_t c) {
        Part acc;
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(n_samples, lo + kChunk);
        for (std::size_t s = lo; s < hi; ++s) {
            SplitMix64 g(mix_stream_seed(seed, s));
            double p = start.p, q = start.q;
            double action = 0;
            for (int l = 1; l <= N + 1; ++l) {
                double pn, qn;
                if (l <= N) {
                    const double tau = T - (l - 1) * eps;
                    const double w = eps / tau;
                    const double sd =
                        std::sqrt(std::max(0.0, nu * eps * (tau - eps) / tau));
                    double z0, z1;
                    g.normal_pair(z0, z1);
                    pn = p + (end.p - p) * w + sd * z0;
                    qn = q + (end.q - q) * w + sd * z1;
                } else {
                    pn = end.p;
                    qn = end.q;
                }
                const double pb = 0.5 * (p + pn), qb = 0.5 * (q + qn);
                action += 0.5 * (pb * (qn - q) - qb * (pn - p)) - eps * hf(pb, qb);
                p = pn;
                q = qn;
            }
            const double re = std::cos(action / hbar);
            const double im = std::sin(action / hbar);
            acc.re += re;
            acc.im += im;
            acc.re2 += re * re;
            acc.im2 += im * im;
        }
        parts[c] = acc;
    });

    double sre = 0, sim = 0, sre2 = 0, sim2 = 0;
    for (const auto& pt : parts) {
        sre += pt.re;
        sim += pt.im;
        sre2 += pt.re2;
        sim2 += pt.im2;
    }
    const double n = static_cast<double>(n_samples);
    const double mre = sre / n, mim = sim / n;
    const double vre = std::max(0.0, (sre2 / n - mre * mre)) * n / std::max(1.0, n - 1);
    const double vim = std::max(0.0, (sim2 / n - mim * mim)) * n / std::max(1.0, n - 1);

    const double dp = end.p - start.p, dq = end.q - start.q;
    const double mass =
        std::exp(-(dp * dp + dq * dq) / (2.0 * nu * T)) / (2.0 * M_PI * nu * T);
    const double pref = 2.0 * M_PI * hbar * std::exp(nu * T / 2.0) * mass;

    MCEstimate est;
    est.value = pref * Complex(mre, mim);
    est.std_err_re = pref * std::sqrt(vre / n);
    est.std_err_im = pref * std::sqrt(vim / n);
    est.n_samples = n_samples;
    est.seed = seed;
    const double mag = std::abs(est.value);
    const double err = std::hypot(est.std_err_re, est.std_err_im);
    est.low_precision = (mag <= 0) || (err > 0.5 * mag);
    return est;
}

Complex wiener_lattice_propagator(const PolySymbol& h, PhasePoint start,
                                  PhasePoint end, double T, double nu, int N,
                                  double L, int n_pq, double hbar, int n_workers) {
    if (!(nu > 0) || !(T > 0) || N < 2 || n_pq < 16 || !(L > 0))
        throw ContractError("wiener_lattice_propagator: bad parameters");
    if (!h.is_separable())
        throw ContractError("wiener_lattice_propagator: requires separable h = hp(p) + hq(q)");
    const double margin = 4.0 * std::sqrt(nu * T);
    const double extent =
        std::max(std::max(std::abs(start.p), std::abs(start.q)),
                 std::max(std::abs(end.p), std::abs(end.q)));
    if (L < extent + margin)
        throw DomainError("wiener_lattice_propagator: grid misses 4 sqrt(nu T) margin");

    PolySymbol::Terms tp, tq;
    for (const auto& [k, c] : h.terms())
        (k.first > 0 ? tp : tq)[k] = c;
    const CompiledSymbol hp{PolySymbol(std::move(tp))};
    const CompiledSymbol hq{PolySymbol(std::move(tq))};

    const int n = n_pq;
    const double dx = 2.0 * L / n;
    const double eps = T / (N + 1);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = -L + (i + 0.5) * dx;

    // 1D heat kernel over banded offsets, quadrature weight folded in.
    const double sg = std::sqrt(nu * eps);
    if (dx > sg)
        throw ContractError(
            "wiener_lattice_propagator: grid too coarse, need dx <= sqrt(nu*eps)");
    int band = static_cast<int>(std::ceil(5.0 * sg / dx));
    band = std::min(band, n - 1);
    if (band < 2) band = 2;
    std::vector<double> heat(2 * band + 1);
    for (int o = -band; o <= band; ++o)
        heat[o + band] =
            std::exp(-(o * dx) * (o * dx) / (2.0 * nu * eps)) / std::sqrt(2.0 * M_PI * nu * eps) * dx;

    // Phase tables: cross phase E[i][j] = exp(i x_i x_j / 2 hbar) and the
    // midpoint h factors per axis.
    std::vector<Complex> etab(static_cast<std::size_t>(n) * n);
    std::vector<Complex> hptab(static_cast<std::size_t>(n) * n);
    std::vector<Complex> hqtab(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            etab[static_cast<std::size_t>(i) * n + j] =
                std::polar(1.0, xs[i] * xs[j] / (2.0 * hbar));
            const double mid = 0.5 * (xs[i] + xs[j]);
            hptab[static_cast<std::size_t>(i) * n + j] =
                std::polar(1.0, -eps * hp(mid, 0.0) / hbar);
            hqtab[static_cast<std::size_t>(i) * n + j] =
                std::polar(1.0, -eps * hq(0.0, mid) / hbar);
        }

    auto heat1 = [&](double a, double b) {
        return std::exp(-(a - b) * (a - b) / (2.0 * nu * eps)) /
               std::sqrt(2.0 * M_PI * nu * eps);
    };
    // Filon-style cell-exact integration of the cross phase e^{i k x}: the
    // midpoint sample is replaced by the cell average, factor sinc(k dx / 2).
    auto sinc = [](double x) { return std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x; };
    std::vector<double> filon(n);
    for (int i = 0; i < n; ++i) filon[i] = sinc(xs[i] * dx / (4.0 * hbar));

    // field over interior node 1: first kernel factor, exact off-grid start
    std::vector<Complex> field(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double ph = (start.p * xs[j] - xs[i] * start.q) / (2.0 * hbar) -
                              eps * (hp(0.5 * (start.p + xs[i]), 0.0) +
                                     hq(0.0, 0.5 * (start.q + xs[j]))) /
                                  hbar;
            field[static_cast<std::size_t>(i) * n + j] =
                heat1(xs[i], start.p) * heat1(xs[j], start.q) * std::polar(1.0, ph);
        }

    std::vector<Complex> next(static_cast<std::size_t>(n) * n);
    // each q' column owns a private slab, so the parallel loop shares no state
    for (int step = 0; step < N - 1; ++step) {
        detail::run_chunks(static_cast<std::size_t>(n), n_workers, [&](std::size_t qp) {
            std::vector<Complex> slab(static_cast<std::size_t>(n) * n);
            // slab(p', q) = sum_p heat(p'-p) Hp(p,p') E[p,q'] field(p,q),
            // cell-averaged cross phase via the q'-dependent Filon factor
            const double fq = filon[qp];
            for (int pp = 0; pp < n; ++pp) {
                const int plo = std::max(0, pp - band), phi = std::min(n - 1, pp + band);
                Complex* srow = &slab[static_cast<std::size_t>(pp) * n];
                for (int p = plo; p <= phi; ++p) {
                    const Complex f = fq * heat[p - pp + band] *
                                      hptab[static_cast<std::size_t>(p) * n + pp] *
                                      etab[static_cast<std::size_t>(p) * n + qp];
                    const Complex* frow = &field[static_cast<std::size_t>(p) * n];
                    for (int q = 0; q < n; ++q) srow[q] += f * frow[q];
                }
            }
            // next(p', q') = sum_q heat(q'-q) Hq(q,q') conj(E[p',q]) slab(p',q)
            const int qlo = std::max(0, static_cast<int>(qp) - band);
            const int qhi = std::min(n - 1, static_cast<int>(qp) + band);
            for (int pp = 0; pp < n; ++pp) {
                Complex acc = 0;
                const Complex* srow = &slab[static_cast<std::size_t>(pp) * n];
                const Complex* erow = &etab[static_cast<std::size_t>(pp) * n];
                for (int q = qlo; q <= qhi; ++q)
                    acc += heat[q - static_cast<int>(qp) + band] *
                           hqtab[static_cast<std::size_t>(q) * n + qp] *
                           std::conj(erow[q]) * srow[q];
                next[static_cast<std::size_t>(pp) * n + qp] = filon[pp] * acc;
            }
        });
        field.swap(next);
        std::fill(next.begin(), next.end(), Complex(0, 0));
    }

    // last factor, exact off-grid end, explicit quadrature weight; the final
    // integration carries the end-point cross phases, cell-averaged likewise
    const double f_end =
        sinc(end.q * dx / (4.0 * hbar)) * sinc(end.p * dx / (4.0 * hbar));
    Complex total = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double ph = (xs[i] * end.q - end.p * xs[j]) / (2.0 * hbar) -
                              eps * (hp(0.5 * (end.p + xs[i]), 0.0) +
                                     hq(0.0, 0.5 * (end.q + xs[j]))) /
                                  hbar;
            total += heat1(end.p, xs[i]) * heat1(end.q, xs[j]) * std::polar(1.0, ph) *
                     field[static_cast<std::size_t>(i) * n + j];
        }
    total *= dx * dx * f_end;
    return 2.0 * M_PI * hbar * std::exp(nu * T / 2.0) * total;
}

Complex exact_coherent_propagator(const PolySymbol& h, PhasePoint start,
                                  PhasePoint end, double T, int dim, double hbar) {
    FockOperator ham = antinormal_quantize_rule(h, dim, hbar);
    CoherentFamily family(StateVector::ground(dim), hbar);
    StateVector a = family.state(start);
    StateVector b = family.state(end);
    StateVector evolved = schrodinger_evolve(a, ham, T);
    return b.entries.dot(evolved.entries);
}

} // namespace phaseq
