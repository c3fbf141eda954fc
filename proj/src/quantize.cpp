#include "phaseq/quantize.hpp"

#include <array>

#include <cmath>

#include "phaseq/detail/parallel.hpp"

namespace phaseq {

namespace {

// Pascal-triangle binomials, small degrees only.
double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Complex ipow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

} // namespace

HoloCoeffs to_holomorphic_basis(const PolySymbol& h) {
    // p = (w - wbar)/(2i), q = (w + wbar)/2.
    HoloCoeffs out;
    for (const auto& [key, c] : h.terms()) {
        const int a = key.first, b = key.second;
        const Complex base = c / (std::pow(2.0, a + b) * ipow(a));
        for (int i = 0; i <= a; ++i) {
            const double ca = binom(a, i) * ((a - i) % 2 ? -1.0 : 1.0);
            for (int j = 0; j <= b; ++j) {
                const double cb = binom(b, j);
                out[{i + j, (a - i) + (b - j)}] += base * ca * cb;
            }
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = (std::abs(it->second) <= 1e-300) ? out.erase(it) : std::next(it);
    return out;
}

PolySymbol from_holomorphic_basis(const HoloCoeffs& coeffs) {
    // w^k wbar^l = (q+ip)^k (q-ip)^l.
    PolySymbol::Terms terms;
    for (const auto& [key, c] : coeffs) {
        const int k = key.first, l = key.second;
        for (int i = 0; i <= k; ++i) {
            for (int j = 0; j <= l; ++j) {
                Complex f = c * binom(k, i) * binom(l, j) * ipow(k - i) *
                            ipow(l - j) * ((l - j) % 2 ? -1.0 : 1.0);
                terms[{(k - i) + (l - j), i + j}] += f;
            }
        }
    }
    return PolySymbol(std::move(terms));
}

FockOperator antinormal_quantize_rule(const PolySymbol& h, int dim, double hbar) {
    if (h.max_degree() * 4 > dim)
        throw ContractError("antinormal_quantize_rule: degree too high for dim (need degree <= dim/4)");
    HoloCoeffs coeffs = to_holomorphic_basis(h);
    int kmax = 0, lmax = 0;
    for (const auto& [key, c] : coeffs) {
        kmax = std::max(kmax, key.first);
        lmax = std::max(lmax, key.second);
    }
    auto [a, ad] = build_ladder(dim, hbar);
    const double s = std::sqrt(2.0 * hbar);
    Matrix w = s * a.entries;   // Q + iP
    Matrix wd = s * ad.entries; // Q - iP

    std::vector<Matrix> wp(kmax + 1), wdp(lmax + 1);
    wp[0] = Matrix::Identity(dim, dim);
    for (int k = 1; k <= kmax; ++k) wp[k] = wp[k - 1] * w;
    wdp[0] = Matrix::Identity(dim, dim);
    for (int l = 1; l <= lmax; ++l) wdp[l] = wdp[l - 1] * wd;

    Matrix out = Matrix::Zero(dim, dim);
    for (const auto& [key, c] : coeffs)
        out.noalias() += c * (wp[key.first] * wdp[key.second]);
    return {std::move(out), hbar};
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

void check_ground_fiducial(const CoherentFamily& family) {
    Complex a0 = family.fiducial().entries(0);
    if (std::abs(std::abs(a0) - 1.0) > 1e-10)
        throw ContractError("quadrature quantization requires the ground-state fiducial");
}

} // namespace

std::vector<QuadratureQuantization> antinormal_quantize_quadrature_rect(
    const std::vector<PolySymbol>& hs, const CoherentFamily& family, double pmin,
    double pmax, double qmin, double qmax, int n_p, int n_q, double alpha2_cap,
    int n_workers) {
    if (!(pmax > pmin) || !(qmax > qmin) || n_p < 16 || n_q < 16)
        throw ContractError("quadrature quantization: bad rectangle");
    check_ground_fiducial(family);
    for (const auto& h : hs)
        if (!h.is_real())
            throw ContractError("quadrature quantization: symbol must be real");

    const int dim = family.dim();
    const double hbar = family.hbar();
    const double corner2 = std::max(pmin * pmin, pmax * pmax) +
                           std::max(qmin * qmin, qmax * qmax);
    const double max_alpha2 = std::min(corner2 / (2.0 * hbar), alpha2_cap);
    DisplacementEngine eng(displacement_work_dim(dim, max_alpha2), hbar);
    Vector fid = Vector::Zero(eng.dim());
    fid.head(dim) = family.fiducial().entries;

    std::vector<CompiledSymbol> fs;
    fs.reserve(hs.size());
    for (const auto& h : hs) fs.emplace_back(h);

    const double dp = (pmax - pmin) / n_p;
    const double dq = (qmax - qmin) / n_q;
    const double w = dp * dq;

    const std::size_t n_sym = hs.size();
    const std::size_t n_chunks = std::min<std::size_t>(n_p, 64);
    // per (chunk, symbol): bulk sum, outer-ring sum, and the two q-rows at
    // each q edge for the Euler-Maclaurin boundary term
    struct Acc {
        std::vector<Matrix> bulk, ring;
        std::vector<std::array<Matrix, 5>> lo, hi; // edge rows for the E-M term
        explicit Acc(std::size_t n, int dim) {
            bulk.assign(n, Matrix::Zero(dim, dim));
            ring.assign(n, Matrix::Zero(dim, dim));
            std::array<Matrix, 5> z{Matrix::Zero(dim, dim), Matrix::Zero(dim, dim),
                                    Matrix::Zero(dim, dim), Matrix::Zero(dim, dim),
                                    Matrix::Zero(dim, dim)};
            lo.assign(n, z);
            hi.assign(n, z);
        }
    };
    std::vector<Acc> parts(n_chunks, Acc(n_sym, dim));

    detail::run_chunks(n_chunks, n_workers, [&](std::size_t c) {
        Acc& acc = parts[c];
        for (std::size_t i = c; i < static_cast<std::size_t>(n_p); i += n_chunks) {
            const double p = pmin + (i + 0.5) * dp;
            const bool edge_i = (i == 0) || (i + 1 == static_cast<std::size_t>(n_p));
            for (int j = 0; j < n_q; ++j) {
                const double q = qmin + (j + 0.5) * dq;
                if ((p * p + q * q) / (2.0 * hbar) > alpha2_cap) continue;
                Vector psi = displaced_projected(eng, fid, {p, q}, dim);
                Matrix proj = w * (psi * psi.adjoint());
                const bool edge = edge_i || j == 0 || j + 1 == n_q;
                for (std::size_t s = 0; s < n_sym; ++s) {
                    const double hv = fs[s](p, q);
                    if (hv == 0.0) continue;
                    acc.bulk[s].noalias() += hv * proj;
                    if (edge) acc.ring[s].noalias() += hv * proj;
                    if (j < 5) acc.lo[s][j].noalias() += hv * proj;
                    if (j >= n_q - 5) acc.hi[s][n_q - 1 - j].noalias() += hv * proj;
                }
            }
        }
    });

    // The tail proxy (outer-ring contribution) is judged on the first
    // trust/2 states: the ring legitimately feeds high Fock levels.
    const int t2 = std::max(2, trust_dim(dim) / 2);
    std::vector<QuadratureQuantization> out;
    out.reserve(n_sym);
    for (std::size_t s = 0; s < n_sym; ++s) {
        Matrix total = Matrix::Zero(dim, dim), ring = Matrix::Zero(dim, dim);
        std::array<Matrix, 5> lo{Matrix::Zero(dim, dim), Matrix::Zero(dim, dim),
                                 Matrix::Zero(dim, dim), Matrix::Zero(dim, dim),
                                 Matrix::Zero(dim, dim)};
        std::array<Matrix, 5> hi = lo;
        for (std::size_t c = 0; c < n_chunks; ++c) {
            total += parts[c].bulk[s];
            ring += parts[c].ring[s];
            for (int e = 0; e < 5; ++e) {
                lo[e] += parts[c].lo[s][e];
                hi[e] += parts[c].hi[s][e];
            }
        }
        // midpoint Euler-Maclaurin: int = sum + (d^2/24)(F'(top) - F'(bottom));
        // third-order one-sided slopes from the four outermost rows keep a
        // domain cut through live integrand at quadrature accuracy
        // F'(edge) = (31 F1/8 - 229 F2/24 + 75 F3/8 - 37 F4/8 + 11 F5/12)/d,
        // fourth order in the row spacing
        const auto slope = [](const std::array<Matrix, 5>& r) {
            return (93.0 * r[0] - 229.0 * r[1] + 225.0 * r[2] - 111.0 * r[3] +
                    22.0 * r[4]) /
                   24.0;
        };
        total += (slope(hi) + slope(lo)) / 24.0;
        total /= (2.0 * M_PI * hbar);
        ring /= (2.0 * M_PI * hbar);
        double tail = ring.topLeftCorner(t2, t2).cwiseAbs().maxCoeff();
        out.push_back({FockOperator(std::move(total), hbar), tail, tail <= 1e-8});
    }
    return out;
}

std::vector<QuadratureQuantization> antinormal_quantize_quadrature_batch(
    const std::vector<PolySymbol>& hs, const CoherentFamily& family, double L,
    int n_grid, int n_workers) {
    if (!(L > 0) || n_grid < 16)
        throw ContractError("quadrature quantization: need L > 0 and n_grid >= 16");
    return antinormal_quantize_quadrature_rect(hs, family, -L, L, -L, L, n_grid,
                                               n_grid, 1e300, n_workers);
}

QuadratureQuantization antinormal_quantize_quadrature(const PolySymbol& h,
                                                      const CoherentFamily& family,
                                                      double L, int n_grid,
                                                      int n_workers) {
    auto v = antinormal_quantize_quadrature_batch({h}, family, L, n_grid, n_workers);
    return std::move(v.front());
}

Complex lower_symbol(const FockOperator& h, const CoherentFamily& family, PhasePoint pt,
                     double* leaked_weight) {
    if (h.dim != family.dim()) throw ContractError("lower_symbol: dimension mismatch");
    StateVector psi = family.state(pt, leaked_weight);
    return psi.entries.dot(h.entries * psi.entries);
}

double default_quadrature_halfwidth(const PolySymbol& h, double hbar) {
    return (8.0 + h.max_degree()) * std::sqrt(hbar);
}

} // namespace phaseq
