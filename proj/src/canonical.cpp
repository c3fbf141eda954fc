#include "phaseq/canonical.hpp"

#include <array>

#include <cmath>

#include "phaseq/detail/parallel.hpp"

namespace phaseq {

CanonicalMap make_scaling(double lambda) {
    if (lambda == 0) throw ContractError("make_scaling: lambda must be nonzero");
    CanonicalMap m;
    m.kind = "scaling";
    m.forward = [lambda](PhasePoint z) { return PhasePoint{z.p / lambda, lambda * z.q}; };
    m.inverse = [lambda](PhasePoint z) { return PhasePoint{lambda * z.p, z.q / lambda}; };
    m.jacobian = [lambda](PhasePoint) {
        Eigen::Matrix2d j;
        j << 1.0 / lambda, 0.0, 0.0, lambda;
        return j;
    };
    return m;
}

CanonicalMap make_point_transform(std::function<double(double)> f,
                                  std::function<double(double)> f_prime,
                                  std::function<double(double)> f_inverse,
                                  std::function<double(double)> f_second,
                                  double q_min, double q_max) {
    if (!(q_min < q_max)) throw ContractError("make_point_transform: empty domain");
    // f' must stay away from zero on the domain; probe a dense sample.
    for (int i = 0; i <= 256; ++i) {
        const double q = q_min + (q_max - q_min) * i / 256.0;
        if (!(f_prime(q) > 1e-12))
            throw DomainError("make_point_transform: f' vanishes on the domain");
    }
    CanonicalMap m;
    m.kind = "point";
    m.q_min = q_min;
    m.q_max = q_max;
    m.forward = [f, f_prime](PhasePoint z) {
        return PhasePoint{z.p / f_prime(z.q), f(z.q)};
    };
    m.inverse = [f_inverse, f_prime](PhasePoint z) {
        const double q = f_inverse(z.q); // here z = (r, s)
        return PhasePoint{z.p * f_prime(q), q};
    };
    m.jacobian = [f_prime, f_second](PhasePoint z) {
        const double fp = f_prime(z.q), fs = f_second(z.q);
        Eigen::Matrix2d j;
        j << 1.0 / fp, -z.p * fs / (fp * fp), 0.0, fp;
        return j;
    };
    return m;
}

CanonicalMap make_cubic(double c, double q_min, double q_max) {
    if (c < 0) throw ContractError("make_cubic: need c >= 0");
    auto f = [c](double q) { return q + c * q * q * q; };
    auto fp = [c](double q) { return 1.0 + 3.0 * c * q * q; };
    auto fs = [c](double q) { return 6.0 * c * q; };
    auto finv = [c](double s) {
        if (c == 0) return s;
        // q^3 + q/c - s/c = 0, single real root (monotone cubic), Cardano.
        const double p3 = 1.0 / (3.0 * c);
        const double r2 = s / (2.0 * c);
        const double disc = std::sqrt(r2 * r2 + p3 * p3 * p3);
        return std::cbrt(r2 + disc) + std::cbrt(r2 - disc);
    };
    auto m = make_point_transform(f, fp, finv, fs, q_min, q_max);
    m.kind = "cubic";
    return m;
}

std::function<double(PhasePoint)> transform_symbol(const PolySymbol& h,
                                                   const CanonicalMap& map) {
    if (!h.is_real()) throw ContractError("transform_symbol: symbol must be real");
    auto inv = map.inverse;
    const double qmin = map.q_min, qmax = map.q_max;
    return [h, inv, qmin, qmax](PhasePoint rs) {
        PhasePoint z = inv(rs);
        if (z.q < qmin || z.q > qmax)
            throw DomainError("transform_symbol: point outside the map's image");
        return h.evaluate_real(z.p, z.q);
    };
}

namespace {

// Invariance comparisons integrate over the common disk
// (p^2+q^2)/(2 hbar) <= cap in both charts; the compared low-state matrix
// elements are Gaussian-negligible beyond it.
constexpr double kInvarianceAlphaCap = 55.0;

struct RsBox {
    double rmin, rmax, smin, smax;
};

// Bounding box of forward([-L,L]^2 intersected with the map domain), sampled
// along the rectangle boundary (exact for the built-in monotone families).
RsBox image_box(const CanonicalMap& map, double L) {
    const double qlo = std::max(-L, map.q_min);
    const double qhi = std::min(L, map.q_max);
    if (!(qlo < qhi)) throw DomainError("image_box: map domain misses the grid");
    RsBox box{1e300, -1e300, 1e300, -1e300};
    const int n = 512;
    auto feed = [&](double p, double q) {
        PhasePoint rs = map.forward({p, q});
        box.rmin = std::min(box.rmin, rs.p);
        box.rmax = std::max(box.rmax, rs.p);
        box.smin = std::min(box.smin, rs.q);
        box.smax = std::max(box.smax, rs.q);
    };
    for (int i = 0; i <= n; ++i) {
        const double q = qlo + (qhi - qlo) * i / n;
        feed(-L, q);
        feed(L, q);
        const double p = -L + 2.0 * L * i / n;
        feed(p, qlo);
        feed(p, qhi);
    }
    return box;
}

} // namespace

std::vector<QuadratureQuantization> quantize_in_transformed_coords_batch(
    const std::vector<PolySymbol>& hs, const CanonicalMap& map, int dim, double hbar,
    double L, int n_grid, int n_workers) {
    if (!(L > 0) || n_grid < 16)
        throw ContractError("quantize_in_transformed_coords: bad quadrature parameters");
    for (const auto& h : hs)
        if (!h.is_real())
            throw ContractError("quantize_in_transformed_coords: symbol must be real");

    const RsBox box = image_box(map, L);
    // Node spacing in (r,s) so that the pulled-back (p,q) sampling is at least
    // as fine as the reference grid: divide by the worst inverse-map stretch.
    const double delta = 2.0 * L / n_grid;
    double stretch_r = 1.0, stretch_s = 1.0;
    {
        const double qlo = std::max(-L, map.q_min), qhi = std::min(L, map.q_max);
        for (int i = 0; i <= 64; ++i)
            for (int j = 0; j <= 64; ++j) {
                PhasePoint z{-L + 2.0 * L * i / 64.0, qlo + (qhi - qlo) * j / 64.0};
                Eigen::Matrix2d jinv = map.jacobian(z).inverse();
                stretch_r = std::max(stretch_r, std::abs(jinv(0, 0)));
                stretch_s = std::max(stretch_s, std::abs(jinv(1, 1)));
            }
    }
    const int nr = std::max(
        16, static_cast<int>(std::ceil((box.rmax - box.rmin) * stretch_r / delta)));
    const int ns = std::max(
        16, static_cast<int>(std::ceil((box.smax - box.smin) * stretch_s / delta)));
    const double dr = (box.rmax - box.rmin) / nr;
    const double ds = (box.smax - box.smin) / ns;
    const double w = dr * ds;

    const double max_alpha2 = std::min(L * L / hbar, kInvarianceAlphaCap);
    DisplacementEngine eng(displacement_work_dim(dim, max_alpha2), hbar);
    Vector fid = Vector::Zero(eng.dim());
    fid(0) = 1.0;

    const double tol = 1e-12;
    const std::size_t n_sym = hs.size();
    const std::size_t n_chunks = std::min<std::size_t>(nr, 64);
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
        for (std::size_t i = c; i < static_cast<std::size_t>(nr); i += n_chunks) {
            const double r = box.rmin + (i + 0.5) * dr;
            for (int j = 0; j < ns; ++j) {
                const double s = box.smin + (j + 0.5) * ds;
                PhasePoint z = map.inverse({r, s});
                if (z.q < map.q_min - tol || z.q > map.q_max + tol) continue;
                if (std::abs(z.p) > L || std::abs(z.q) > L) continue;
                if ((z.p * z.p + z.q * z.q) / (2.0 * hbar) > kInvarianceAlphaCap)
                    continue;
                Vector psi = displaced_projected(eng, fid, z, dim);
                Matrix proj = w * (psi * psi.adjoint());
                const bool edge = i == 0 || i + 1 == static_cast<std::size_t>(nr) ||
                                  j == 0 || j + 1 == ns;
                for (std::size_t sidx = 0; sidx < n_sym; ++sidx) {
                    const double hv = hs[sidx].evaluate_real(z.p, z.q);
                    if (hv == 0.0) continue;
                    acc.bulk[sidx].noalias() += hv * proj;
                    if (edge) acc.ring[sidx].noalias() += hv * proj;
                    if (j < 5) acc.lo[sidx][j].noalias() += hv * proj;
                    if (j >= ns - 5) acc.hi[sidx][ns - 1 - j].noalias() += hv * proj;
                }
            }
        }
    });
    const int t2 = std::max(2, trust_dim(dim) / 2);
    std::vector<QuadratureQuantization> out;
    out.reserve(n_sym);
    for (std::size_t sidx = 0; sidx < n_sym; ++sidx) {
        Matrix total = Matrix::Zero(dim, dim), ring = Matrix::Zero(dim, dim);
        std::array<Matrix, 5> lo{Matrix::Zero(dim, dim), Matrix::Zero(dim, dim),
                                 Matrix::Zero(dim, dim), Matrix::Zero(dim, dim),
                                 Matrix::Zero(dim, dim)};
        std::array<Matrix, 5> hi = lo;
        for (std::size_t c = 0; c < n_chunks; ++c) {
            total += parts[c].bulk[sidx];
            ring += parts[c].ring[sidx];
            for (int e = 0; e < 5; ++e) {
                lo[e] += parts[c].lo[sidx][e];
                hi[e] += parts[c].hi[sidx][e];
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
        const double tail = ring.topLeftCorner(t2, t2).cwiseAbs().maxCoeff();
        out.push_back({FockOperator(std::move(total), hbar), tail, tail <= 1e-8});
    }
    return out;
}

QuadratureQuantization quantize_in_transformed_coords(const PolySymbol& h,
                                                      const CanonicalMap& map,
                                                      int dim, double hbar, double L,
                                                      int n_grid, int n_workers) {
    auto v = quantize_in_transformed_coords_batch({h}, map, dim, hbar, L, n_grid,
                                                  n_workers);
    return std::move(v.front());
}

std::vector<QuadratureQuantization> quantize_reference_for_map_batch(
    const std::vector<PolySymbol>& hs, const CanonicalMap& map, int dim, double hbar,
    double L, int n_grid, int n_workers) {
    CoherentFamily family(StateVector::ground(dim), hbar);
    // same region as the transformed quadrature, with the domain cut landing
    // on cell boundaries
    const double qlo = std::max(-L, map.q_min), qhi = std::min(L, map.q_max);
    const double delta = 2.0 * L / n_grid;
    const int nq = std::max(16, static_cast<int>(std::lround((qhi - qlo) / delta)));
    return antinormal_quantize_quadrature_rect(hs, family, -L, L, qlo, qhi, n_grid, nq,
                                               kInvarianceAlphaCap, n_workers);
}

QuadratureQuantization quantize_reference_for_map(const PolySymbol& h,
                                                  const CanonicalMap& map, int dim,
                                                  double hbar, double L, int n_grid,
                                                  int n_workers) {
    auto v = quantize_reference_for_map_batch({h}, map, dim, hbar, L, n_grid, n_workers);
    return std::move(v.front());
}

GaugePhaseReport gauge_phase_report(const CanonicalMap& map, const PolySymbol& g,
                                    PhasePoint start, PhasePoint end, double hbar) {
    if (!g.is_real()) throw ContractError("gauge_phase_report: G must be real");
    if (!map.in_domain(map.inverse(start)) || !map.in_domain(map.inverse(end)))
        throw DomainError("gauge_phase_report: endpoint outside the map's image");
    GaugePhaseReport rep;
    const double gs = g.evaluate_real(start.p, start.q);
    const double ge = g.evaluate_real(end.p, end.q);
    rep.phase_start = std::polar(1.0, gs / hbar);
    rep.phase_end = std::polar(1.0, ge / hbar);
    rep.relative_phase = std::polar(1.0, (ge - gs) / hbar);
    return rep;
}

double total_differential_residual(const PolySymbol& g, const PhasePath& path) {
    path.validate();
    double sum = 0;
    for (std::size_t l = 0; l + 1 < path.nodes(); ++l)
        sum += g.evaluate_real(path.p[l + 1], path.q[l + 1]) -
               g.evaluate_real(path.p[l], path.q[l]);
    const double direct = g.evaluate_real(path.p.back(), path.q.back()) -
                          g.evaluate_real(path.p.front(), path.q.front());
    return std::abs(sum - direct);
}

} // namespace phaseq
