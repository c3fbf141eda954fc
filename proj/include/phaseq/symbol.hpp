#ifndef PHASEQ_SYMBOL_HPP
#define PHASEQ_SYMBOL_HPP

#include <complex>
#include <map>
#include <string>
#include <utility>

namespace phaseq {

using Complex = std::complex<double>;

/// Classical observable as a finite sum of monomials  sum c_ab p^a q^b.
/// Keys are (a, b) exponent pairs; the map keeps deterministic ordering.
class PolySymbol {
  public:
    using Key   = std::pair<int, int>;
    using Terms = std::map<Key, Complex>;

    PolySymbol() = default;
    explicit PolySymbol(Terms t) : terms_(std::move(t)) { prune(); }

    static PolySymbol constant(Complex c);
    static PolySymbol p(int power = 1);
    static PolySymbol q(int power = 1);
    /// Single monomial c * p^a q^b.
    static PolySymbol monomial(int a, int b, Complex c = 1.0);

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    int max_degree() const;
    bool is_real(double tol = 1e-12) const;
    /// True when no term mixes p and q (H = T(p) + V(q)).
    bool is_separable() const;

    Complex evaluate(Complex p, Complex q) const;
    double evaluate_real(double p, double q) const;

    PolySymbol d_dp() const;
    PolySymbol d_dq() const;

    PolySymbol operator+(const PolySymbol& o) const;
    PolySymbol operator-(const PolySymbol& o) const;
    PolySymbol operator*(const PolySymbol& o) const;
    PolySymbol operator*(Complex c) const;
    PolySymbol operator-() const { return *this * Complex(-1.0); }

    bool near_zero(double tol = 1e-12) const;
    std::string to_string() const;

  private:
    void prune(double tol = 0.0);
    Terms terms_;
};

inline PolySymbol operator*(Complex c, const PolySymbol& s) { return s * c; }

/// Parse text like "2.5 p^2 q - 0.5 q^4 + 1". Whitespace-insensitive,
/// signed real coefficients, optional integer exponents, no parentheses.
/// Throws ParseError with the offending position.
PolySymbol parse_symbol(const std::string& text);

} // namespace phaseq

#endif
