#include "phaseq/symbol.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "phaseq/errors.hpp"

namespace phaseq {

PolySymbol PolySymbol::constant(Complex c) { return monomial(0, 0, c); }
PolySymbol PolySymbol::p(int power) { return monomial(power, 0); }
PolySymbol PolySymbol::q(int power) { return monomial(0, power); }

PolySymbol PolySymbol::monomial(int a, int b, Complex c) {
    if (a < 0 || b < 0) throw ContractError("PolySymbol: negative exponent");
    PolySymbol s;
    if (c != Complex(0.0)) s.terms_[{a, b}] = c;
    return s;
}

int PolySymbol::max_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
    return d;
}

bool PolySymbol::is_real(double tol) const {
    for (const auto& [k, c] : terms_)
        if (std::abs(c.imag()) > tol) return false;
    return true;
}

bool PolySymbol::is_separable() const {
    for (const auto& [k, c] : terms_)
        if (k.first > 0 && k.second > 0) return false;
    return true;
}

Complex PolySymbol::evaluate(Complex p, Complex q) const {
    Complex r = 0.0;
    for (const auto& [k, c] : terms_) {
        Complex t = c;
        for (int i = 0; i < k.first; ++i) t *= p;
        for (int i = 0; i < k.second; ++i) t *= q;
        r += t;
    }
    return r;
}

double PolySymbol::evaluate_real(double p, double q) const {
    return evaluate(p, q).real();
}

PolySymbol PolySymbol::d_dp() const {
    Terms t;
    for (const auto& [k, c] : terms_)
        if (k.first > 0) t[{k.first - 1, k.second}] = c * double(k.first);
    return PolySymbol(std::move(t));
}

PolySymbol PolySymbol::d_dq() const {
    Terms t;
    for (const auto& [k, c] : terms_)
        if (k.second > 0) t[{k.first, k.second - 1}] = c * double(k.second);
    return PolySymbol(std::move(t));
}

PolySymbol PolySymbol::operator+(const PolySymbol& o) const {
    Terms t = terms_;
    for (const auto& [k, c] : o.terms_) t[k] += c;
    return PolySymbol(std::move(t));
}

PolySymbol PolySymbol::operator-(const PolySymbol& o) const {
    Terms t = terms_;
    for (const auto& [k, c] : o.terms_) t[k] -= c;
    return PolySymbol(std::move(t));
}

PolySymbol PolySymbol::operator*(const PolySymbol& o) const {
    Terms t;
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : o.terms_)
            t[{ka.first + kb.first, ka.second + kb.second}] += ca * cb;
    return PolySymbol(std::move(t));
}

PolySymbol PolySymbol::operator*(Complex c) const {
    Terms t;
    if (c != Complex(0.0))
        for (const auto& [k, v] : terms_) t[k] = v * c;
    return PolySymbol(std::move(t));
}

bool PolySymbol::near_zero(double tol) const {
    for (const auto& [k, c] : terms_)
        if (std::abs(c) > tol) return false;
    return true;
}

void PolySymbol::prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = (std::abs(it->second) <= tol) ? terms_.erase(it) : std::next(it);
}

std::string PolySymbol::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        double re = c.real();
        if (!first) os << (re < 0 ? " - " : " + ");
        else if (re < 0) os << "-";
        first = false;
        double mag = std::abs(re);
        bool has_var = k.first > 0 || k.second > 0;
        if (!has_var || std::abs(mag - 1.0) > 1e-15) os << mag;
        if (k.first > 0) {
            os << (std::abs(mag - 1.0) > 1e-15 || !has_var ? " " : "") << "p";
            if (k.first > 1) os << "^" << k.first;
        }
        if (k.second > 0) {
            os << (k.first > 0 || std::abs(mag - 1.0) > 1e-15 ? " " : "") << "q";
            if (k.second > 1) os << "^" << k.second;
        }
    }
    return os.str();
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }
};

double parse_number(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.i;
    std::size_t j = c.i;
    while (j < c.s.size() &&
           (std::isdigit(static_cast<unsigned char>(c.s[j])) || c.s[j] == '.' ||
            c.s[j] == 'e' || c.s[j] == 'E' ||
            ((c.s[j] == '+' || c.s[j] == '-') && j > c.i &&
             (c.s[j - 1] == 'e' || c.s[j - 1] == 'E'))))
        ++j;
    if (j == start) throw ParseError("expected a number", start);
    const std::string tok = c.s.substr(start, j - start);
    double v;
    std::size_t used = 0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError("malformed number", start);
    }
    if (used != tok.size()) throw ParseError("malformed number", start);
    c.i = j;
    return v;
}

int parse_exponent(Cursor& c) {
    if (c.peek() != '^') return 1;
    ++c.i;
    c.skip_ws();
    std::size_t start = c.i;
    std::size_t j = c.i;
    while (j < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[j]))) ++j;
    if (j == start) throw ParseError("expected a non-negative integer exponent", start);
    int e = std::stoi(c.s.substr(start, j - start));
    c.i = j;
    return e;
}

} // namespace

PolySymbol parse_symbol(const std::string& text) {
    Cursor c{text};
    PolySymbol::Terms terms;
    bool any = false;
    while (!c.done()) {
        double sign = 1.0;
        char ch = c.peek();
        if (ch == '+' || ch == '-') {
            sign = (ch == '-') ? -1.0 : 1.0;
            ++c.i;
        } else if (any) {
            throw ParseError("expected '+' or '-' between terms", c.i);
        }
        if (c.done()) throw ParseError("dangling sign", c.i);

        double coeff = 1.0;
        bool saw_something = false;
        ch = c.peek();
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            coeff = parse_number(c);
            saw_something = true;
        }
        int a = 0, b = 0;
        while (true) {
            ch = c.peek();
            if (ch == 'p' || ch == 'P') {
                ++c.i;
                a += parse_exponent(c);
                saw_something = true;
            } else if (ch == 'q' || ch == 'Q') {
                ++c.i;
                b += parse_exponent(c);
                saw_something = true;
            } else {
                break;
            }
        }
        if (!saw_something)
            throw ParseError(std::string("unexpected character '") + ch + "'", c.i);
        terms[{a, b}] += sign * coeff;
        any = true;
    }
    if (!any) throw ParseError("empty symbol", 0);
    return PolySymbol(std::move(terms));
}

} // namespace phaseq
