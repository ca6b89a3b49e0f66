#include "spinlab/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace spinlab {

namespace {

double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

void add_term(std::map<IntVec, Rational>& terms, const IntVec& e, const Rational& c) {
    if (c.numerator() == 0) return;
    auto it = terms.find(e);
    if (it == terms.end()) {
        terms.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second.numerator() == 0) terms.erase(it);
}

long long binomial(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

Polynomial make_polynomial(int dim) {
    require(dim >= 1, "polynomial dimension must be >= 1");
    Polynomial p;
    p.dim = dim;
    return p;
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& kv : terms) {
        int s = 0;
        for (int e : kv.first) s += e;
        d = std::max(d, s);
    }
    return d;
}

bool Polynomial::is_homogeneous() const {
    int d = -1;
    for (const auto& kv : terms) {
        int s = 0;
        for (int e : kv.first) s += e;
        if (d >= 0 && s != d) return false;
        d = s;
    }
    return true;
}

Polynomial Polynomial::laplacian() const {
    Polynomial out = make_polynomial(dim);
    for (const auto& [e, c] : terms)
        for (int i = 0; i < dim; ++i)
            if (e[i] >= 2) {
                IntVec f = e;
                f[i] -= 2;
                add_term(out.terms, f, c * Rational(static_cast<long long>(e[i]) * (e[i] - 1)));
            }
    return out;
}

Polynomial Polynomial::times_norm_sq() const {
    Polynomial out = make_polynomial(dim);
    for (const auto& [e, c] : terms)
        for (int i = 0; i < dim; ++i) {
            IntVec f = e;
            f[i] += 2;
            add_term(out.terms, f, c);
        }
    return out;
}

Polynomial Polynomial::scaled(const Rational& c) const {
    Polynomial out = make_polynomial(dim);
    for (const auto& [e, v] : terms) add_term(out.terms, e, v * c);
    return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    require(dim == o.dim, "polynomial dimensions differ");
    Polynomial out = *this;
    for (const auto& [e, v] : o.terms) add_term(out.terms, e, v);
    return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o.scaled(Rational(-1)); }

double Polynomial::eval(const RVec& x) const {
    double s = 0.0;
    for (const auto& [e, c] : terms) {
        double m = to_double(c);
        for (int i = 0; i < dim; ++i) m *= std::pow(x(i), e[i]);
        s += m;
    }
    return s;
}

RVec Polynomial::gradient(const RVec& x) const {
    RVec g = RVec::Zero(dim);
    for (const auto& [e, c] : terms)
        for (int k = 0; k < dim; ++k) {
            if (e[k] == 0) continue;
            double m = to_double(c) * e[k];
            for (int i = 0; i < dim; ++i) m *= std::pow(x(i), i == k ? e[i] - 1 : e[i]);
            g(k) += m;
        }
    return g;
}

RMat Polynomial::hessian(const RVec& x) const {
    RMat H = RMat::Zero(dim, dim);
    for (const auto& [e, c] : terms)
        for (int k = 0; k < dim; ++k)
            for (int l = k; l < dim; ++l) {
                IntVec f = e;
                double m = to_double(c);
                m *= f[k];
                if (f[k] == 0) continue;
                f[k] -= 1;
                m *= f[l];
                if (f[l] == 0) continue;
                f[l] -= 1;
                for (int i = 0; i < dim; ++i) m *= std::pow(x(i), f[i]);
                H(k, l) += m;
                if (k != l) H(l, k) += m;
            }
    return H;
}

std::string Polynomial::to_string() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms) {
        Rational a = c;
        if (!first) os << (a.numerator() < 0 ? " - " : " + ");
        else if (a.numerator() < 0) os << "-";
        if (a.numerator() < 0) a = -a;
        first = false;
        os << a.numerator();
        if (a.denominator() != 1) os << "/" << a.denominator();
        for (int i = 0; i < dim; ++i) {
            if (e[i] == 0) continue;
            os << "*x" << (i + 1);
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    return os.str();
}

namespace {

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool at_end() {
        skip();
        return pos >= s.size();
    }
    [[noreturn]] void error(const std::string& what) {
        fail(ErrorCode::Parse, "polynomial: " + what + " at position " + std::to_string(pos));
    }
    long long integer() {
        skip();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) error("expected digits");
        if (pos - start > 17) error("number too long");
        return std::stoll(s.substr(start, pos - start));
    }
    Rational number() {
        long long whole = integer();
        Rational r(whole);
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos - start > 15) error("too many decimals");
            long long den = 1, num = 0;
            for (std::size_t k = start; k < pos; ++k) {
                num = num * 10 + (s[k] - '0');
                den *= 10;
            }
            r += Rational(num, den);
        }
        skip();
        if (pos < s.size() && s[pos] == '/') {
            ++pos;
            long long d = integer();
            if (d == 0) error("zero denominator");
            r /= Rational(d);
        }
        return r;
    }
    // x<i>[^<e>]
    std::pair<int, int> variable() {
        skip();
        if (pos >= s.size() || s[pos] != 'x') error("expected variable x<i>");
        ++pos;
        long long idx = integer();
        if (idx < 1 || idx > 64) error("variable index out of range");
        int e = 1;
        skip();
        if (pos < s.size() && s[pos] == '^') {
            ++pos;
            long long v = integer();
            if (v > 64) error("exponent too large");
            e = static_cast<int>(v);
        }
        return {static_cast<int>(idx), e};
    }
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, int dim) {
    Parser P{text};
    std::vector<std::pair<Rational, std::map<int, int>>> monos;
    int maxvar = 0;
    bool first = true;
    while (!P.at_end()) {
        Rational sign(1);
        P.skip();
        if (text[P.pos] == '+' || text[P.pos] == '-') {
            if (text[P.pos] == '-') sign = Rational(-1);
            ++P.pos;
        } else if (!first) {
            P.error("expected '+' or '-'");
        }
        first = false;
        P.skip();
        Rational coef(1);
        std::map<int, int> exps;
        bool need_factor = true;
        if (P.pos < text.size() && std::isdigit(static_cast<unsigned char>(text[P.pos]))) {
            coef = P.number();
            need_factor = false;
            P.skip();
            if (P.pos < text.size() && text[P.pos] == '*') {
                ++P.pos;
                need_factor = true;
            }
        }
        if (need_factor) {
            while (true) {
                auto [v, e] = P.variable();
                exps[v] += e;
                maxvar = std::max(maxvar, v);
                P.skip();
                if (P.pos < text.size() && text[P.pos] == '*') {
                    ++P.pos;
                    continue;
                }
                break;
            }
        }
        monos.push_back({sign * coef, exps});
    }
    if (monos.empty()) fail(ErrorCode::Parse, "polynomial: empty expression");
    if (dim <= 0) dim = std::max(1, maxvar);
    if (maxvar > dim) fail(ErrorCode::Parse, "polynomial uses x" + std::to_string(maxvar) + " beyond dimension " + std::to_string(dim));
    Polynomial p = make_polynomial(dim);
    for (const auto& [c, exps] : monos) {
        IntVec e(dim, 0);
        for (const auto& [v, k] : exps) e[v - 1] += k;
        add_term(p.terms, e, c);
    }
    return p;
}

Polynomial real_power_x1_ix2(int dim, int p) {
    require(dim >= 2 && p >= 0, "real_power_x1_ix2 needs dim >= 2, p >= 0");
    Polynomial out = make_polynomial(dim);
    // Re(i^k) = 1, 0, -1, 0
    for (int k = 0; k <= p; k += 2) {
        IntVec e(dim, 0);
        e[0] = p - k;
        e[1] = k;
        add_term(out.terms, e, Rational(binomial(p, k) * ((k / 2) % 2 == 0 ? 1 : -1)));
    }
    return out;
}

HarmonicPolynomial make_harmonic(const Polynomial& p) {
    require(p.is_homogeneous(), "polynomial is not homogeneous");
    require(p.laplacian().is_zero(), "polynomial is not harmonic");
    return {p, std::max(0, p.degree())};
}

HarmonicPolynomial harmonic_project(const Polynomial& p) {
    require(p.is_homogeneous(), "harmonic_project: polynomial is not homogeneous");
    int k = std::max(0, p.degree());
    int d = p.dim;
    // f = sum_j c_j |x|^{2j} Laplacian^j p, c_{j+1} = -c_j / (2 (j+1) (d + 2k - 2j - 4))
    Polynomial f = p;
    Polynomial lap = p;
    Rational c(1);
    for (int j = 0; 2 * (j + 1) <= k; ++j) {
        lap = lap.laplacian();
        if (lap.is_zero()) break;
        long long den = 2LL * (j + 1) * (d + 2 * k - 2 * j - 4);
        require(den != 0, "harmonic_project: degenerate dimension");
        c = -c / Rational(den);
        Polynomial term = lap;
        for (int r = 0; r <= j; ++r) term = term.times_norm_sq();
        f = f + term.scaled(c);
    }
    return make_harmonic(f);
}

}  // namespace spinlab
