#pragma once

#include <boost/rational.hpp>
#include <map>

#include "spinlab/common.hpp"

namespace spinlab {

using Rational = boost::rational<long long>;

struct Polynomial {
    int dim = 0;
    std::map<IntVec, Rational> terms;  // exponent multi-index -> coefficient, zero terms removed

    bool is_zero() const { return terms.empty(); }
    int degree() const;
    bool is_homogeneous() const;

    Polynomial laplacian() const;
    Polynomial times_norm_sq() const;  // |x|^2 * p
    Polynomial scaled(const Rational& c) const;
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;

    double eval(const RVec& x) const;
    RVec gradient(const RVec& x) const;
    RMat hessian(const RVec& x) const;

    std::string to_string() const;
};

Polynomial make_polynomial(int dim);

// Grammar: sum of monomials "c*x1^a*x2^b"; c integer, decimal or p/q; '+'/'-' separated.
// dim <= 0 infers the dimension from the largest variable index.
Polynomial parse_polynomial(const std::string& text, int dim = 0);

// Re((x1 + i x2)^p) in dim variables.
Polynomial real_power_x1_ix2(int dim, int p);

// Homogeneous harmonic polynomial (exact invariants).
struct HarmonicPolynomial {
    Polynomial p;
    int degree = 0;
    int ambient_dim() const { return p.dim; }
};

// Validates homogeneity and harmonicity exactly.
HarmonicPolynomial make_harmonic(const Polynomial& p);

HarmonicPolynomial harmonic_project(const Polynomial& p);

}  // namespace spinlab
