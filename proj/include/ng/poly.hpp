#pragma once
#include <optional>
#include <utility>
#include <vector>

#include "ng/base.hpp"

namespace ng {

// Dense univariate polynomial, coefficients in ascending degree order.
// c is never empty; the zero polynomial is {0}.
struct Poly {
    std::vector<Cx> c{Cx{0.0, 0.0}};

    Poly() = default;
    explicit Poly(std::vector<Cx> coeffs);

    int deg() const { return static_cast<int>(c.size()) - 1; }
    Cx lead() const { return c.back(); }
    bool is_zero() const;

    Cx eval(Cx z) const;               // Horner
    Cx eval_dual(Cx z, Cx* dp) const;  // value, derivative in one pass
};

Poly derivative(const Poly& p);
Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
Poly scale(const Poly& p, Cx s);
Poly mul_by_z(const Poly& p);
// Coefficients of p(z0 + u) in powers of u.
Poly taylor_shift(const Poly& p, Cx z0);
// Drop leading coefficients that are negligible against the largest one.
Poly strip_leading(const Poly& p, double rel_eps = 1e-12);
// Running error bound for Horner evaluation at z (absolute).
double eval_noise_bound(const Poly& p, Cx z);

// Roots listed with multiplicity, found by simultaneous (Aberth) iteration
// followed by Newton polishing.  Deterministic for fixed input.
std::vector<Cx> poly_roots_raw(const Poly& p, double tol = 1e-13, int max_sweeps = 200);

struct RootCluster {
    Cx center;
    int multiplicity = 1;
};

// Merge numerically coincident roots.  Pairs inside merge_tol always merge;
// wider clusters merge only when the cluster center verifies as a genuine
// multiple root of p (residuals of p, p', ... at the polished center are at
// noise level).  That second stage is what recovers exact triple and higher
// roots, which double precision spreads over a radius of roughly eps^(1/m).
std::vector<RootCluster> cluster_roots(const Poly& p, const std::vector<Cx>& raw,
                                       double merge_tol = 1e-7);

std::vector<RootCluster> poly_roots(const Poly& p, double merge_tol = 1e-7);

// Root specification for building a polynomial: (location, multiplicity).
struct RootSpec {
    std::vector<std::pair<Cx, int>> roots;
    int total_degree() const;
};

// Monic polynomial with exactly the prescribed roots.
// Throws invalid_spec_error on duplicate locations or multiplicity < 1.
Poly polynomial_from_roots(const RootSpec& spec);

// Rational self-map of the sphere, num/den with common factors removed.
struct RationalMap {
    Poly num, den;

    int degree() const { return std::max(num.deg(), den.deg()); }

    // Evaluation in the finite chart; den(z) ~ 0 maps to infinity.
    SpherePoint eval(SpherePoint p) const;
    Cx deriv_at(Cx z) const;  // derivative of num/den at a finite point

    // Numerator of the derivative: num' den - num den'.  Its roots are the
    // finite critical points, a pole of order k showing up with multiplicity k-1.
    Poly wronskian() const;
};

// Newton map z - p/p' of a polynomial, with shared factors of numerator and
// denominator cancelled by root matching (multiple roots of p cause them).
// Throws degenerate_map_error when deg p <= 1.
RationalMap newton_map(const Poly& p, const Tolerances& tol = {});

// Finite poles with multiplicity.
std::vector<RootCluster> poles_of(const RationalMap& f, double merge_tol = 1e-7);

// Multiplier of the fixed point at infinity in the 1/z chart,
// or nullopt when infinity is not fixed.
std::optional<Cx> multiplier_at_infinity(const RationalMap& f);

// Evaluate through the 1/z chart: 1 / f(1/w) at w = 1/z.  Used to cross-check
// eval near infinity.
SpherePoint eval_via_inverted_chart(const RationalMap& f, SpherePoint p);

}  // namespace ng
