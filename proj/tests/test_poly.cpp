#include "doctest.h"
#include "ng/poly.hpp"

#include <cmath>
#include <random>

using namespace ng;

namespace {
bool cxnear(Cx a, Cx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }
const Cx w3 = std::polar(1.0, 2.0 * M_PI / 3.0);  // primitive cube root of unity
}  // namespace

TEST_CASE("polynomial_from_roots expands correctly") {
    // {1, w, w^2} -> z^3 - 1
    Poly p = polynomial_from_roots({{{Cx(1, 0), 1}, {w3, 1}, {w3 * w3, 1}}});
    REQUIRE(p.deg() == 3);
    CHECK(cxnear(p.c[0], Cx(-1, 0)));
    CHECK(cxnear(p.c[1], Cx(0, 0)));
    CHECK(cxnear(p.c[2], Cx(0, 0)));
    CHECK(cxnear(p.c[3], Cx(1, 0)));

    // {(1, mult 2), (-1, mult 1)} -> z^3 - z^2 - z + 1
    Poly q = polynomial_from_roots({{{Cx(1, 0), 2}, {Cx(-1, 0), 1}}});
    REQUIRE(q.deg() == 3);
    CHECK(cxnear(q.c[0], Cx(1, 0)));
    CHECK(cxnear(q.c[1], Cx(-1, 0)));
    CHECK(cxnear(q.c[2], Cx(-1, 0)));
    CHECK(cxnear(q.c[3], Cx(1, 0)));

    // {0, i, -i} -> z^3 + z
    Poly r = polynomial_from_roots({{{Cx(0, 0), 1}, {Cx(0, 1), 1}, {Cx(0, -1), 1}}});
    CHECK(cxnear(r.c[0], Cx(0, 0)));
    CHECK(cxnear(r.c[1], Cx(1, 0)));
    CHECK(cxnear(r.c[2], Cx(0, 0)));
    CHECK(cxnear(r.c[3], Cx(1, 0)));

    CHECK_THROWS_AS(polynomial_from_roots({{{Cx(1, 0), 1}, {Cx(1, 0), 1}}}), invalid_spec_error);
    CHECK_THROWS_AS(polynomial_from_roots({{{Cx(1, 0), 0}}}), invalid_spec_error);
}

TEST_CASE("taylor_shift and eval_dual") {
    Poly p{std::vector<Cx>{Cx(-1, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0)}};  // z^3 - 1
    Poly s = taylor_shift(p, Cx(1, 0));                                // (1+u)^3 - 1
    CHECK(cxnear(s.c[0], Cx(0, 0)));
    CHECK(cxnear(s.c[1], Cx(3, 0)));
    CHECK(cxnear(s.c[2], Cx(3, 0)));
    CHECK(cxnear(s.c[3], Cx(1, 0)));

    Cx d;
    Cx v = p.eval_dual(Cx(2, 1), &d);
    CHECK(cxnear(v, p.eval(Cx(2, 1))));
    CHECK(cxnear(d, derivative(p).eval(Cx(2, 1))));
}

TEST_CASE("poly_roots on simple and multiple roots") {
    Poly p = polynomial_from_roots({{{Cx(1, 0), 1}, {w3, 1}, {w3 * w3, 1}}});
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 3);
    for (const auto& r : roots) {
        CHECK(r.multiplicity == 1);
        CHECK(std::abs(p.eval(r.center)) < 1e-12);
    }

    // monomial: deep convergence to the origin
    auto mono = poly_roots(Poly{std::vector<Cx>{Cx(0, 0), Cx(0, 0), Cx(0, 0), Cx(4, 0)}});
    REQUIRE(mono.size() == 1);
    CHECK(mono[0].multiplicity == 3);
    CHECK(std::abs(mono[0].center) < 1e-10);

    // (z-1)^3 (z+1): the triple root scatters to radius ~eps^(1/3), the
    // escalation stage has to pull it back together
    Poly t = polynomial_from_roots({{{Cx(1, 0), 3}, {Cx(-1, 0), 1}}});
    auto tc = poly_roots(t);
    REQUIRE(tc.size() == 2);
    CHECK(tc[0].multiplicity == 1);
    CHECK(cxnear(tc[0].center, Cx(-1, 0), 1e-10));
    CHECK(tc[1].multiplicity == 3);
    CHECK(cxnear(tc[1].center, Cx(1, 0), 1e-9));

    // nearby but distinct roots must not be merged
    Poly n = polynomial_from_roots({{{Cx(0.5, 0), 1}, {Cx(0.5 + 1e-5, 0), 1}, {Cx(-1, 0), 1}}});
    auto nc = poly_roots(n);
    CHECK(nc.size() == 3);
}

TEST_CASE("poly_roots random residual property") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        int d = 3 + int(rng() % 5);
        std::vector<Cx> c(d + 1);
        for (Cx& a : c) a = Cx(u(rng), u(rng));
        c[d] += Cx(3, 0);  // keep leading coefficient well away from zero
        Poly p{c};
        auto roots = poly_roots(p);
        int total = 0;
        for (const auto& r : roots) {
            total += r.multiplicity;
            CHECK(std::abs(p.eval(r.center)) < 1e-8);
        }
        CHECK(total == d);
    }
}

TEST_CASE("newton_map construction and reduction") {
    Poly p = polynomial_from_roots({{{Cx(1, 0), 1}, {w3, 1}, {w3 * w3, 1}}});
    RationalMap f = newton_map(p);
    // (2z^3+1)/(3z^2)
    REQUIRE(f.num.deg() == 3);
    REQUIRE(f.den.deg() == 2);
    CHECK(cxnear(f.num.c[0], Cx(1, 0)));
    CHECK(cxnear(f.num.c[3], Cx(2, 0)));
    CHECK(cxnear(f.den.c[2], Cx(3, 0)));
    CHECK(f.degree() == 3);

    // multiple root: (z-1)^2 (z+1) reduces to degree 2
    Poly q = polynomial_from_roots({{{Cx(1, 0), 2}, {Cx(-1, 0), 1}}});
    RationalMap g = newton_map(q);
    CHECK(g.degree() == 2);
    // num = 2z^2 + z + 1, den = 3z + 1 after cancelling (z-1)
    REQUIRE(g.num.deg() == 2);
    REQUIRE(g.den.deg() == 1);
    CHECK(cxnear(g.num.c[2], Cx(2, 0), 1e-9));
    CHECK(cxnear(g.num.c[1], Cx(1, 0), 1e-9));
    CHECK(cxnear(g.num.c[0], Cx(1, 0), 1e-9));
    CHECK(cxnear(g.den.c[1], Cx(3, 0), 1e-9));
    CHECK(cxnear(g.den.c[0], Cx(1, 0), 1e-9));

    // z^2 gives the degree-1 map z/2; construction succeeds, later stages flag it
    RationalMap h = newton_map(Poly{std::vector<Cx>{Cx(0, 0), Cx(0, 0), Cx(1, 0)}});
    CHECK(h.degree() == 1);
    SpherePoint hv = h.eval(SpherePoint::finite(Cx(1, 0)));
    CHECK(cxnear(hv.z, Cx(0.5, 0)));

    CHECK_THROWS_AS(newton_map(Poly{std::vector<Cx>{Cx(1, 0), Cx(1, 0)}}), degenerate_map_error);
}

TEST_CASE("sphere evaluation, poles, infinity multiplier") {
    Poly p = polynomial_from_roots({{{Cx(1, 0), 1}, {w3, 1}, {w3 * w3, 1}}});
    RationalMap f = newton_map(p);

    CHECK(f.eval(SpherePoint::finite(Cx(0, 0))).at_inf);        // double pole at 0
    SpherePoint fx = f.eval(SpherePoint::finite(Cx(1, 0)));
    CHECK(!fx.at_inf);
    CHECK(cxnear(fx.z, Cx(1, 0)));
    CHECK(f.eval(SpherePoint::infinity()).at_inf);

    auto poles = poles_of(f);
    REQUIRE(poles.size() == 1);
    CHECK(poles[0].multiplicity == 2);
    CHECK(std::abs(poles[0].center) < 1e-9);

    auto mi = multiplier_at_infinity(f);
    REQUIRE(mi.has_value());
    CHECK(cxnear(*mi, Cx(1.5, 0)));

    // z^4 - 1: triple pole at the origin, multiplier 4/3 at infinity
    Poly q{std::vector<Cx>{Cx(-1, 0), Cx(0, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0)}};
    RationalMap g = newton_map(q);
    auto qp = poles_of(g);
    REQUIRE(qp.size() == 1);
    CHECK(qp[0].multiplicity == 3);
    auto gm = multiplier_at_infinity(g);
    REQUIRE(gm.has_value());
    CHECK(cxnear(*gm, Cx(4.0 / 3.0, 0)));
}

TEST_CASE("chart swap agreement beyond the escape radius") {
    Poly p = polynomial_from_roots({{{Cx(1, 0), 1}, {w3, 1}, {w3 * w3, 1}}});
    RationalMap f = newton_map(p);
    Tolerances tol;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    for (int i = 0; i < 20; ++i) {
        double rad = tol.escape_radius * (1.5 + i);
        Cx z = std::polar(rad, u(rng));
        SpherePoint a = f.eval(SpherePoint::finite(z));
        SpherePoint b = eval_via_inverted_chart(f, SpherePoint::finite(z));
        REQUIRE(!a.at_inf);
        REQUIRE(!b.at_inf);
        CHECK(std::abs(a.z - b.z) <= 1e-9 * std::abs(a.z));
    }
}

TEST_CASE("wronskian lists critical points with pole contribution") {
    Poly p = polynomial_from_roots({{{Cx(1, 0), 1}, {w3, 1}, {w3 * w3, 1}}});
    RationalMap f = newton_map(p);
    Poly w = f.wronskian();  // 6 z^4 - 6 z
    REQUIRE(w.deg() == 4);
    CHECK(cxnear(w.c[4], Cx(6, 0)));
    CHECK(cxnear(w.c[1], Cx(-6, 0)));
    auto cr = poly_roots(w);
    REQUIRE(cr.size() == 4);  // three roots of unity plus the double pole at 0
}
