#include <cmath>
#include <complex>

#include "doctest.h"
#include "ng/dynamics.hpp"

using namespace ng;

namespace {

const double kR3 = std::sqrt(3.0);

Poly cubic_minus_one() { return Poly{{Cx{-1, 0}, Cx{0, 0}, Cx{0, 0}, Cx{1, 0}}}; }

Poly power_minus_one(int d) {
    std::vector<Cx> c(d + 1, Cx{0, 0});
    c[0] = Cx{-1, 0};
    c[d] = Cx{1, 0};
    return Poly{c};
}

bool close(Cx a, Cx b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("fixed point classification follows the multiplier ladder") {
    RationalMap f = newton_map(cubic_minus_one());
    auto fixed = classify_fixed_points(f);
    REQUIRE(fixed.size() == 4);
    // finite points sorted by (re, im), infinity last
    CHECK(close(fixed[0].location.z, Cx{-0.5, -kR3 / 2}, 1e-12));
    CHECK(close(fixed[1].location.z, Cx{-0.5, kR3 / 2}, 1e-12));
    CHECK(close(fixed[2].location.z, Cx{1, 0}, 1e-12));
    for (int i = 0; i < 3; ++i) {
        CHECK(fixed[i].kind == FixedKind::Superattracting);
        CHECK(fixed[i].m == 1);
        CHECK(std::abs(fixed[i].multiplier) < 1e-9);
    }
    CHECK(fixed[3].location.at_inf);
    CHECK(fixed[3].kind == FixedKind::Repelling);
    CHECK(close(fixed[3].multiplier, Cx{1.5, 0}, 1e-12));

    // (z-1)^2 (z+1): the double root keeps multiplier 1/2
    RootSpec spec;
    spec.roots = {{Cx{1, 0}, 2}, {Cx{-1, 0}, 1}};
    RationalMap g = newton_map(polynomial_from_roots(spec));
    auto gf = classify_fixed_points(g);
    REQUIRE(gf.size() == 3);
    CHECK(close(gf[0].location.z, Cx{-1, 0}, 1e-12));
    CHECK(gf[0].kind == FixedKind::Superattracting);
    CHECK(close(gf[1].location.z, Cx{1, 0}, 1e-12));
    CHECK(gf[1].m == 2);
    CHECK(gf[1].kind == FixedKind::Attracting);
    CHECK(close(gf[1].multiplier, Cx{0.5, 0}, 1e-9));
    CHECK(gf[2].location.at_inf);
    CHECK(close(gf[2].multiplier, Cx{1.5, 0}, 1e-12));

    // z^2 has a fixed point of multiplier 2, which no root multiplicity gives
    RationalMap sq{Poly{{Cx{0, 0}, Cx{0, 0}, Cx{1, 0}}}, Poly{{Cx{1, 0}}}};
    CHECK_THROWS_AS(classify_fixed_points(sq), not_newton_error);
}

TEST_CASE("newton map recognition") {
    CHECK(is_newton_map(newton_map(cubic_minus_one())).ok);
    CHECK(is_newton_map(newton_map(power_minus_one(5))).ok);

    RationalMap sq{Poly{{Cx{0, 0}, Cx{0, 0}, Cx{1, 0}}}, Poly{{Cx{1, 0}}}};
    auto v = is_newton_map(sq);
    CHECK_FALSE(v.ok);
    CHECK(v.reason == "degree below 3");

    RationalMap cube{Poly{{Cx{0, 0}, Cx{0, 0}, Cx{0, 0}, Cx{1, 0}}}, Poly{{Cx{1, 0}}}};
    auto vc = is_newton_map(cube);
    CHECK_FALSE(vc.ok);  // infinity superattracting, not repelling
    CHECK(vc.reason == "infinity is not repelling");
}

TEST_CASE("critical census of the power maps") {
    for (int d : {3, 4, 5}) {
        RationalMap f = newton_map(power_minus_one(d));
        auto crit = critical_points(f);
        int total = 0;
        bool saw_origin = false;
        for (const auto& c : crit) {
            REQUIRE_FALSE(c.location.at_inf);
            total += c.local_degree - 1;
            if (std::abs(c.location.z) < 1e-7) {
                saw_origin = true;
                // z^{d-2} factor of the derivative numerator
                CHECK(c.local_degree == d - 1);
                // the origin is the pole of maximal order, one step from infinity
                REQUIRE(c.fate.resolved);
                CHECK(c.fate.steps == 1);
                CHECK(c.fate.fixed_index == d);  // infinity sits after the d roots
            } else {
                CHECK(c.local_degree == 2);
                CHECK(std::abs(std::abs(c.location.z) - 1.0) < 1e-9);  // a root of unity
                REQUIRE(c.fate.resolved);
                CHECK(c.fate.steps == 0);
            }
        }
        CHECK(total == 2 * d - 2);
        CHECK((saw_origin || d == 2));
    }
}

TEST_CASE("critical point at infinity is recovered by count") {
    // z^3 fixes infinity with local degree 3; the finite cluster only has z=0
    RationalMap cube{Poly{{Cx{0, 0}, Cx{0, 0}, Cx{0, 0}, Cx{1, 0}}}, Poly{{Cx{1, 0}}}};
    auto crit = critical_points(cube);
    REQUIRE(crit.size() == 2);
    CHECK(close(crit[0].location.z, Cx{0, 0}, 1e-9));
    CHECK(crit[0].local_degree == 3);
    REQUIRE(crit[1].location.at_inf);
    CHECK(crit[1].local_degree == 3);
    CHECK(crit[1].fate.resolved);
    CHECK(crit[1].fate.steps == 0);
}

TEST_CASE("postcritically fixed detection") {
    CHECK(is_postcritically_fixed(newton_map(cubic_minus_one())).postcritically_fixed);

    // z^4 + z: every critical point is itself a root
    Poly p{{Cx{0, 0}, Cx{1, 0}, Cx{0, 0}, Cx{0, 0}, Cx{1, 0}}};
    auto rep = is_postcritically_fixed(newton_map(p));
    CHECK(rep.postcritically_fixed);
    for (const auto& c : rep.critical) CHECK(c.fate.steps == 0);

    // z^3 - 2z + 2: the free critical orbit is the 2-cycle 0 -> 1 -> 0
    Poly q{{Cx{2, 0}, Cx{-2, 0}, Cx{0, 0}, Cx{1, 0}}};
    auto bad = is_postcritically_fixed(newton_map(q));
    CHECK_FALSE(bad.postcritically_fixed);
    bool saw_cycle = false;
    for (const auto& c : bad.critical) {
        if (c.fate.resolved) continue;
        REQUIRE(c.orbit.size() >= 3);
        CHECK(close(c.orbit[0].z, Cx{0, 0}, 1e-9));
        CHECK(close(c.orbit[1].z, Cx{1, 0}, 1e-9));
        CHECK(close(c.orbit[2].z, Cx{0, 0}, 1e-9));
        saw_cycle = true;
    }
    CHECK(saw_cycle);
}

TEST_CASE("basin membership") {
    RationalMap f = newton_map(cubic_minus_one());
    std::vector<Cx> roots = {Cx{1, 0}, Cx{-0.5, kR3 / 2}, Cx{-0.5, -kR3 / 2}};

    auto a = basin_index(f, roots, Cx{2, 0}, 200);
    CHECK(a.outcome == BasinVerdict::Outcome::Converges);
    CHECK(a.root_index == 0);

    auto b = basin_index(f, roots, Cx{-1, 1}, 200);
    CHECK(b.outcome == BasinVerdict::Outcome::Converges);
    CHECK(b.root_index == 1);

    // the origin is the pole: one application lands at infinity
    auto c = basin_index(f, roots, Cx{0, 0}, 200);
    CHECK(c.outcome == BasinVerdict::Outcome::EscapesToInfinity);
    CHECK(c.iterations == 1);

    // far out the map contracts toward the plane, so large starts still converge
    auto d = basin_index(f, roots, Cx{1e7, 0}, 2000);
    CHECK(d.outcome == BasinVerdict::Outcome::Converges);
    CHECK(d.root_index == 0);

    auto e = basin_index(f, roots, Cx{2, 0}, 1);
    CHECK(e.outcome == BasinVerdict::Outcome::Undecided);
}

TEST_CASE("local series matches the hand expansion") {
    // N(1+u) = 1 + u^2 - (4/3) u^3 + ... for z^3 - 1
    RationalMap f = newton_map(cubic_minus_one());
    auto q = local_series(f, Cx{1, 0}, 3);
    REQUIRE(q.size() == 4);
    CHECK(close(q[0], Cx{1, 0}, 1e-12));
    CHECK(close(q[1], Cx{0, 0}, 1e-12));
    CHECK(close(q[2], Cx{1, 0}, 1e-12));
    CHECK(close(q[3], Cx{-4.0 / 3.0, 0}, 1e-12));

    CHECK_THROWS_AS(local_series(f, Cx{0, 0}, 3), numerical_error);
}

TEST_CASE("preimage sets carry local degrees") {
    RationalMap f = newton_map(cubic_minus_one());

    // N^{-1}(1): 2w^3 - 3w^2 + 1 = (w-1)^2 (2w+1)
    auto pre = preimages(f, SpherePoint::finite(Cx{1, 0}));
    REQUIRE(pre.finite.size() == 2);
    CHECK(pre.infinity_degree == 0);
    CHECK(close(pre.finite[0].center, Cx{-0.5, 0}, 1e-9));
    CHECK(pre.finite[0].multiplicity == 1);
    CHECK(close(pre.finite[1].center, Cx{1, 0}, 1e-9));
    CHECK(pre.finite[1].multiplicity == 2);

    // N^{-1}(inf): the pole 0 with multiplicity 2, plus infinity itself
    auto pinf = preimages(f, SpherePoint::infinity());
    REQUIRE(pinf.finite.size() == 1);
    CHECK(close(pinf.finite[0].center, Cx{0, 0}, 1e-9));
    CHECK(pinf.finite[0].multiplicity == 2);
    CHECK(pinf.infinity_degree == 1);

    // generic values have three simple preimages
    auto gen = preimages(f, SpherePoint::finite(Cx{0.3, 0.4}));
    int total = gen.infinity_degree;
    for (const auto& r : gen.finite) total += r.multiplicity;
    CHECK(total == 3);
    for (const auto& r : gen.finite) CHECK(r.multiplicity == 1);
}

TEST_CASE("curve lifting keeps the branch") {
    RationalMap sq{Poly{{Cx{0, 0}, Cx{0, 0}, Cx{1, 0}}}, Poly{{Cx{1, 0}}}};

    std::vector<Cx> seg;
    for (int i = 0; i <= 16; ++i) seg.push_back(Cx{1.0 + 3.0 * i / 16.0, 0});
    auto up = lift_curve(sq, seg, Cx{1, 0});
    CHECK(close(up.back(), Cx{2, 0}, 1e-10));
    auto dn = lift_curve(sq, seg, Cx{-1, 0});
    CHECK(close(dn.back(), Cx{-2, 0}, 1e-10));

    // lift of the upper unit half-circle from 1 ends at i, even when the
    // sampling is sparse enough to need bisection
    std::vector<Cx> arc;
    for (int i = 0; i <= 4; ++i) arc.push_back(std::polar(1.0, M_PI * i / 4.0));
    auto lift = lift_curve(sq, arc, Cx{1, 0});
    CHECK(close(lift.back(), Cx{0, 1}, 1e-10));

    CHECK_THROWS_AS(lift_curve(sq, seg, Cx{3, 0}), lift_error);
}
