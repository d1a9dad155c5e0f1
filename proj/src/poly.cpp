#include "ng/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ng {

namespace {
constexpr double kEps = 2.220446049250313e-16;
}

Poly::Poly(std::vector<Cx> coeffs) : c(std::move(coeffs)) {
    if (c.empty()) c.push_back(Cx{0.0, 0.0});
}

bool Poly::is_zero() const {
    for (const Cx& a : c)
        if (a != Cx{0.0, 0.0}) return false;
    return true;
}

Cx Poly::eval(Cx z) const {
    Cx v{0.0, 0.0};
    for (int i = deg(); i >= 0; --i) v = v * z + c[i];
    return v;
}

Cx Poly::eval_dual(Cx z, Cx* dp) const {
    Cx v{0.0, 0.0}, d{0.0, 0.0};
    for (int i = deg(); i >= 0; --i) {
        d = d * z + v;
        v = v * z + c[i];
    }
    if (dp) *dp = d;
    return v;
}

Poly derivative(const Poly& p) {
    if (p.deg() == 0) return Poly{};
    std::vector<Cx> d(p.deg());
    for (int i = 1; i <= p.deg(); ++i) d[i - 1] = p.c[i] * Cx(double(i), 0.0);
    return Poly{std::move(d)};
}

Poly add(const Poly& a, const Poly& b) {
    std::vector<Cx> r(std::max(a.c.size(), b.c.size()), Cx{0.0, 0.0});
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return Poly{std::move(r)};
}

Poly sub(const Poly& a, const Poly& b) {
    std::vector<Cx> r(std::max(a.c.size(), b.c.size()), Cx{0.0, 0.0});
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return Poly{std::move(r)};
}

Poly mul(const Poly& a, const Poly& b) {
    std::vector<Cx> r(a.c.size() + b.c.size() - 1, Cx{0.0, 0.0});
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Poly{std::move(r)};
}

Poly scale(const Poly& p, Cx s) {
    std::vector<Cx> r = p.c;
    for (Cx& a : r) a *= s;
    return Poly{std::move(r)};
}

Poly mul_by_z(const Poly& p) {
    std::vector<Cx> r(p.c.size() + 1, Cx{0.0, 0.0});
    for (size_t i = 0; i < p.c.size(); ++i) r[i + 1] = p.c[i];
    return Poly{std::move(r)};
}

Poly taylor_shift(const Poly& p, Cx z0) {
    // Synthetic division applied repeatedly, in place.
    std::vector<Cx> a = p.c;
    int n = static_cast<int>(a.size()) - 1;
    for (int j = 0; j < n; ++j)
        for (int i = n - 1; i >= j; --i) a[i] += z0 * a[i + 1];
    return Poly{std::move(a)};
}

Poly strip_leading(const Poly& p, double rel_eps) {
    double amax = 0.0;
    for (const Cx& a : p.c) amax = std::max(amax, std::abs(a));
    std::vector<Cx> r = p.c;
    while (r.size() > 1 && std::abs(r.back()) <= rel_eps * amax) r.pop_back();
    return Poly{std::move(r)};
}

double eval_noise_bound(const Poly& p, Cx z) {
    double az = std::abs(z), pw = 1.0, s = 0.0, amax = 0.0;
    for (const Cx& a : p.c) {
        s += std::abs(a) * pw;
        pw *= az;
        amax = std::max(amax, std::abs(a));
    }
    // Coefficients themselves usually carry relative-eps noise from whatever
    // expansion produced them, so include a floor at the coefficient scale.
    double floor = amax * std::pow(std::max(1.0, az), double(p.deg()));
    return kEps * std::max(s, floor) * (2.0 * p.c.size() + 2.0);
}

std::vector<Cx> poly_roots_raw(const Poly& p0, double tol, int max_sweeps) {
    Poly p = strip_leading(p0);
    int n = p.deg();
    if (n <= 0) return {};
    if (n == 1) return {-p.c[0] / p.c[1]};

    // Initial guesses on a circle inside the Cauchy bound, angles offset so
    // no guess starts on a symmetry axis of the typical test polynomials.
    double r = 0.0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::abs(p.c[i] / p.c[n]));
    r = 0.5 + 0.5 * (1.0 + r);
    std::vector<Cx> z(n);
    for (int i = 0; i < n; ++i) {
        double th = 2.0 * M_PI * (i + 0.25) / n + 0.42;
        z[i] = r * Cx(std::cos(th), std::sin(th));
    }

    Poly dp = derivative(p);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            Cx dv;
            Cx pv = p.eval_dual(z[i], &dv);
            if (pv == Cx{0.0, 0.0}) continue;
            if (std::abs(dv) < 1e-300) {
                z[i] += Cx(1e-8 * (1.0 + std::abs(z[i])), 1e-8);
                worst = 1.0;
                continue;
            }
            Cx N = pv / dv;
            Cx S{0.0, 0.0};
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                Cx d = z[i] - z[j];
                if (std::abs(d) < 1e-300) d = Cx(1e-12, 1e-12);
                S += Cx(1.0, 0.0) / d;
            }
            Cx denom = Cx(1.0, 0.0) - N * S;
            Cx corr = std::abs(denom) < 1e-300 ? N : N / denom;
            z[i] -= corr;
            worst = std::max(worst, std::abs(corr) / (1.0 + std::abs(z[i])));
        }
        if (worst < tol) break;
    }

    // Newton polish; multiple roots stall here, the clustering stage deals with them.
    for (int i = 0; i < n; ++i) {
        for (int it = 0; it < 4; ++it) {
            Cx dv;
            Cx pv = p.eval_dual(z[i], &dv);
            if (std::abs(dv) < 1e-300) break;
            Cx step = pv / dv;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            z[i] -= step;
        }
    }

    for (int i = 0; i < n; ++i) {
        double resid = std::abs(p.eval(z[i]));
        // Residual noise floor grows near a stalled multiple-root cluster; the
        // backward-error bound below accepts those while rejecting true failures.
        double bound = eval_noise_bound(p, z[i]);
        double cluster = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) cluster = std::min(cluster, std::abs(z[i] - z[j]) / (1.0 + std::abs(z[i])));
        double slack = std::max(1e4 * bound, std::pow(std::max(cluster, 1e-16), double(n)) * 10.0);
        if (!(resid <= slack || resid <= 1e4 * bound))
            throw numerical_error("root finder failed to converge, residual " + std::to_string(resid));
    }

    std::sort(z.begin(), z.end(), [](Cx a, Cx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

namespace {

// Newton refinement of an m-fold root candidate through the (m-1)-th derivative,
// where the root is simple.
Cx polish_multiple(const Poly& p, Cx c, int m) {
    Poly q = p;
    for (int j = 1; j < m; ++j) q = derivative(q);
    Cx z = c;
    for (int it = 0; it < 8; ++it) {
        Cx dv;
        Cx v = q.eval_dual(z, &dv);
        if (std::abs(dv) < 1e-300) break;
        Cx step = v / dv;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        z -= step;
    }
    return z;
}

bool verify_multiplicity(const Poly& p, Cx c, int m) {
    Poly q = p;
    for (int j = 0; j < m; ++j) {
        if (std::abs(q.eval(c)) > 256.0 * eval_noise_bound(q, c)) return false;
        q = derivative(q);
    }
    return true;
}

struct DSU {
    std::vector<int> par;
    explicit DSU(int n) : par(n) { std::iota(par.begin(), par.end(), 0); }
    int find(int x) { return par[x] == x ? x : par[x] = find(par[x]); }
    void unite(int a, int b) { par[find(a)] = find(b); }
};

}  // namespace

std::vector<RootCluster> cluster_roots(const Poly& p, const std::vector<Cx>& raw,
                                       double merge_tol) {
    int n = static_cast<int>(raw.size());
    if (n == 0) return {};

    // Stage 1: unconditional merge of roots within merge_tol of each other.
    DSU dsu(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(raw[i] - raw[j]) <= merge_tol * (1.0 + std::abs(raw[i]))) dsu.unite(i, j);

    std::vector<RootCluster> cl;
    std::vector<int> seen(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = dsu.find(i);
        if (seen[r] < 0) {
            seen[r] = static_cast<int>(cl.size());
            cl.push_back({Cx{0.0, 0.0}, 0});
        }
        RootCluster& k = cl[seen[r]];
        k.center += raw[i];
        k.multiplicity += 1;
    }
    for (RootCluster& k : cl) {
        k.center /= double(k.multiplicity);
        if (k.multiplicity > 1) {
            Cx z = polish_multiple(p, k.center, k.multiplicity);
            if (std::abs(z - k.center) < 10.0 * merge_tol * (1.0 + std::abs(k.center)) + 1e-6)
                k.center = z;
        }
    }

    // Stage 2: escalation for exact multiple roots that double precision
    // scatters wider than merge_tol (radius ~ eps^(1/m)).  Merge only when the
    // polished center verifies as a true m-fold root at noise level.
    for (int round = 0; round < 2 * n; ++round) {
        if (cl.size() < 2) break;
        int bi = -1, bj = -1;
        double bd = 1e300;
        for (size_t i = 0; i < cl.size(); ++i)
            for (size_t j = i + 1; j < cl.size(); ++j) {
                double d = std::abs(cl[i].center - cl[j].center);
                if (d < bd) {
                    bd = d;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        double sc = 1.0 + std::abs(cl[bi].center);
        if (bd > 1e-4 * sc) break;

        Cx mid = 0.5 * (cl[bi].center + cl[bj].center);
        std::vector<int> group;
        for (size_t k = 0; k < cl.size(); ++k)
            if (std::abs(cl[k].center - mid) <= 2.5 * bd + merge_tol * sc)
                group.push_back(static_cast<int>(k));
        int m = 0;
        Cx centroid{0.0, 0.0};
        for (int k : group) {
            m += cl[k].multiplicity;
            centroid += cl[k].center * double(cl[k].multiplicity);
        }
        centroid /= double(m);
        Cx z = polish_multiple(p, centroid, m);
        bool ok = std::abs(z - centroid) <= 8.0 * bd + merge_tol * sc && verify_multiplicity(p, z, m);
        if (!ok) break;

        std::vector<RootCluster> next;
        for (size_t k = 0; k < cl.size(); ++k)
            if (std::find(group.begin(), group.end(), static_cast<int>(k)) == group.end())
                next.push_back(cl[k]);
        next.push_back({z, m});
        cl = std::move(next);
    }

    std::sort(cl.begin(), cl.end(), [](const RootCluster& a, const RootCluster& b) {
        if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
        return a.center.imag() < b.center.imag();
    });
    return cl;
}

std::vector<RootCluster> poly_roots(const Poly& p, double merge_tol) {
    return cluster_roots(p, poly_roots_raw(p), merge_tol);
}

int RootSpec::total_degree() const {
    int d = 0;
    for (const auto& [z, m] : roots) d += m;
    return d;
}

Poly polynomial_from_roots(const RootSpec& spec) {
    if (spec.roots.empty()) throw invalid_spec_error("empty root spec");
    double sc = 1.0;
    for (const auto& [z, m] : spec.roots) {
        if (m < 1) throw invalid_spec_error("root multiplicity must be >= 1");
        sc = std::max(sc, std::abs(z));
    }
    for (size_t i = 0; i < spec.roots.size(); ++i)
        for (size_t j = i + 1; j < spec.roots.size(); ++j)
            if (std::abs(spec.roots[i].first - spec.roots[j].first) <= 1e-12 * sc)
                throw invalid_spec_error("duplicate root location in spec");

    Poly p{std::vector<Cx>{Cx(1.0, 0.0)}};
    for (const auto& [z, m] : spec.roots) {
        Poly lin{std::vector<Cx>{-z, Cx(1.0, 0.0)}};
        for (int k = 0; k < m; ++k) p = mul(p, lin);
    }
    return p;
}

SpherePoint RationalMap::eval(SpherePoint p) const {
    if (p.at_inf) {
        int dn = num.deg(), dd = den.deg();
        if (dn > dd) return SpherePoint::infinity();
        if (dn == dd) return SpherePoint::finite(num.lead() / den.lead());
        return SpherePoint::finite(Cx{0.0, 0.0});
    }
    Cx nv = num.eval(p.z), dv = den.eval(p.z);
    if (std::abs(dv) <= 64.0 * eval_noise_bound(den, p.z)) {
        if (std::abs(nv) <= 64.0 * eval_noise_bound(num, p.z))
            throw numerical_error("indeterminate value num/den ~ 0/0; map not reduced?");
        return SpherePoint::infinity();
    }
    return SpherePoint::finite(nv / dv);
}

Cx RationalMap::deriv_at(Cx z) const {
    Cx ndv, ddv;
    Cx nv = num.eval_dual(z, &ndv);
    Cx dv = den.eval_dual(z, &ddv);
    return (ndv * dv - nv * ddv) / (dv * dv);
}

Poly RationalMap::wronskian() const {
    return strip_leading(sub(mul(derivative(num), den), mul(num, derivative(den))));
}

RationalMap newton_map(const Poly& p0, const Tolerances& tol) {
    Poly p = strip_leading(p0);
    if (p.deg() <= 1) throw degenerate_map_error("Newton map needs deg p >= 2");
    Poly dp = derivative(p);
    Poly num0 = sub(mul_by_z(dp), p);  // z p' - p
    Poly den0 = dp;

    // p with an m-fold root leaves an (m-1)-fold common factor; find it by
    // matching roots of numerator and denominator.
    std::vector<RootCluster> rn = poly_roots(num0, tol.merge_tol);
    std::vector<RootCluster> rd = poly_roots(den0, tol.merge_tol);
    bool cancelled = false;
    for (RootCluster& d : rd) {
        for (RootCluster& n : rn) {
            if (n.multiplicity == 0 || d.multiplicity == 0) continue;
            if (std::abs(n.center - d.center) <= tol.match_tol * (1.0 + std::abs(d.center))) {
                int k = std::min(n.multiplicity, d.multiplicity);
                n.multiplicity -= k;
                d.multiplicity -= k;
                cancelled = true;
            }
        }
    }
    if (!cancelled) return {num0, den0};

    Poly num{std::vector<Cx>{num0.lead()}};
    for (const RootCluster& n : rn) {
        Poly lin{std::vector<Cx>{-n.center, Cx(1.0, 0.0)}};
        for (int k = 0; k < n.multiplicity; ++k) num = mul(num, lin);
    }
    Poly den{std::vector<Cx>{den0.lead()}};
    for (const RootCluster& d : rd) {
        Poly lin{std::vector<Cx>{-d.center, Cx(1.0, 0.0)}};
        for (int k = 0; k < d.multiplicity; ++k) den = mul(den, lin);
    }
    return {num, den};
}

std::vector<RootCluster> poles_of(const RationalMap& f, double merge_tol) {
    if (f.den.deg() == 0) return {};
    return poly_roots(f.den, merge_tol);
}

std::optional<Cx> multiplier_at_infinity(const RationalMap& f) {
    int dn = f.num.deg(), dd = f.den.deg();
    if (dn == dd + 1) return f.den.lead() / f.num.lead();
    if (dn > dd + 1) return Cx{0.0, 0.0};
    return std::nullopt;  // infinity not fixed
}

SpherePoint eval_via_inverted_chart(const RationalMap& f, SpherePoint p) {
    // g(w) = 1/f(1/w) = w^(dn-dd) * rev(den)(w) / rev(num)(w)
    int dn = f.num.deg(), dd = f.den.deg();
    std::vector<Cx> ra(f.num.c.rbegin(), f.num.c.rend());
    std::vector<Cx> rb(f.den.c.rbegin(), f.den.c.rend());
    Poly A{std::move(ra)}, B{std::move(rb)};

    Cx w = p.at_inf ? Cx{0.0, 0.0} : Cx(1.0, 0.0) / p.z;
    Cx av = A.eval(w), bv = B.eval(w);
    Cx wp{1.0, 0.0};
    for (int i = 0; i < std::abs(dn - dd); ++i) wp *= w;
    // value of g at w, honoring the sign of dn-dd
    bool g_inf;
    Cx gv;
    if (dn >= dd) {
        if (std::abs(av) <= 64.0 * eval_noise_bound(A, w)) {
            g_inf = true;
            gv = Cx{0.0, 0.0};
        } else {
            g_inf = false;
            gv = wp * bv / av;
        }
    } else {
        Cx denom = wp * av;
        if (std::abs(denom) < 1e-300) {
            g_inf = true;
            gv = Cx{0.0, 0.0};
        } else {
            g_inf = false;
            gv = bv / denom;
        }
    }
    if (g_inf) return SpherePoint::finite(Cx{0.0, 0.0});  // f = 1/g
    if (std::abs(gv) < 1e-300) return SpherePoint::infinity();
    return SpherePoint::finite(Cx(1.0, 0.0) / gv);
}

}  // namespace ng
