#include "ng/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace ng {

namespace {

bool finite_cx(Cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Finite fixed points (roots of num - z den) without multiplier checking.
std::vector<Cx> fixed_points_raw(const RationalMap& f) {
    Poly eq = strip_leading(sub(f.num, mul_by_z(f.den)));
    if (eq.deg() == 0) return {};
    std::vector<Cx> out;
    for (const RootCluster& r : poly_roots(eq)) out.push_back(r.center);
    std::sort(out.begin(), out.end(), [](Cx a, Cx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

bool infinity_fixed(const RationalMap& f) { return f.num.deg() > f.den.deg(); }

}  // namespace

std::vector<FixedPointRecord> classify_fixed_points(const RationalMap& f, const Tolerances& tol) {
    std::vector<FixedPointRecord> out;
    for (Cx xi : fixed_points_raw(f)) {
        Cx lam = f.deriv_at(xi);
        FixedPointRecord rec;
        rec.location = SpherePoint::finite(xi);
        rec.multiplier = lam;
        if (std::abs(lam) <= tol.eps_fix) {
            rec.m = 1;
            rec.kind = FixedKind::Superattracting;
        } else {
            // multiplier law: lam = (m-1)/m for the root multiplicity m
            Cx inv = Cx(1.0, 0.0) / (Cx(1.0, 0.0) - lam);
            long mr = std::lround(inv.real());
            if (mr < 1 || mr > 100000 ||
                std::abs(lam - Cx(double(mr - 1) / double(mr), 0.0)) > tol.eps_fix)
                throw not_newton_error("finite fixed point multiplier off the (m-1)/m ladder");
            rec.m = static_cast<int>(mr);
            rec.kind = mr == 1 ? FixedKind::Superattracting : FixedKind::Attracting;
        }
        out.push_back(rec);
    }
    if (infinity_fixed(f)) {
        FixedPointRecord rec;
        rec.location = SpherePoint::infinity();
        rec.multiplier = *multiplier_at_infinity(f);
        rec.m = 0;
        double am = std::abs(rec.multiplier);
        rec.kind = am <= tol.eps_fix  ? FixedKind::Superattracting
                   : am < 1.0        ? FixedKind::Attracting
                                     : FixedKind::Repelling;
        out.push_back(rec);
    }
    return out;
}

NewtonVerdict is_newton_map(const RationalMap& f, const Tolerances& tol) {
    if (f.degree() < 3) return {false, "degree below 3"};
    if (!infinity_fixed(f)) return {false, "infinity is not fixed"};
    std::optional<Cx> mi = multiplier_at_infinity(f);
    if (!mi || std::abs(*mi) <= 1.0) return {false, "infinity is not repelling"};
    std::vector<FixedPointRecord> fixed;
    try {
        fixed = classify_fixed_points(f, tol);
    } catch (const not_newton_error& e) {
        return {false, e.what()};
    }
    int finite = 0;
    for (const auto& r : fixed)
        if (!r.location.at_inf) ++finite;
    if (finite == 0) return {false, "no finite fixed points"};
    return {true, ""};
}

namespace {

// When infinity attracts, orbits past the escape radius can be snapped there.
// When it repels (every Newton map), a near-pole excursion descends back, so
// only an exact pole hit counts as landing at infinity.
bool snap_escape_to_infinity(const RationalMap& f) {
    if (!infinity_fixed(f)) return false;
    std::optional<Cx> mi = multiplier_at_infinity(f);
    return mi && std::abs(*mi) < 1.0;
}

// Iterate an orbit until it lands within eps_fix of a fixed point.
void run_orbit(const RationalMap& f, const std::vector<FixedPointRecord>& fixed,
               CriticalPointRecord& rec, int cutoff, const Tolerances& tol) {
    SpherePoint z = rec.location;
    rec.orbit.clear();
    rec.orbit.push_back(z);
    rec.fate = {};
    auto resolve = [&](SpherePoint p, int steps) {
        for (size_t i = 0; i < fixed.size(); ++i) {
            const FixedPointRecord& fp = fixed[i];
            if (fp.location.at_inf && p.at_inf) {
                rec.fate = {true, static_cast<int>(i), steps};
                return true;
            }
            if (!fp.location.at_inf && !p.at_inf &&
                std::abs(p.z - fp.location.z) <= tol.eps_fix) {
                rec.fate = {true, static_cast<int>(i), steps};
                return true;
            }
        }
        return false;
    };
    if (resolve(z, 0)) return;
    bool snap = snap_escape_to_infinity(f);
    for (int n = 1; n <= cutoff; ++n) {
        z = f.eval(z);
        if (!z.at_inf && snap && std::abs(z.z) > tol.escape_radius) z = SpherePoint::infinity();
        if (!z.at_inf && !finite_cx(z.z)) return;  // overflow, leave unresolved
        rec.orbit.push_back(z);
        if (resolve(z, n)) return;
    }
}

}  // namespace

std::vector<CriticalPointRecord> critical_points(const RationalMap& f, int cutoff,
                                                 const Tolerances& tol) {
    std::vector<FixedPointRecord> fixed;
    try {
        fixed = classify_fixed_points(f, tol);
    } catch (const not_newton_error&) {
        // fall back to unclassified landing targets
        fixed.clear();
        for (Cx xi : fixed_points_raw(f)) {
            FixedPointRecord rec;
            rec.location = SpherePoint::finite(xi);
            fixed.push_back(rec);
        }
        if (infinity_fixed(f)) {
            FixedPointRecord rec;
            rec.location = SpherePoint::infinity();
            fixed.push_back(rec);
        }
    }

    std::vector<CriticalPointRecord> out;
    Poly w = strip_leading(f.wronskian());
    int found = 0;
    if (w.deg() >= 1) {
        for (const RootCluster& r : poly_roots(w, tol.merge_tol)) {
            CriticalPointRecord rec;
            rec.location = SpherePoint::finite(r.center);
            rec.local_degree = r.multiplicity + 1;
            run_orbit(f, fixed, rec, cutoff, tol);
            out.push_back(rec);
            found += r.multiplicity;
        }
    }
    // Riemann-Hurwitz completion: whatever is missing sits at infinity.
    int expect = 2 * f.degree() - 2;
    if (found < expect) {
        CriticalPointRecord rec;
        rec.location = SpherePoint::infinity();
        rec.local_degree = expect - found + 1;
        run_orbit(f, fixed, rec, cutoff, tol);
        out.push_back(rec);
    }
    return out;
}

PcfReport is_postcritically_fixed(const RationalMap& f, int cutoff, const Tolerances& tol) {
    PcfReport rep;
    rep.critical = critical_points(f, cutoff, tol);
    rep.postcritically_fixed = true;
    for (const auto& c : rep.critical)
        if (!c.fate.resolved) rep.postcritically_fixed = false;
    return rep;
}

BasinVerdict basin_index(const RationalMap& f, const std::vector<Cx>& roots, Cx z, int max_iter,
                         const Tolerances& tol) {
    SpherePoint p = SpherePoint::finite(z);
    bool snap = snap_escape_to_infinity(f);
    for (int n = 1; n <= max_iter; ++n) {
        p = f.eval(p);
        if (p.at_inf || (snap && std::abs(p.z) > tol.escape_radius))
            return {BasinVerdict::Outcome::EscapesToInfinity, -1, n};
        if (!finite_cx(p.z)) return {BasinVerdict::Outcome::Undecided, -1, n};
        for (size_t i = 0; i < roots.size(); ++i)
            if (std::abs(p.z - roots[i]) <= tol.eps_fix)
                return {BasinVerdict::Outcome::Converges, static_cast<int>(i), n};
    }
    return {BasinVerdict::Outcome::Undecided, -1, max_iter};
}

std::vector<Cx> local_series(const RationalMap& f, Cx z0, int order) {
    Poly N = taylor_shift(f.num, z0);
    Poly D = taylor_shift(f.den, z0);
    if (std::abs(D.c[0]) <= 64.0 * eval_noise_bound(f.den, z0))
        throw numerical_error("local series requested at a pole");
    std::vector<Cx> q(order + 1, Cx{0.0, 0.0});
    for (int m = 0; m <= order; ++m) {
        Cx nm = m < static_cast<int>(N.c.size()) ? N.c[m] : Cx{0.0, 0.0};
        Cx srm{0.0, 0.0};
        for (int i = 0; i < m; ++i) {
            int di = m - i;
            if (di < static_cast<int>(D.c.size())) srm += q[i] * D.c[di];
        }
        q[m] = (nm - srm) / D.c[0];
    }
    return q;
}

namespace {

// A real negative coefficient with imaginary part -0.0 would land on the other
// side of the arg branch cut and relabel the rays; pin -0.0 to +0.0.
Cx canon_coeff(Cx a) { return a.imag() == 0.0 ? Cx{a.real(), 0.0} : a; }

}  // namespace

std::vector<Cx> fixed_ray_directions(const RationalMap& f, Cx root, int k) {
    if (k < 2) throw invalid_spec_error("local degree must be >= 2");
    std::vector<Cx> q = local_series(f, root, k);
    Cx a = canon_coeff(q[k]);
    if (std::abs(a) < 1e-300) throw trace_error("degenerate local model at root");
    std::vector<Cx> dirs;
    for (int j = 0; j + 1 < k; ++j) {
        double th = (2.0 * M_PI * j - std::arg(a)) / double(k - 1);
        dirs.push_back(std::polar(1.0, th));
    }
    return dirs;
}

namespace {

Cx eval_finite(const RationalMap& f, Cx w, bool* ok) {
    Cx nv = f.num.eval(w), dv = f.den.eval(w);
    if (std::abs(dv) <= 64.0 * eval_noise_bound(f.den, w)) {
        *ok = false;
        return Cx{0.0, 0.0};
    }
    *ok = true;
    return nv / dv;
}

// Distance from the root at which the special structure around it ends:
// nearest other fixed point, pole, or critical point.
double local_scale(const RationalMap& f, Cx z0) {
    double best = 1e300;
    auto consider = [&](Cx q) {
        double d = std::abs(q - z0);
        if (d > 1e-9 * (1.0 + std::abs(z0))) best = std::min(best, d);
    };
    for (Cx q : fixed_points_raw(f)) consider(q);
    for (const RootCluster& r : poles_of(f)) consider(r.center);
    Poly w = strip_leading(f.wronskian());
    if (w.deg() >= 1)
        for (const RootCluster& r : poly_roots(w)) consider(r.center);
    if (best > 1e200) best = 1.0 + std::abs(z0);
    return best;
}

}  // namespace

Cx continue_lift(const RationalMap& f, Cx w_prev, Cx t_prev, Cx t_next, int depth) {
    if (depth > 18) throw lift_error("lift ambiguity: bisection depth exceeded");
    Cx df = f.deriv_at(w_prev);
    if (finite_cx(df) && std::abs(df) > 1e-300) {
        Cx step = (t_next - t_prev) / df;
        Cx w = w_prev + step;
        bool converged = false;
        for (int it = 0; it < 40; ++it) {
            bool ok;
            Cx F = eval_finite(f, w, &ok);
            if (!ok || !finite_cx(F)) break;
            Cx resid = F - t_next;
            if (std::abs(resid) <= 1e-13 * std::max(1.0, std::abs(t_next))) {
                converged = true;
                break;
            }
            Cx d = f.deriv_at(w);
            if (!finite_cx(d) || std::abs(d) < 1e-300) break;
            Cx delta = resid / d;
            Cx nw = w - delta;
            if (!finite_cx(nw)) break;
            w = nw;
            // Near zeros of the denominator the residual is dominated by
            // cancellation noise and never meets the tolerance above, but the
            // Newton step still bounds the error in w itself.
            if (std::abs(delta) <= 1e-14 * (1.0 + std::abs(w))) {
                converged = true;
                break;
            }
        }
        double window = 8.0 * (std::abs(step) + 1e-12 * (1.0 + std::abs(w_prev)));
        if (converged && std::abs(w - w_prev) <= std::max(window, 1e-11))
            return w;
    }
    Cx tm = 0.5 * (t_prev + t_next);
    Cx wm = continue_lift(f, w_prev, t_prev, tm, depth + 1);
    return continue_lift(f, wm, tm, t_next, depth + 1);
}

RayPolyline trace_internal_ray(const RationalMap& f, Cx root, int k, int ray_index,
                               double outer_radius, const Tolerances& tol) {
    (void)tol;
    if (k < 2) throw invalid_spec_error("superattracting root must have local degree >= 2");
    if (ray_index < 0 || ray_index > k - 2) throw invalid_spec_error("ray index out of range");

    std::vector<Cx> q = local_series(f, root, k + 1);
    Cx a = canon_coeff(q[k]);
    if (std::abs(a) < 1e-300) throw trace_error("degenerate local model at root");
    Cx alpha = q[k + 1] / a;       // f(root+v) = root + a v^k (1 + alpha v + ...)
    Cx c = std::pow(a, 1.0 / double(k - 1));  // Bottcher chart w = c v (1 + (alpha/k) v)
    Cx B = alpha / double(k);

    double scale = local_scale(f, root);
    Cx u = std::polar(1.0, (2.0 * M_PI * ray_index - std::arg(a)) / double(k - 1));

    // Seed radius: inside the zone where the z^k model holds to 10%, but large
    // enough that f' keeps corrector steps well conditioned against roundoff.
    auto model_err = [&](double rho) {
        Cx v = rho * u;
        bool ok;
        Cx F = eval_finite(f, root + v, &ok);
        if (!ok) return 1e300;
        Cx pred = a * std::pow(v, k);
        return static_cast<double>(std::abs(F - root - pred) / std::abs(pred));
    };
    double rho = 0.1 * scale;
    while (model_err(rho) > 0.1 && rho > 1e-12 * scale) rho *= 0.5;
    double rho_solve = std::pow(1e-7 / (double(k) * std::abs(a)), 1.0 / double(k - 1));
    rho = std::min(rho, std::max(rho_solve, 1e-8 * scale));
    rho = std::min(rho, 0.1 * scale);

    double rB = std::abs(c) * rho;
    if (rB >= 0.5) {
        rB = 0.5;
        rho = rB / std::abs(c);
    }
    double th = 2.0 * M_PI * ray_index / double(k - 1);

    // Seed segment spans Bottcher radii [rB^k, rB]; successive pullbacks then
    // attach seamlessly at radius rB.  Second-order chart inversion.
    int s = 24;
    int ns = k * s;
    std::vector<Cx> seed(ns + 1);
    double lnr = std::log(rB);
    for (int i = 0; i <= ns; ++i) {
        double r = std::exp((double(k) - double(k - 1) * double(i) / double(ns)) * lnr);
        Cx W = std::polar(r, th);
        Cx v0 = W / c;
        Cx denom = c * (Cx(1.0, 0.0) + 2.0 * B * v0);
        Cx v = v0;
        if (std::abs(denom) > 1e-300) v = v0 - (c * v0 * (Cx(1.0, 0.0) + B * v0) - W) / denom;
        seed[i] = root + v;
    }

    RayPolyline ray;
    ray.ray_index = ray_index;
    ray.points.push_back(root);
    ray.points.insert(ray.points.end(), seed.begin(), seed.end());

    std::vector<Cx> prev = seed;
    bool escaped = false;
    try {
        for (int level = 0; level < 600; ++level) {
            if (std::abs(prev.back()) >= outer_radius) {
                escaped = true;
                break;
            }
            std::vector<Cx> cur(prev.size());
            cur[0] = prev.back();  // junction: f maps the new tip run onto prev
            for (size_t j = 1; j < prev.size(); ++j)
                cur[j] = continue_lift(f, cur[j - 1], prev[j - 1], prev[j]);
            ray.points.insert(ray.points.end(), cur.begin() + 1, cur.end());
            prev = std::move(cur);
        }
    } catch (const lift_error& e) {
        throw trace_error(std::string("ray corrector failed: ") + e.what());
    }
    if (!escaped) throw trace_error("ray failed to reach the escape radius");
    ray.landing = SpherePoint::infinity();
    return ray;
}

namespace {

double point_segment_dist(Cx p, Cx a, Cx b) {
    Cx ab = b - a;
    double L2 = std::norm(ab);
    if (L2 < 1e-300) return std::abs(p - a);
    double t = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / L2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

}  // namespace

double ray_invariance_defect(const RationalMap& f, const std::vector<Cx>& points) {
    double worst = 0.0;
    for (size_t i = 1; i < points.size(); ++i) {
        bool ok;
        Cx F = eval_finite(f, points[i], &ok);
        if (!ok) continue;  // sample on a pole maps to infinity
        double best = 1e300;
        for (size_t j = 0; j + 1 < points.size(); ++j)
            best = std::min(best, point_segment_dist(F, points[j], points[j + 1]));
        worst = std::max(worst, best / std::max(1.0, std::abs(F)));
    }
    return worst;
}

PreimageSet preimages(const RationalMap& f, SpherePoint value, double merge_tol) {
    PreimageSet out;
    int d = f.degree();
    if (value.at_inf) {
        if (f.den.deg() > 0) out.finite = poly_roots(f.den, merge_tol);
        int finite_count = 0;
        for (const auto& r : out.finite) finite_count += r.multiplicity;
        out.infinity_degree = d - finite_count;
        return out;
    }
    Poly eq = strip_leading(sub(f.num, scale(f.den, value.z)));
    if (eq.deg() > 0) out.finite = poly_roots(eq, merge_tol);
    int finite_count = 0;
    for (const auto& r : out.finite) finite_count += r.multiplicity;
    out.infinity_degree = d - finite_count;
    return out;
}

std::vector<Cx> lift_curve(const RationalMap& f, const std::vector<Cx>& curve, Cx start,
                           const Tolerances& tol) {
    if (curve.size() < 2) throw lift_error("curve needs at least two samples");
    bool ok;
    Cx F = eval_finite(f, start, &ok);
    if (!ok || std::abs(F - curve.front()) > 1e-5 * std::max(1.0, std::abs(curve.front())))
        throw lift_error("start is not a preimage of the first curve sample");
    (void)tol;
    std::vector<Cx> out;
    out.reserve(curve.size());
    out.push_back(start);
    for (size_t i = 1; i < curve.size(); ++i)
        out.push_back(continue_lift(f, out.back(), curve[i - 1], curve[i]));
    return out;
}

}  // namespace ng
