#pragma once
#include <optional>
#include <string>
#include <vector>

#include "ng/poly.hpp"

namespace ng {

enum class FixedKind { Superattracting, Attracting, Repelling };

struct FixedPointRecord {
    SpherePoint location;
    Cx multiplier;
    int m = 1;  // multiplicity of the underlying root; 0 for the point at infinity
    FixedKind kind = FixedKind::Attracting;
};

// Finite fixed points sorted by (re, im), then infinity last when it is fixed.
// Throws not_newton_error when a finite multiplier misses every (m-1)/m value.
std::vector<FixedPointRecord> classify_fixed_points(const RationalMap& f, const Tolerances& tol = {});

struct NewtonVerdict {
    bool ok = false;
    std::string reason;  // empty when ok
};

// Degree >= 3, infinity a repelling fixed point, every finite fixed point on
// the (m-1)/m multiplier ladder.
NewtonVerdict is_newton_map(const RationalMap& f, const Tolerances& tol = {});

struct OrbitFate {
    bool resolved = false;
    int fixed_index = -1;  // index into classify_fixed_points output
    int steps = 0;
};

struct CriticalPointRecord {
    SpherePoint location;
    int local_degree = 2;
    std::vector<SpherePoint> orbit;
    OrbitFate fate;
};

// Finite critical points from the derivative numerator (a pole of order k
// appears with local degree k), plus infinity if the count falls short.
// Orbits are iterated up to cutoff and resolved within tol.eps_fix.
std::vector<CriticalPointRecord> critical_points(const RationalMap& f, int cutoff = 256,
                                                 const Tolerances& tol = {});

struct PcfReport {
    bool postcritically_fixed = false;
    std::vector<CriticalPointRecord> critical;
};

PcfReport is_postcritically_fixed(const RationalMap& f, int cutoff = 256, const Tolerances& tol = {});

struct BasinVerdict {
    enum class Outcome { Converges, EscapesToInfinity, Undecided } outcome;
    int root_index = -1;
    int iterations = 0;
};

BasinVerdict basin_index(const RationalMap& f, const std::vector<Cx>& roots, Cx z, int max_iter,
                         const Tolerances& tol = {});

// Taylor coefficients q_0..q_order of f around a finite non-pole point.
std::vector<Cx> local_series(const RationalMap& f, Cx z0, int order);

// Unit tangent directions of the k-1 fixed internal rays at a superattracting
// root of local degree k.
std::vector<Cx> fixed_ray_directions(const RationalMap& f, Cx root, int k);

struct RayPolyline {
    int root_index = -1;
    int ray_index = 0;
    std::vector<Cx> points;  // starts at the root itself, runs outward
    SpherePoint landing = SpherePoint::infinity();
};

// Fixed internal ray of index j at a superattracting root of local degree k,
// traced from a second-order Bottcher seed by inverse iteration until |z|
// exceeds outer_radius (the ray lands at infinity).  Throws trace_error when
// a corrector step cannot be completed, invalid_spec_error when k < 2.
RayPolyline trace_internal_ray(const RationalMap& f, Cx root, int k, int ray_index,
                               double outer_radius = 1e8, const Tolerances& tol = {});

// Largest distance between f(sample) and the polyline, relative to max(1,|f(sample)|).
double ray_invariance_defect(const RationalMap& f, const std::vector<Cx>& points);

struct PreimageSet {
    std::vector<RootCluster> finite;  // multiplicity = local degree of f there
    int infinity_degree = 0;          // local degree at infinity, 0 if not a preimage
};

PreimageSet preimages(const RationalMap& f, SpherePoint value, double merge_tol = 1e-7);

// Lift a curve through f starting at the given preimage of curve.front().
// Adaptive bisection between samples; throws lift_error on branch ambiguity.
std::vector<Cx> lift_curve(const RationalMap& f, const std::vector<Cx>& curve, Cx start,
                           const Tolerances& tol = {});

// One continuation step of a lift: given f(w_prev) = t_prev, find the preimage
// of t_next on the same branch.
Cx continue_lift(const RationalMap& f, Cx w_prev, Cx t_prev, Cx t_next, int depth = 0);

}  // namespace ng
