#pragma once
#include <complex>
#include <stdexcept>
#include <string>

namespace ng {

using Cx = std::complex<double>;

// Point on the Riemann sphere: a finite complex number or the point at infinity.
struct SpherePoint {
    Cx z{};
    bool at_inf = false;

    static SpherePoint infinity() { return SpherePoint{Cx{0.0, 0.0}, true}; }
    static SpherePoint finite(Cx w) { return SpherePoint{w, false}; }
};

inline bool approx_eq(Cx a, Cx b, double tol) { return std::abs(a - b) <= tol; }

// Numeric policy shared across the pipeline.
struct Tolerances {
    double eps_fix = 1e-9;        // fixed-point landing radius
    double escape_radius = 1e6;   // |z| beyond this counts as the point at infinity
    int max_iter = 10000;
    double merge_tol = 1e-7;      // vertex/root identification radius
    double root_tol = 1e-13;      // polynomial root refinement target
    double match_tol = 1e-9;      // num/den common-root cancellation radius
    double ray_tube = 1e-6;       // ray invariance tube radius
    double angle_tie = 1e-9;      // rotation tie threshold at finite vertices
    double angle_tie_inf = 1e-6;  // flagged angular gap between edges at infinity
};

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct invalid_spec_error : error { using error::error; };   // bad root spec / input data
struct degenerate_map_error : error { using error::error; }; // Newton map of deg <= 1 polynomial
struct numerical_error : error { using error::error; };      // root finder / iteration failure
struct not_newton_error : error { using error::error; };     // multiplier law violated
struct trace_error : error { using error::error; };          // ray tracing stalled
struct lift_error : error { using error::error; };           // curve lift ambiguity or step failure
struct pullback_error : error { using error::error; };       // graph pullback failure
struct graph_error : error { using error::error; };          // malformed embedded graph
struct io_error : error { using error::error; };             // file access or parse failure

}  // namespace ng
