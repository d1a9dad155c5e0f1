#include "ng/thurston.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ng {

namespace {

void check_matrix(const NonnegMatrix& m) {
    if (m.n < 0 || m.a.size() != size_t(m.n) * size_t(m.n))
        throw invalid_spec_error("matrix storage does not match its declared size");
    for (double x : m.a)
        if (!std::isfinite(x) || x < 0.0)
            throw invalid_spec_error("matrix entries must be finite and nonnegative");
}

// Pairwise reachability in the support digraph.
std::vector<char> support_reach(const NonnegMatrix& m) {
    int n = m.n;
    std::vector<char> r(size_t(n) * size_t(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i * n + j] = m.at(i, j) > 0.0 ? 1 : 0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (r[i * n + k])
                for (int j = 0; j < n; ++j)
                    if (r[k * n + j]) r[i * n + j] = 1;
    return r;
}

// Spectral radius of the principal submatrix on ids, assumed strongly
// connected. Shifting by the identity makes powers aperiodic, so repeated
// squaring with max-entry normalization converges; the accumulated log of
// the normalization factors divided by the power is the log of the radius.
double block_spectral_radius(const NonnegMatrix& m, const std::vector<int>& ids) {
    int k = int(ids.size());
    if (k == 1) return m.at(ids[0], ids[0]);
    std::vector<double> b(size_t(k) * size_t(k));
    double mx = 0.0;
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
            b[r * k + c] = m.at(ids[r], ids[c]) + (r == c ? 1.0 : 0.0);
            mx = std::max(mx, b[r * k + c]);
        }
    double logscale = std::log(mx);
    for (double& x : b) x /= mx;

    std::vector<double> sq(b.size());
    double est = logscale, prev = 0.0;
    const int rounds = 64;
    for (int round = 1; round <= rounds; ++round) {
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) {
                double s = 0.0;
                for (int l = 0; l < k; ++l) s += b[r * k + l] * b[l * k + c];
                sq[r * k + c] = s;
            }
        double top = 0.0;
        for (double x : sq) top = std::max(top, x);
        if (!(top > 0.0) || !std::isfinite(top))
            throw numerical_error("spectral radius iteration degenerated");
        logscale = 2.0 * logscale + std::log(top);
        for (size_t t = 0; t < sq.size(); ++t) b[t] = sq[t] / top;
        prev = est;
        est = logscale / std::ldexp(1.0, round);
    }
    if (std::abs(est - prev) > 1e-9 * (1.0 + std::abs(est))) {
        std::ostringstream os;
        os << "spectral radius failed to settle; last estimate " << std::exp(est) - 1.0;
        throw numerical_error(os.str());
    }
    return std::exp(est) - 1.0;
}

constexpr long long kWeightCap = 2000000000000000LL;  // 2e15

long long checked_mul(long long a, long long b) {
    if (a > kWeightCap / b) throw numerical_error("orbifold weight overflow");
    return a * b;
}

long long checked_lcm(long long a, long long b) {
    long long g = std::gcd(a, b);
    return checked_mul(a / g, b);
}

}  // namespace

NonnegMatrix thurston_matrix(int curves, const std::vector<LiftDatum>& data) {
    if (curves < 0) throw invalid_spec_error("curve count must be nonnegative");
    NonnegMatrix m;
    m.n = curves;
    m.a.assign(size_t(curves) * size_t(curves), 0.0);
    for (int i = 0; i < curves; ++i) m.labels.push_back("curve" + std::to_string(i));
    std::vector<char> seen(curves, 0);
    for (const LiftDatum& d : data) {
        if (d.source < 0 || d.source >= curves)
            throw invalid_spec_error("lift source index out of range");
        if (seen[d.source]) throw invalid_spec_error("duplicate lift record for one curve");
        seen[d.source] = 1;
        for (const LiftComponent& c : d.components) {
            if (c.degree < 1) throw invalid_spec_error("lift component degree must be positive");
            if (c.target >= curves) throw invalid_spec_error("lift target index out of range");
            if (c.target >= 0) m.at(c.target, d.source) += 1.0 / double(c.degree);
        }
    }
    return m;
}

double leading_eigenvalue(const NonnegMatrix& m) {
    check_matrix(m);
    if (m.n == 0) return 0.0;
    std::vector<char> reach = support_reach(m);
    std::vector<char> placed(m.n, 0);
    double best = 0.0;
    for (int i = 0; i < m.n; ++i) {
        if (placed[i]) continue;
        std::vector<int> ids;
        for (int j = 0; j < m.n; ++j)
            if (j == i || (reach[i * m.n + j] && reach[j * m.n + i])) {
                placed[j] = 1;
                ids.push_back(j);
            }
        best = std::max(best, block_spectral_radius(m, ids));
    }
    return best;
}

bool is_irreducible(const NonnegMatrix& m) {
    check_matrix(m);
    if (m.n <= 1) return true;
    std::vector<char> reach = support_reach(m);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            if (i != j && !reach[i * m.n + j]) return false;
    return true;
}

ObstructionReport obstruction_verdict(int curves, const std::vector<LiftDatum>& data) {
    ObstructionReport r;
    r.matrix = thurston_matrix(curves, data);
    r.lambda = leading_eigenvalue(r.matrix);
    r.irreducible = is_irreducible(r.matrix);
    r.obstruction_candidate = r.irreducible && r.lambda >= 1.0 - 1e-10;
    r.verdict = r.obstruction_candidate ? "obstruction candidate" : "no obstruction";
    return r;
}

OrbifoldSignature orbifold_signature(const OrbifoldMapData& data) {
    int n = int(data.image.size());
    if (int(data.local_degree.size()) != n ||
        (!data.points.empty() && int(data.points.size()) != n))
        throw invalid_spec_error("orbifold data fields disagree on the marked set size");
    for (int i = 0; i < n; ++i) {
        if (data.image[i] < 0 || data.image[i] >= n)
            throw invalid_spec_error("orbifold self-map leaves the marked set");
        if (data.local_degree[i] < 1) throw invalid_spec_error("local degree must be at least 1");
    }

    // Every orbit falls onto a cycle. A cycle carrying any branching forces
    // an infinite weight on all of its points: one trip around multiplies the
    // weight by the degree product. Cycles are forward invariant, so the
    // infinite weights stay exactly there.
    std::vector<char> forced(n, 0);
    std::vector<int> color(n, 0);
    for (int s = 0; s < n; ++s) {
        if (color[s]) continue;
        std::vector<int> path;
        int x = s;
        while (color[x] == 0) {
            color[x] = 1;
            path.push_back(x);
            x = data.image[x];
        }
        if (color[x] == 1) {
            auto it = std::find(path.begin(), path.end(), x);
            bool branched = false;
            for (auto jt = it; jt != path.end(); ++jt)
                branched = branched || data.local_degree[*jt] > 1;
            if (branched)
                for (auto jt = it; jt != path.end(); ++jt) forced[*jt] = 1;
        }
        for (int y : path) color[y] = 2;
    }

    // Least finite weights elsewhere: iterate weight(x) = lcm over marked
    // preimages y of weight(y) * degree(y). Starting from all ones the
    // iterates grow monotonically and stabilize once constraints have
    // traveled down the longest chain and around the (unbranched) cycles.
    std::vector<long long> v(n, 1);
    bool changed = true;
    for (int round = 0; round < 2 * n + 2 && changed; ++round) {
        changed = false;
        for (int x = 0; x < n; ++x) {
            if (forced[x]) continue;
            long long acc = 1;
            for (int y = 0; y < n; ++y)
                if (data.image[y] == x && !forced[y])
                    acc = checked_lcm(acc, checked_mul(v[y], data.local_degree[y]));
            if (acc != v[x]) {
                v[x] = acc;
                changed = true;
            }
        }
    }
    if (changed) throw numerical_error("orbifold weights failed to stabilize");

    OrbifoldSignature sig;
    sig.weights.resize(n);
    double defect = 0.0;
    for (int i = 0; i < n; ++i) {
        if (forced[i]) {
            sig.weights[i] = kOrbifoldInfinity;
            defect += 1.0;
        } else {
            sig.weights[i] = v[i];
            defect += 1.0 - 1.0 / double(v[i]);
        }
    }
    sig.chi = 2.0 - defect;
    sig.hyperbolic = sig.chi < 0.0;
    return sig;
}

}  // namespace ng
