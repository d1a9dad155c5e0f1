#pragma once
#include <string>
#include <vector>

#include "ng/base.hpp"

namespace ng {

// One preimage component of a curve under the branched cover: the family
// member it is isotopic to (or -1 when it is peripheral / leaves the family)
// and the degree of the restricted covering on it.
struct LiftComponent {
    int target = -1;
    int degree = 1;
};

// Full lift record for one curve of the family.
struct LiftDatum {
    int source = 0;
    std::vector<LiftComponent> components;
};

// Dense square matrix with nonnegative entries, row-major.
struct NonnegMatrix {
    int n = 0;
    std::vector<double> a;
    std::vector<std::string> labels;

    double at(int row, int col) const { return a[size_t(row) * size_t(n) + size_t(col)]; }
    double& at(int row, int col) { return a[size_t(row) * size_t(n) + size_t(col)]; }
};

// Transition matrix of the curve family: entry (j, i) sums 1/degree over the
// preimage components of curve i that are isotopic to curve j.
NonnegMatrix thurston_matrix(int curves, const std::vector<LiftDatum>& data);

// Spectral radius of a nonnegative matrix. Decomposes into strongly connected
// blocks and runs a normalized power scheme on each; throws numerical_error
// (with the last estimate in the message) if the scheme fails to settle.
double leading_eigenvalue(const NonnegMatrix& m);

// True when the support digraph is strongly connected. Size-one matrices are
// always irreducible: the lone index pair is already connected by the zeroth
// power, whose diagonal is positive.
bool is_irreducible(const NonnegMatrix& m);

struct ObstructionReport {
    NonnegMatrix matrix;
    double lambda = 0.0;
    bool irreducible = false;
    bool obstruction_candidate = false;
    std::string verdict;  // "obstruction candidate" or "no obstruction"
};

// Builds the transition matrix and reports its leading eigenvalue,
// irreducibility, and whether the family is an obstruction candidate
// (irreducible with eigenvalue >= 1 up to a 1e-10 guard band).
ObstructionReport obstruction_verdict(int curves, const std::vector<LiftDatum>& data);

// Finite marked set with a self-map: point names (optional, may be empty),
// the image index of every point, and the local degree of the map there.
struct OrbifoldMapData {
    std::vector<std::string> points;
    std::vector<int> image;
    std::vector<int> local_degree;
};

constexpr long long kOrbifoldInfinity = -1;

struct OrbifoldSignature {
    std::vector<long long> weights;  // kOrbifoldInfinity encodes an infinite weight
    double chi = 2.0;
    bool hyperbolic = false;
};

// Smallest weight function on the marked set such that the weight of x is a
// multiple of weight(y) * local_degree(y) for every marked preimage y of x.
// Points on a cycle that carries branching get weight infinity; elsewhere the
// divisibility constraints have a least finite solution. The Euler
// characteristic is 2 - sum(1 - 1/weight), with 1 - 1/infinity read as 1,
// and the orbifold is hyperbolic when it is negative.
OrbifoldSignature orbifold_signature(const OrbifoldMapData& data);

}  // namespace ng
