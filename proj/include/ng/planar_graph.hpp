#pragma once
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ng/base.hpp"

namespace ng {

enum class VertexKind { Infinity, Root, Pole, Prepole, RootPreimage };

struct VertexRecord {
    VertexKind kind = VertexKind::RootPreimage;
    std::optional<SpherePoint> pos;
    int level = 0;
};

struct EdgeRecord {
    std::array<int, 2> v{-1, -1};  // origin of dart 2e is v[0], of 2e+1 is v[1]
    int level = 0;
    std::vector<Cx> geometry;  // optional polyline, finite part, from v[0] to v[1]
};

// Planar graph with a rotation system: per vertex the counterclockwise cyclic
// order of incident darts (dart 2e+s leaves edge e from endpoint s).
struct EmbeddedGraph {
    std::vector<VertexRecord> vertices;
    std::vector<EdgeRecord> edges;
    std::vector<std::vector<int>> rotation;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int dart_count() const { return 2 * edge_count(); }
    static int twin(int d) { return d ^ 1; }
    int origin(int d) const { return edges[d >> 1].v[d & 1]; }
    int target(int d) const { return origin(twin(d)); }
    int degree(int v) const { return static_cast<int>(rotation[v].size()); }

    bool is_connected() const;
    // Throws graph_error: rotation must partition the darts, each dart listed
    // at its origin, and the graph must be connected.
    void validate() const;
};

// Slot lookup for the rotation system.
struct DartCycles {
    explicit DartCycles(const EmbeddedGraph& g);
    int slot(int d) const { return slot_[d]; }
    int next_at_vertex(int d) const;  // one step counterclockwise
    int prev_at_vertex(int d) const;
    int next_in_face(int d) const { return next_at_vertex(EmbeddedGraph::twin(d)); }

  private:
    const EmbeddedGraph* g_;
    std::vector<int> slot_;
};

struct FaceSet {
    std::vector<std::vector<int>> faces;  // dart orbits under next_in_face
    std::vector<int> face_of_dart;
    int count() const { return static_cast<int>(faces.size()); }
};

// Face tracing; enforces the Euler relation V - E + F = 2 (sphere embedding).
FaceSet trace_faces(const EmbeddedGraph& g);

// Corner d is the sector at origin(d) swept counterclockwise from dart d to
// the next dart; it belongs to the face on that side.
std::vector<int> corner_owner_faces(const EmbeddedGraph& g);

// Self-map of an embedded graph sending vertices to vertices and edges onto
// single edges (dart 2e maps to edge_image_dart[e], its twin to the twin).
struct GraphMapRecord {
    std::vector<int> vertex_image;
    std::vector<int> edge_image_dart;
    std::vector<int> local_degree;

    int dart_image(int d) const {
        int base = edge_image_dart[d >> 1];
        if (base < 0) return -1;
        return (d & 1) ? EmbeddedGraph::twin(base) : base;
    }
};

GraphMapRecord identity_map(const EmbeddedGraph& g);

struct MapCheck {
    bool ok = false;
    std::vector<std::string> problems;
};

// Structural graph-map conditions: defined images, no collapsed edges,
// endpoint compatibility, positive local degrees.
MapCheck is_graph_map(const EmbeddedGraph& g, const GraphMapRecord& m);

struct ExtensionCheck {
    bool ok = false;
    std::vector<std::pair<int, int>> overlapping_corners;  // corner id pairs
};

// Extension criterion: for each image vertex y and each face, the corners at
// preimages of y must map to ccw ranges at y with pairwise disjoint interiors.
ExtensionCheck check_regular_extension(const EmbeddedGraph& g, const GraphMapRecord& m);

// Subgraph spanned by a set of edges, with inherited rotation order.
struct Subgraph {
    EmbeddedGraph graph;
    std::vector<int> vertex_ids;  // new vertex index -> old vertex id
    std::vector<int> edge_ids;    // new edge index -> old edge id
};

Subgraph induced_edge_subgraph(const EmbeddedGraph& g, const std::vector<int>& edge_ids);

struct GraphEquivalence {
    std::vector<int> vertex_map;  // g1 vertex -> g2 vertex
    std::vector<int> dart_map;    // g1 dart -> g2 dart
    int edge_map(int e) const { return dart_map[2 * e] >> 1; }
};

// All orientation-preserving rotation-system isomorphisms g1 -> g2.
std::vector<GraphEquivalence> find_equivalences(const EmbeddedGraph& g1, const EmbeddedGraph& g2);

// As above, restricted to witnesses conjugating m1 to m2.
std::vector<GraphEquivalence> find_equivalences(const EmbeddedGraph& g1, const GraphMapRecord& m1,
                                                const EmbeddedGraph& g2, const GraphMapRecord& m2);

}  // namespace ng
