#pragma once
// Channel diagrams and their iterated pullbacks for postcritically fixed
// Newton maps, plus the combinatorial validators for the abstract versions.

#include <string>
#include <utility>
#include <vector>

#include "ng/dynamics.hpp"
#include "ng/planar_graph.hpp"

namespace ng {

// The union of all fixed internal rays, embedded as a planar graph.
// Vertex 0 is always the point at infinity; the roots follow in
// (re, im)-sorted order.  Edge e carries the geometry of rays[e].
struct ChannelDiagram {
    EmbeddedGraph graph;
    std::vector<RayPolyline> rays;
    int degree = 0;
    GraphMapRecord self_map;  // restriction of the map to the diagram
    std::vector<std::string> warnings;
};

ChannelDiagram build_channel_diagram(const RationalMap& f, const Tolerances& tol = {});

// One level of the pullback tower.  Graphs are cumulative: level n+1 keeps
// every vertex and edge id of level n and appends the new material, so
// map_to_previous is a self-map record of the cumulative graph whose edge
// images always live one level down.
struct NewtonGraphLevel {
    int n = 0;
    EmbeddedGraph graph;
    GraphMapRecord map_to_previous;
    bool contains_all_poles = false;
    bool contains_all_critical_points = false;

    // Pullback bookkeeping (not part of the mathematical record): edges
    // created in the latest round, and lifted arcs that are not yet
    // connected to infinity but may join at a later level.
    struct PendingLift {
        std::vector<Cx> curve;         // oriented to match the source edge
        int source_edge = -1;          // id if the source is in the graph
        int source_pending = -1;       // else index into the previous pool
        std::array<Cx, 2> end_pos{};   // landing positions (by source end)
        std::array<int, 2> end_mult{};
        std::array<VertexKind, 2> end_kind{};
        std::array<bool, 2> end_at_inf{};
        int depth = 0;
    };
    std::vector<int> frontier;
    std::vector<PendingLift> pool;
};

NewtonGraphLevel initial_level(const ChannelDiagram& cd, const RationalMap& f,
                               const Tolerances& tol = {});
NewtonGraphLevel pull_back(const RationalMap& f, const NewtonGraphLevel& level,
                           const Tolerances& tol = {});

struct NewtonGraphResult {
    int N = 0;                            // levels.back().n
    std::vector<NewtonGraphLevel> levels; // levels 0..N
    ChannelDiagram diagram;
};

// Pulls back the channel diagram until every critical point is a vertex,
// then once more; verifies the count against the combinatorial minimal
// level of the resulting graph map.
NewtonGraphResult newton_graph_level(const RationalMap& f, int max_n = 8,
                                     const Tolerances& tol = {});

// First level whose graph contains every pole of f.
int poles_connect_level(const RationalMap& f, int max_n = 8, const Tolerances& tol = {});

struct ConditionVerdict {
    bool pass = false;
    std::string evidence;
};

struct ValidationReport {
    std::vector<std::pair<std::string, ConditionVerdict>> verdicts;
    bool overall = false;
};

// Checks the four defining conditions of an abstract channel diagram.
// v0 < 0 picks the hub automatically (the unique Infinity-kind vertex if
// present, else the lowest-id vertex incident to every edge).
ValidationReport validate_abstract_channel_diagram(const EmbeddedGraph& g, int v0 = -1);

// Checks the seven defining conditions of an abstract Newton graph (g, m).
ValidationReport validate_abstract_newton_graph(const EmbeddedGraph& g, const GraphMapRecord& m);

// Point location against the channel diagram: face id per query point,
// or -1 when the point sits within tol.ray_tube of the boundary.  Faces are
// closed off at infinity by circular arcs following the rotation there.
std::vector<int> locate_in_channel_faces(const ChannelDiagram& cd, const std::vector<Cx>& pts,
                                         const Tolerances& tol = {});

// Per-face census of the channel diagram: total pole multiplicity inside
// versus fixed points on the boundary.
struct FaceCensus {
    int pole_weight = 0;     // sum of pole orders strictly inside
    int boundary_fixed = 0;  // distinct finite vertices on the face boundary
};
std::vector<FaceCensus> channel_face_census(const ChannelDiagram& cd, const RationalMap& f,
                                            const Tolerances& tol = {});

// True when every channel face contains a pole vertex of the first pullback
// level whose graph degree is at least two (a shared basin-boundary access).
bool shared_pole_witness(const ChannelDiagram& cd, const NewtonGraphLevel& level1,
                         const RationalMap& f, const Tolerances& tol = {});

}  // namespace ng
