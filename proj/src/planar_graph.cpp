#include "ng/planar_graph.hpp"

#include <algorithm>
#include <queue>

namespace ng {

bool EmbeddedGraph::is_connected() const {
    if (vertices.empty()) return false;
    std::vector<char> seen(vertices.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int d : rotation[v]) {
            int w = target(d);
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                q.push(w);
            }
        }
    }
    return reached == vertex_count();
}

void EmbeddedGraph::validate() const {
    if (vertices.empty()) throw graph_error("graph has no vertices");
    if (rotation.size() != vertices.size())
        throw graph_error("rotation table size does not match vertex count");
    for (const EdgeRecord& e : edges)
        for (int s : {0, 1})
            if (e.v[s] < 0 || e.v[s] >= vertex_count())
                throw graph_error("edge endpoint out of range");
    std::vector<int> seen(dart_count(), 0);
    for (int v = 0; v < vertex_count(); ++v) {
        for (int d : rotation[v]) {
            if (d < 0 || d >= dart_count()) throw graph_error("rotation holds an unknown dart");
            if (origin(d) != v) throw graph_error("dart listed away from its origin vertex");
            if (seen[d]++) throw graph_error("dart appears in two rotation slots");
        }
    }
    for (int d = 0; d < dart_count(); ++d)
        if (!seen[d]) throw graph_error("dart missing from the rotation system");
    if (!is_connected()) throw graph_error("graph is not connected");
}

DartCycles::DartCycles(const EmbeddedGraph& g) : g_(&g), slot_(g.dart_count(), -1) {
    for (int v = 0; v < g.vertex_count(); ++v)
        for (size_t i = 0; i < g.rotation[v].size(); ++i)
            slot_[g.rotation[v][i]] = static_cast<int>(i);
}

int DartCycles::next_at_vertex(int d) const {
    const auto& rot = g_->rotation[g_->origin(d)];
    return rot[(slot_[d] + 1) % rot.size()];
}

int DartCycles::prev_at_vertex(int d) const {
    const auto& rot = g_->rotation[g_->origin(d)];
    return rot[(slot_[d] + rot.size() - 1) % rot.size()];
}

FaceSet trace_faces(const EmbeddedGraph& g) {
    g.validate();
    DartCycles cyc(g);
    FaceSet out;
    out.face_of_dart.assign(g.dart_count(), -1);
    for (int d0 = 0; d0 < g.dart_count(); ++d0) {
        if (out.face_of_dart[d0] >= 0) continue;
        int id = out.count();
        std::vector<int> orbit;
        int d = d0;
        do {
            out.face_of_dart[d] = id;
            orbit.push_back(d);
            d = cyc.next_in_face(d);
        } while (d != d0);
        out.faces.push_back(std::move(orbit));
    }
    int euler = g.vertex_count() - g.edge_count() + out.count();
    if (g.edge_count() > 0 && euler != 2)
        throw graph_error("rotation system is not a sphere embedding");
    return out;
}

std::vector<int> corner_owner_faces(const EmbeddedGraph& g) {
    FaceSet f = trace_faces(g);
    DartCycles cyc(g);
    std::vector<int> owner(g.dart_count(), -1);
    for (int d = 0; d < g.dart_count(); ++d) owner[d] = f.face_of_dart[cyc.next_at_vertex(d)];
    return owner;
}

GraphMapRecord identity_map(const EmbeddedGraph& g) {
    GraphMapRecord m;
    m.vertex_image.resize(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) m.vertex_image[v] = v;
    m.edge_image_dart.resize(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) m.edge_image_dart[e] = 2 * e;
    m.local_degree.assign(g.vertex_count(), 1);
    return m;
}

MapCheck is_graph_map(const EmbeddedGraph& g, const GraphMapRecord& m) {
    MapCheck r;
    auto fail = [&](std::string s) { r.problems.push_back(std::move(s)); };
    if (static_cast<int>(m.vertex_image.size()) != g.vertex_count())
        fail("vertex image table has the wrong size");
    if (static_cast<int>(m.edge_image_dart.size()) != g.edge_count())
        fail("edge image table has the wrong size");
    if (static_cast<int>(m.local_degree.size()) != g.vertex_count())
        fail("local degree table has the wrong size");
    if (!r.problems.empty()) return r;

    for (int v = 0; v < g.vertex_count(); ++v) {
        if (m.vertex_image[v] < 0 || m.vertex_image[v] >= g.vertex_count())
            fail("vertex " + std::to_string(v) + " has no image vertex");
        if (m.local_degree[v] < 1)
            fail("vertex " + std::to_string(v) + " has local degree below 1");
    }
    for (int e = 0; e < g.edge_count(); ++e) {
        int bd = m.edge_image_dart[e];
        if (bd < 0) {
            fail("edge " + std::to_string(e) + " collapses to a vertex");
            continue;
        }
        if (bd >= g.dart_count()) {
            fail("edge " + std::to_string(e) + " maps outside the graph");
            continue;
        }
        for (int s : {0, 1}) {
            int d = 2 * e + s;
            if (g.origin(m.dart_image(d)) != m.vertex_image[g.origin(d)])
                fail("edge " + std::to_string(e) + " end " + std::to_string(s) +
                     " lands away from the image of its endpoint");
        }
    }
    r.ok = r.problems.empty();
    return r;
}

namespace {

// Corner d covers, at y = image of its vertex, the ccw slot range starting at
// the image dart and spanning w slots; coincident image darts mean a full turn.
struct CornerRange {
    int corner;
    int start;
    int width;
};

}  // namespace

ExtensionCheck check_regular_extension(const EmbeddedGraph& g, const GraphMapRecord& m) {
    MapCheck mc = is_graph_map(g, m);
    if (!mc.ok) throw graph_error("regular extension check needs a valid graph map");
    DartCycles cyc(g);
    std::vector<int> owner = corner_owner_faces(g);
    FaceSet faceset = trace_faces(g);

    ExtensionCheck out;
    out.ok = true;
    // group corners by (image vertex, owning face)
    std::vector<std::vector<std::vector<CornerRange>>> groups(
        g.vertex_count(), std::vector<std::vector<CornerRange>>(faceset.count()));
    for (int d = 0; d < g.dart_count(); ++d) {
        int y = m.vertex_image[g.origin(d)];
        int D = g.degree(y);
        int a = cyc.slot(m.dart_image(d));
        int b = cyc.slot(m.dart_image(cyc.next_at_vertex(d)));
        int w = (b - a) % D;
        if (w <= 0) w += D;  // base 0 is a full turn
        groups[y][owner[d]].push_back({d, a, w});
    }
    for (int y = 0; y < g.vertex_count(); ++y) {
        int D = g.degree(y);
        for (const auto& grp : groups[y]) {
            for (size_t i = 0; i < grp.size(); ++i) {
                for (size_t j = i + 1; j < grp.size(); ++j) {
                    // circular half-open interval intersection on D slots
                    int s1 = grp[i].start, w1 = grp[i].width;
                    int s2 = grp[j].start, w2 = grp[j].width;
                    int rel = (s2 - s1) % D;
                    if (rel < 0) rel += D;
                    bool disjoint = (w1 <= rel) && (rel + w2 <= D);
                    if (!disjoint) {
                        out.ok = false;
                        out.overlapping_corners.push_back({grp[i].corner, grp[j].corner});
                    }
                }
            }
        }
    }
    return out;
}

namespace {

// Extend dart1 -> dart2 to a full isomorphism by closing under twin and the
// rotation successor; a planar map is rigid once one dart image is fixed.
bool propagate(const EmbeddedGraph& g1, const DartCycles& c1, const EmbeddedGraph& g2,
               const DartCycles& c2, int d1, int d2, GraphEquivalence& out) {
    int n = g1.dart_count();
    std::vector<int> h(n, -1), used(n, 0);
    std::queue<int> q;
    auto assign = [&](int a, int b) {
        if (h[a] >= 0) return h[a] == b;
        if (used[b]) return false;
        h[a] = b;
        used[b] = 1;
        q.push(a);
        return true;
    };
    if (!assign(d1, d2)) return false;
    while (!q.empty()) {
        int a = q.front();
        q.pop();
        if (!assign(EmbeddedGraph::twin(a), EmbeddedGraph::twin(h[a]))) return false;
        if (!assign(c1.next_at_vertex(a), c2.next_at_vertex(h[a]))) return false;
    }
    for (int a = 0; a < n; ++a)
        if (h[a] < 0) return false;  // cannot happen on connected graphs

    out.dart_map = h;
    out.vertex_map.assign(g1.vertex_count(), -1);
    for (int a = 0; a < n; ++a) {
        int v = g1.origin(a), w = g2.origin(h[a]);
        if (out.vertex_map[v] >= 0 && out.vertex_map[v] != w) return false;
        out.vertex_map[v] = w;
    }
    for (int v = 0; v < g1.vertex_count(); ++v)
        if (out.vertex_map[v] < 0) return false;  // isolated vertices unsupported
    std::vector<int> hit(g2.vertex_count(), 0);
    for (int v : out.vertex_map)
        if (hit[v]++) return false;
    return true;
}

}  // namespace

Subgraph induced_edge_subgraph(const EmbeddedGraph& g, const std::vector<int>& edge_ids) {
    Subgraph out;
    std::vector<char> keep(g.edge_count(), 0);
    for (int e : edge_ids) {
        if (e < 0 || e >= g.edge_count()) throw graph_error("subgraph edge id out of range");
        keep[e] = 1;
    }
    std::vector<int> vmap(g.vertex_count(), -1);
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!keep[e]) continue;
        for (int end = 0; end < 2; ++end) {
            int v = g.edges[e].v[end];
            if (vmap[v] < 0) {
                vmap[v] = (int)out.vertex_ids.size();
                out.vertex_ids.push_back(v);
            }
        }
    }
    out.graph.vertices.reserve(out.vertex_ids.size());
    for (int v : out.vertex_ids) out.graph.vertices.push_back(g.vertices[v]);
    std::vector<int> emap(g.edge_count(), -1);
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!keep[e]) continue;
        emap[e] = (int)out.edge_ids.size();
        out.edge_ids.push_back(e);
        EdgeRecord rec = g.edges[e];
        rec.v = {vmap[rec.v[0]], vmap[rec.v[1]]};
        out.graph.edges.push_back(std::move(rec));
    }
    out.graph.rotation.resize(out.vertex_ids.size());
    for (int i = 0; i < (int)out.vertex_ids.size(); ++i) {
        for (int d : g.rotation[out.vertex_ids[i]]) {
            if (!keep[d >> 1]) continue;
            out.graph.rotation[i].push_back(2 * emap[d >> 1] + (d & 1));
        }
    }
    return out;
}

std::vector<GraphEquivalence> find_equivalences(const EmbeddedGraph& g1, const EmbeddedGraph& g2) {
    g1.validate();
    g2.validate();
    std::vector<GraphEquivalence> out;
    if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) return out;
    if (g1.edge_count() == 0) {
        if (g1.vertex_count() == 1) out.push_back({{0}, {}});
        return out;
    }
    DartCycles c1(g1), c2(g2);
    int d1 = 0;
    int deg1 = g1.degree(g1.origin(d1));
    for (int d2 = 0; d2 < g2.dart_count(); ++d2) {
        if (g2.degree(g2.origin(d2)) != deg1) continue;
        GraphEquivalence w;
        if (propagate(g1, c1, g2, c2, d1, d2, w)) out.push_back(std::move(w));
    }
    return out;
}

std::vector<GraphEquivalence> find_equivalences(const EmbeddedGraph& g1, const GraphMapRecord& m1,
                                                const EmbeddedGraph& g2, const GraphMapRecord& m2) {
    std::vector<GraphEquivalence> all = find_equivalences(g1, g2);
    std::vector<GraphEquivalence> out;
    for (GraphEquivalence& w : all) {
        bool ok = true;
        for (int v = 0; v < g1.vertex_count() && ok; ++v) {
            ok = w.vertex_map[m1.vertex_image[v]] == m2.vertex_image[w.vertex_map[v]] &&
                 m1.local_degree[v] == m2.local_degree[w.vertex_map[v]];
        }
        for (int d = 0; d < g1.dart_count() && ok; ++d)
            ok = w.dart_map[m1.dart_image(d)] == m2.dart_image(w.dart_map[d]);
        if (ok) out.push_back(std::move(w));
    }
    return out;
}

}  // namespace ng
