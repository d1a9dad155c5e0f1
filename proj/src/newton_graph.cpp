#include "ng/newton_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace ng {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double rel_scale(Cx z) { return 1.0 + std::abs(z); }

double point_segment_dist(Cx p, Cx a, Cx b) {
    Cx ab = b - a;
    double n2 = std::norm(ab);
    if (n2 == 0.0) return std::abs(p - a);
    double t = ((p - a) * std::conj(ab)).real() / n2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

double point_polyline_dist(Cx p, const std::vector<Cx>& poly) {
    double best = std::abs(p - poly.front());
    for (size_t i = 0; i + 1 < poly.size(); ++i)
        best = std::min(best, point_segment_dist(p, poly[i], poly[i + 1]));
    return best;
}

// Direction in which the curve leaves vertex v.  Points closer than a scale
// floor are skipped: the innermost samples sit at roundoff distance and
// carry no angular information.
double departure_angle(const std::vector<Cx>& pts, bool from_front, Cx v) {
    double floor_d = 1e-3 * rel_scale(v);
    int n = (int)pts.size();
    Cx pick = from_front ? pts[n - 1] : pts[0];
    for (int i = 0; i < n; ++i) {
        Cx p = from_front ? pts[i] : pts[n - 1 - i];
        if (std::abs(p - v) >= floor_d) {
            pick = p;
            break;
        }
    }
    return std::arg(pick - v);
}

double dart_angle(const EmbeddedGraph& g, int d) {
    const EdgeRecord& e = g.edges[d >> 1];
    const VertexRecord& vr = g.vertices[g.origin(d)];
    bool from_front = (d & 1) == 0;
    if (vr.kind == VertexKind::Infinity) {
        Cx far = from_front ? e.geometry.front() : e.geometry.back();
        return std::arg(far);
    }
    return departure_angle(e.geometry, from_front, vr.pos->z);
}

// Rebuild every rotation list from edge geometry: counterclockwise by
// departure angle at finite vertices, clockwise in the plane at infinity
// (which is counterclockwise in the 1/z chart).  Near-ties are ordered by
// dart id; suspiciously small gaps at infinity are reported as warnings.
void rebuild_rotation(EmbeddedGraph& g, const Tolerances& tol, std::vector<std::string>* warnings) {
    int nv = g.vertex_count();
    g.rotation.assign(nv, {});
    std::vector<std::vector<std::pair<double, int>>> at(nv);
    for (int d = 0; d < g.dart_count(); ++d) at[g.origin(d)].emplace_back(dart_angle(g, d), d);
    for (int v = 0; v < nv; ++v) {
        auto& lst = at[v];
        if (lst.empty()) continue;
        bool inf = g.vertices[v].kind == VertexKind::Infinity;
        std::sort(lst.begin(), lst.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return inf ? a.first > b.first : a.first < b.first;
            return a.second < b.second;
        });
        for (size_t i = 0; i < lst.size();) {
            size_t j = i + 1;
            while (j < lst.size() && std::abs(lst[j].first - lst[j - 1].first) <= tol.angle_tie) ++j;
            if (j - i > 1)
                std::sort(lst.begin() + i, lst.begin() + j,
                          [](const auto& a, const auto& b) { return a.second < b.second; });
            i = j;
        }
        if (inf && warnings && lst.size() > 1) {
            for (size_t i = 0; i < lst.size(); ++i) {
                double gap = std::abs(lst[i].first - lst[(i + 1) % lst.size()].first);
                gap = std::min(gap, kTwoPi - gap);
                if (gap < tol.angle_tie_inf) {
                    std::ostringstream os;
                    os << "angular gap " << gap << " between edges " << (lst[i].second >> 1)
                       << " and " << (lst[(i + 1) % lst.size()].second >> 1) << " at infinity";
                    warnings->push_back(os.str());
                }
            }
        }
        std::vector<int> rot;
        rot.reserve(lst.size());
        for (auto& pr : lst) rot.push_back(pr.second);
        std::rotate(rot.begin(), std::min_element(rot.begin(), rot.end()), rot.end());
        g.rotation[v] = std::move(rot);
    }
}

std::vector<Cx> finite_critical_positions(const RationalMap& f, const Tolerances& tol) {
    std::vector<Cx> out;
    for (const CriticalPointRecord& c : critical_points(f, 256, tol))
        if (!c.location.at_inf) out.push_back(c.location.z);
    return out;
}

bool covers_points(const EmbeddedGraph& g, const std::vector<Cx>& pts, double merge_tol) {
    for (const Cx& p : pts) {
        bool hit = false;
        for (const VertexRecord& v : g.vertices) {
            if (!v.pos || v.pos->at_inf) continue;
            if (std::abs(v.pos->z - p) <= merge_tol * rel_scale(p)) {
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

int find_vertex_at(const EmbeddedGraph& g, Cx p, double merge_tol) {
    for (int v = 0; v < g.vertex_count(); ++v) {
        const VertexRecord& vr = g.vertices[v];
        if (!vr.pos || vr.pos->at_inf) continue;
        if (std::abs(vr.pos->z - p) <= merge_tol * rel_scale(p)) return v;
    }
    return -1;
}

int infinity_vertex(const EmbeddedGraph& g) {
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.vertices[v].kind == VertexKind::Infinity) return v;
    throw graph_error("graph has no vertex at infinity");
}

VertexKind preimage_kind(VertexKind image) {
    switch (image) {
        case VertexKind::Infinity: return VertexKind::Pole;
        case VertexKind::Pole:
        case VertexKind::Prepole: return VertexKind::Prepole;
        default: return VertexKind::RootPreimage;
    }
}

}  // namespace

ChannelDiagram build_channel_diagram(const RationalMap& f, const Tolerances& tol) {
    NewtonVerdict nv = is_newton_map(f, tol);
    if (!nv.ok) throw not_newton_error("channel diagram needs a Newton map: " + nv.reason);

    ChannelDiagram cd;
    cd.degree = f.degree();

    std::vector<FixedPointRecord> fixed = classify_fixed_points(f, tol);
    std::vector<Cx> roots;
    for (const FixedPointRecord& r : fixed) {
        if (r.location.at_inf) continue;
        if (r.kind != FixedKind::Superattracting)
            throw invalid_spec_error(
                "fixed internal rays are only traced at superattracting fixed points; "
                "the map has a multiple root");
        roots.push_back(r.location.z);
    }
    if (roots.empty()) throw not_newton_error("no finite fixed points");

    cd.graph.vertices.push_back({VertexKind::Infinity, SpherePoint::infinity(), 0});
    for (const Cx& r : roots) cd.graph.vertices.push_back({VertexKind::Root, SpherePoint::finite(r), 0});

    cd.self_map.vertex_image.assign(cd.graph.vertex_count(), 0);
    cd.self_map.local_degree.assign(cd.graph.vertex_count(), 1);
    for (int v = 0; v < cd.graph.vertex_count(); ++v) cd.self_map.vertex_image[v] = v;

    for (int i = 0; i < (int)roots.size(); ++i) {
        PreimageSet pre = preimages(f, SpherePoint::finite(roots[i]), tol.merge_tol);
        int k = 0;
        for (const RootCluster& c : pre.finite)
            if (std::abs(c.center - roots[i]) <= tol.merge_tol * rel_scale(roots[i])) k = c.multiplicity;
        if (k < 2) throw numerical_error("local degree at a root could not be determined");
        cd.self_map.local_degree[1 + i] = k;
        for (int j = 0; j + 1 < k; ++j) {
            RayPolyline ray = trace_internal_ray(f, roots[i], k, j, 1e8, tol);
            ray.root_index = i;
            EdgeRecord e;
            e.v = {1 + i, 0};
            e.level = 0;
            e.geometry = ray.points;
            cd.graph.edges.push_back(std::move(e));
            cd.rays.push_back(std::move(ray));
        }
    }
    cd.self_map.edge_image_dart.resize(cd.graph.edge_count());
    for (int e = 0; e < cd.graph.edge_count(); ++e) cd.self_map.edge_image_dart[e] = 2 * e;

    rebuild_rotation(cd.graph, tol, &cd.warnings);
    cd.graph.validate();
    trace_faces(cd.graph);
    return cd;
}

NewtonGraphLevel initial_level(const ChannelDiagram& cd, const RationalMap& f, const Tolerances& tol) {
    NewtonGraphLevel lv;
    lv.n = 0;
    lv.graph = cd.graph;
    lv.map_to_previous = cd.self_map;
    std::vector<Cx> poles;
    for (const RootCluster& c : poles_of(f, tol.merge_tol)) poles.push_back(c.center);
    lv.contains_all_poles = covers_points(lv.graph, poles, tol.merge_tol);
    lv.contains_all_critical_points =
        covers_points(lv.graph, finite_critical_positions(f, tol), tol.merge_tol);
    lv.frontier.resize(lv.graph.edge_count());
    for (int e = 0; e < lv.graph.edge_count(); ++e) lv.frontier[e] = e;
    return lv;
}

namespace {

struct LiftSource {
    std::vector<Cx> curve;
    std::array<Cx, 2> end_pos{};
    std::array<bool, 2> end_at_inf{};
    std::array<VertexKind, 2> end_kind{};
    int graph_edge = -1;    // source edge id when it lives in the graph
    int pool_index = -1;    // else index into the incoming pool
};

// Landing data for one end of a lifted curve.
struct Landing {
    Cx pos{};
    bool at_inf = false;
    int mult = 1;
};

Landing resolve_landing(const PreimageSet& pre, Cx tail, bool huge_tail) {
    Landing out;
    if (huge_tail) {
        out.at_inf = true;
        return out;
    }
    double best = -1.0;
    for (const RootCluster& c : pre.finite) {
        double d = std::abs(tail - c.center);
        if (best < 0.0 || d < best) {
            best = d;
            out.pos = c.center;
            out.mult = c.multiplicity;
        }
    }
    if (best < 0.0 || best > 0.1 * rel_scale(out.pos))
        throw pullback_error("lifted edge endpoint did not resolve to a preimage");
    return out;
}

}  // namespace

NewtonGraphLevel pull_back(const RationalMap& f, const NewtonGraphLevel& level, const Tolerances& tol) {
    const int d = f.degree();
    const int round = level.n + 1;
    NewtonGraphLevel out;
    out.n = round;
    out.graph = level.graph;
    out.map_to_previous = level.map_to_previous;

    EmbeddedGraph& g = out.graph;
    GraphMapRecord& m = out.map_to_previous;
    const int inf_id = infinity_vertex(g);

    // Sources for this round: edges created last round, plus pooled lifts of
    // the same depth (they get pulled back whether or not they are attached).
    std::vector<LiftSource> sources;
    for (int e : level.frontier) {
        LiftSource s;
        s.curve = g.edges[e].geometry;
        s.graph_edge = e;
        for (int end = 0; end < 2; ++end) {
            const VertexRecord& vr = g.vertices[g.edges[e].v[end]];
            s.end_at_inf[end] = vr.kind == VertexKind::Infinity;
            s.end_kind[end] = vr.kind;
            if (!s.end_at_inf[end]) s.end_pos[end] = vr.pos->z;
        }
        sources.push_back(std::move(s));
    }
    for (int i = 0; i < (int)level.pool.size(); ++i) {
        const auto& p = level.pool[i];
        if (p.depth != level.n) continue;
        LiftSource s;
        s.curve = p.curve;
        s.pool_index = i;
        s.end_pos = p.end_pos;
        s.end_at_inf = p.end_at_inf;
        s.end_kind = p.end_kind;
        sources.push_back(std::move(s));
    }

    // Preimage sets are shared between edges ending at the same point.
    std::map<std::pair<double, double>, PreimageSet> finite_pre;
    PreimageSet inf_pre;
    bool have_inf_pre = false;
    auto preimage_of_end = [&](const LiftSource& s, int end) -> const PreimageSet& {
        if (s.end_at_inf[end]) {
            if (!have_inf_pre) {
                inf_pre = preimages(f, SpherePoint::infinity(), tol.merge_tol);
                have_inf_pre = true;
            }
            return inf_pre;
        }
        Cx p = s.end_pos[end];
        auto key = std::make_pair(p.real(), p.imag());
        auto it = finite_pre.find(key);
        if (it == finite_pre.end())
            it = finite_pre.emplace(key, preimages(f, SpherePoint::finite(p), tol.merge_tol)).first;
        return it->second;
    };

    // Lift every source through all d branches.
    std::vector<NewtonGraphLevel::PendingLift> items = level.pool;
    std::vector<char> item_is_new(items.size(), 0);
    for (const LiftSource& s : sources) {
        const std::vector<Cx>& c = s.curve;
        if (c.size() < 3) throw pullback_error("edge geometry too short to lift");
        int lo = 0, hi = (int)c.size() - 1;
        if (!s.end_at_inf[0] && std::abs(c[lo] - s.end_pos[0]) <= 1e-9 * rel_scale(s.end_pos[0])) ++lo;
        if (!s.end_at_inf[1] && std::abs(c[hi] - s.end_pos[1]) <= 1e-9 * rel_scale(s.end_pos[1])) --hi;
        int mid = (lo + hi) / 2;

        PreimageSet base = preimages(f, SpherePoint::finite(c[mid]), tol.merge_tol);
        std::ostringstream where;
        where << "edge " << (s.graph_edge >= 0 ? s.graph_edge : -1 - s.pool_index) << " at level "
              << level.n;
        if (base.infinity_degree > 0)
            throw pullback_error(where.str() + ": interior sample has a preimage at infinity");
        if ((int)base.finite.size() != d)
            throw pullback_error(where.str() + ": interior sample meets a critical value");
        std::vector<Cx> starts;
        for (const RootCluster& cl : base.finite) starts.push_back(cl.center);
        std::sort(starts.begin(), starts.end(), [](Cx a, Cx b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });

        std::vector<Cx> half_a(c.rend() - mid - 1, c.rend() - lo);  // c[mid] down to c[lo]
        std::vector<Cx> half_b(c.begin() + mid, c.begin() + hi + 1);

        for (const Cx& w : starts) {
            std::vector<Cx> la, lb;
            try {
                la = lift_curve(f, half_a, w, tol);
                lb = lift_curve(f, half_b, w, tol);
            } catch (const lift_error& ex) {
                throw pullback_error(where.str() + ": " + ex.what());
            }
            std::vector<Cx> curve(la.rbegin(), la.rend());
            curve.insert(curve.end(), lb.begin() + 1, lb.end());

            NewtonGraphLevel::PendingLift cand;
            cand.curve = std::move(curve);
            cand.source_edge = s.graph_edge;
            cand.source_pending = s.pool_index;
            cand.depth = round;
            for (int end = 0; end < 2; ++end) {
                Cx tail = end == 0 ? cand.curve.front() : cand.curve.back();
                bool huge = s.end_at_inf[end] && std::abs(tail) >= 1e5;
                Landing l = resolve_landing(preimage_of_end(s, end), tail, huge);
                cand.end_pos[end] = l.pos;
                cand.end_at_inf[end] = l.at_inf;
                cand.end_mult[end] = l.mult;
                cand.end_kind[end] =
                    l.at_inf ? VertexKind::Infinity : preimage_kind(s.end_kind[end]);
            }

            // A branch can reproduce an existing edge (an invariant ray is its
            // own lift); recognise it by endpoints plus geometric proximity.
            bool dup = false;
            for (int e = 0; e < g.edge_count() && !dup; ++e) {
                if (s.graph_edge < 0 || (m.edge_image_dart[e] >> 1) != s.graph_edge) continue;
                bool ends_match = true;
                for (int end = 0; end < 2 && ends_match; ++end) {
                    const VertexRecord& vr = g.vertices[g.edges[e].v[end]];
                    if (cand.end_at_inf[end] != (vr.kind == VertexKind::Infinity)) ends_match = false;
                    else if (!cand.end_at_inf[end] &&
                             std::abs(vr.pos->z - cand.end_pos[end]) >
                                 tol.merge_tol * rel_scale(cand.end_pos[end]) * 10.0)
                        ends_match = false;
                }
                if (!ends_match) continue;
                size_t n = cand.curve.size();
                bool close = true;
                for (size_t q = 1; q <= 3 && close; ++q) {
                    Cx p = cand.curve[q * n / 4];
                    close = point_polyline_dist(p, g.edges[e].geometry) <= 1e-5 * rel_scale(p);
                }
                dup = close;
            }
            if (!dup) {
                items.push_back(std::move(cand));
                item_is_new.push_back(1);
            }
        }
    }

    // Connectivity pass: an item is attached once either endpoint reaches the
    // component of infinity, through the graph or through other items.
    int n_items = (int)items.size();
    std::vector<std::array<int, 2>> node(n_items);  // >=0 graph vertex, <0 synthetic
    std::vector<std::pair<Cx, int>> synth;          // position -> synthetic id
    for (int i = 0; i < n_items; ++i) {
        for (int end = 0; end < 2; ++end) {
            if (items[i].end_at_inf[end]) {
                node[i][end] = inf_id;
                continue;
            }
            Cx p = items[i].end_pos[end];
            int v = find_vertex_at(g, p, tol.merge_tol);
            if (v >= 0) {
                node[i][end] = v;
                continue;
            }
            int sid = -1;
            for (auto& [q, id] : synth)
                if (std::abs(q - p) <= tol.merge_tol * rel_scale(p)) {
                    sid = id;
                    break;
                }
            if (sid < 0) {
                sid = (int)synth.size();
                synth.emplace_back(p, sid);
            }
            node[i][end] = -1 - sid;
        }
    }
    std::vector<char> synth_reach(synth.size(), 0);
    std::vector<char> accepted(n_items, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n_items; ++i) {
            if (accepted[i]) continue;
            bool touch = false;
            for (int end = 0; end < 2; ++end)
                touch = touch || node[i][end] >= 0 || synth_reach[-1 - node[i][end]];
            if (!touch) continue;
            accepted[i] = 1;
            changed = true;
            for (int end = 0; end < 2; ++end)
                if (node[i][end] < 0) synth_reach[-1 - node[i][end]] = 1;
        }
    }

    // Materialise accepted items in creation order (parents precede children).
    std::vector<int> made_edge(n_items, -1);
    for (int i = 0; i < n_items; ++i) {
        if (!accepted[i]) continue;
        NewtonGraphLevel::PendingLift& it = items[i];
        int img_edge;
        std::array<int, 2> img_v{};
        if (it.source_edge >= 0) {
            img_edge = it.source_edge;
            img_v = g.edges[img_edge].v;
        } else {
            int parent = made_edge[it.source_pending];
            if (parent < 0) throw pullback_error("pullback acceptance out of order");
            img_edge = parent;
            img_v = g.edges[parent].v;
        }
        std::array<int, 2> vid{};
        for (int end = 0; end < 2; ++end) {
            if (it.end_at_inf[end]) {
                vid[end] = inf_id;
            } else {
                int v = find_vertex_at(g, it.end_pos[end], tol.merge_tol);
                if (v < 0) {
                    v = g.vertex_count();
                    g.vertices.push_back(
                        {it.end_kind[end], SpherePoint::finite(it.end_pos[end]), round});
                    m.vertex_image.push_back(img_v[end]);
                    m.local_degree.push_back(it.end_mult[end]);
                }
                vid[end] = v;
            }
            if (m.vertex_image[vid[end]] != img_v[end])
                throw pullback_error("lifted endpoint conflicts with an existing vertex image");
        }
        EdgeRecord e;
        e.v = vid;
        e.level = round;
        e.geometry = std::move(it.curve);
        int eid = g.edge_count();
        g.edges.push_back(std::move(e));
        m.edge_image_dart.push_back(2 * img_edge);
        made_edge[i] = eid;
        if (item_is_new[i]) out.frontier.push_back(eid);
    }

    // Unattached items stay pooled; rewire parent references to the new
    // indices (or to materialised edges).
    std::vector<int> pool_slot(n_items, -1);
    for (int i = 0; i < n_items; ++i) {
        if (accepted[i]) continue;
        pool_slot[i] = (int)out.pool.size();
        out.pool.push_back(items[i]);
    }
    for (auto& p : out.pool) {
        if (p.source_pending < 0) continue;
        if (made_edge[p.source_pending] >= 0) {
            p.source_edge = made_edge[p.source_pending];
            p.source_pending = -1;
        } else {
            p.source_pending = pool_slot[p.source_pending];
        }
    }

    std::vector<std::string> warnings;
    rebuild_rotation(g, tol, &warnings);
    g.validate();
    trace_faces(g);

    std::vector<Cx> poles;
    for (const RootCluster& c : poles_of(f, tol.merge_tol)) poles.push_back(c.center);
    out.contains_all_poles = covers_points(g, poles, tol.merge_tol);
    out.contains_all_critical_points =
        covers_points(g, finite_critical_positions(f, tol), tol.merge_tol);
    return out;
}

namespace {

// Minimal iterate after which every edge sits in the fixed subgraph, derived
// purely from the graph map (entry times of critical vertices plus one).
// Returns -1 when some orbit never enters.
int combinatorial_level(const EmbeddedGraph& g, const GraphMapRecord& m) {
    std::vector<char> fixed_edge(g.edge_count(), 0);
    for (int e = 0; e < g.edge_count(); ++e) fixed_edge[e] = m.edge_image_dart[e] == 2 * e;
    std::vector<char> fixed_vertex(g.vertex_count(), 0);
    for (int e = 0; e < g.edge_count(); ++e)
        if (fixed_edge[e]) fixed_vertex[g.edges[e].v[0]] = fixed_vertex[g.edges[e].v[1]] = 1;

    int worst = -1;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (m.local_degree[v] <= 1) continue;
        int x = v, t = 0;
        while (t <= g.vertex_count() && !fixed_vertex[x]) {
            x = m.vertex_image[x];
            ++t;
        }
        if (!fixed_vertex[x]) return -1;
        worst = std::max(worst, t);
    }
    if (worst < 0) return -1;

    int level = worst + 1;
    for (int e = 0; e < g.edge_count(); ++e) {
        int x = e, t = 0;
        while (t <= g.edge_count() && !fixed_edge[x]) {
            x = m.edge_image_dart[x] >> 1;
            ++t;
        }
        if (!fixed_edge[x] || t > level) return -1;
    }
    return level;
}

}  // namespace

NewtonGraphResult newton_graph_level(const RationalMap& f, int max_n, const Tolerances& tol) {
    PcfReport pcf = is_postcritically_fixed(f, 256, tol);
    if (!pcf.postcritically_fixed)
        throw invalid_spec_error("graph construction needs a postcritically fixed map");

    NewtonGraphResult res;
    res.diagram = build_channel_diagram(f, tol);
    res.levels.push_back(initial_level(res.diagram, f, tol));

    int base = -1;
    for (int n = 0;; ++n) {
        if (n > 0) res.levels.push_back(pull_back(f, res.levels.back(), tol));
        if (res.levels[n].contains_all_critical_points) {
            base = n;
            break;
        }
        if (n == max_n)
            throw pullback_error("critical points not captured within the level cap");
    }
    res.N = base + 1;
    if (res.N > max_n) throw pullback_error("level cap too small for the final pullback");
    res.levels.push_back(pull_back(f, res.levels.back(), tol));

    const NewtonGraphLevel& top = res.levels.back();
    int ng = combinatorial_level(top.graph, top.map_to_previous);
    if (ng != res.N) {
        std::ostringstream os;
        os << "combinatorial level " << ng << " disagrees with the dynamical count " << res.N;
        throw numerical_error(os.str());
    }
    return res;
}

int poles_connect_level(const RationalMap& f, int max_n, const Tolerances& tol) {
    ChannelDiagram cd = build_channel_diagram(f, tol);
    NewtonGraphLevel lv = initial_level(cd, f, tol);
    for (int n = 0; n <= max_n; ++n) {
        if (lv.contains_all_poles) return n;
        if (n < max_n) lv = pull_back(f, lv, tol);
    }
    throw pullback_error("poles not captured within the level cap");
}

namespace {

int pick_hub(const EmbeddedGraph& g) {
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.vertices[v].kind == VertexKind::Infinity) return v;
    for (int v = 0; v < g.vertex_count(); ++v) {
        bool all = true;
        for (const EdgeRecord& e : g.edges)
            if (e.v[0] != v && e.v[1] != v) {
                all = false;
                break;
            }
        if (all) return v;
    }
    return 0;
}

}  // namespace

ValidationReport validate_abstract_channel_diagram(const EmbeddedGraph& g, int v0) {
    g.validate();
    ValidationReport rep;
    int n = g.vertex_count(), l = g.edge_count();
    int d = n - 1;
    if (v0 < 0) v0 = pick_hub(g);

    {
        ConditionVerdict c;
        c.pass = d >= 3 && l <= 2 * d - 2;
        std::ostringstream os;
        os << "degree " << d << ", " << l << " edges, bound " << (d >= 3 ? 2 * d - 2 : 0);
        c.evidence = os.str();
        rep.verdicts.emplace_back("edge-count-bound", c);
    }
    bool hub_ok = true;
    {
        ConditionVerdict c;
        c.pass = true;
        for (int e = 0; e < l; ++e) {
            auto [a, b] = std::pair{g.edges[e].v[0], g.edges[e].v[1]};
            if ((a == v0) == (b == v0)) {  // loop at hub, or edge missing it
                c.pass = false;
                std::ostringstream os;
                os << "edge " << e << " joins " << a << " and " << b << " (hub " << v0 << ")";
                c.evidence = os.str();
                break;
            }
        }
        if (c.pass) c.evidence = "every edge joins the hub to another vertex";
        hub_ok = c.pass;
        rep.verdicts.emplace_back("edges-join-hub", c);
    }
    {
        ConditionVerdict c;
        c.pass = true;
        for (int v = 0; v < n && c.pass; ++v) {
            if (v == v0) continue;
            bool linked = false;
            for (const EdgeRecord& e : g.edges)
                if ((e.v[0] == v0 && e.v[1] == v) || (e.v[1] == v0 && e.v[0] == v)) linked = true;
            if (!linked) {
                c.pass = false;
                std::ostringstream os;
                os << "vertex " << v << " has no edge to the hub";
                c.evidence = os.str();
            }
        }
        if (c.pass) c.evidence = "every other vertex reaches the hub";
        rep.verdicts.emplace_back("hub-connectivity", c);
    }
    {
        // Parallel edges cut the sphere in two; both open sides must hold a
        // vertex.  Every vertex hangs off the hub, so the sides are read off
        // the rotation there.
        ConditionVerdict c;
        c.pass = true;
        if (hub_ok) {
            const std::vector<int>& rot = g.rotation[v0];
            int deg = (int)rot.size();
            std::vector<int> slot_target(deg);
            for (int s = 0; s < deg; ++s) slot_target[s] = g.target(rot[s]);
            for (int s1 = 0; s1 < deg && c.pass; ++s1)
                for (int s2 = s1 + 1; s2 < deg && c.pass; ++s2) {
                    if (slot_target[s1] != slot_target[s2]) continue;
                    int vk = slot_target[s1];
                    bool side_a = false, side_b = false;
                    for (int s = (s1 + 1) % deg; s != s2; s = (s + 1) % deg)
                        if (slot_target[s] != vk) side_a = true;
                    for (int s = (s2 + 1) % deg; s != s1; s = (s + 1) % deg)
                        if (slot_target[s] != vk) side_b = true;
                    if (!side_a || !side_b) {
                        c.pass = false;
                        std::ostringstream os;
                        os << "edges " << (rot[s1] >> 1) << " and " << (rot[s2] >> 1)
                           << " bound a side without a vertex";
                        c.evidence = os.str();
                    }
                }
        }
        if (c.pass) c.evidence = "every pair of parallel edges separates vertices";
        rep.verdicts.emplace_back("parallel-edges-separate-vertices", c);
    }
    rep.overall = true;
    for (auto& [name, v] : rep.verdicts) rep.overall = rep.overall && v.pass;
    return rep;
}

ValidationReport validate_abstract_newton_graph(const EmbeddedGraph& g, const GraphMapRecord& m) {
    g.validate();
    MapCheck mc = is_graph_map(g, m);
    if (!mc.ok)
        throw graph_error("newton graph validation needs a graph map: " +
                          (mc.problems.empty() ? std::string("unknown") : mc.problems.front()));

    ValidationReport rep;
    std::vector<int> delta;
    for (int e = 0; e < g.edge_count(); ++e)
        if (m.edge_image_dart[e] == 2 * e) delta.push_back(e);
    std::vector<char> in_delta(g.edge_count(), 0);
    for (int e : delta) in_delta[e] = 1;
    std::vector<char> delta_vertex(g.vertex_count(), 0);
    for (int e : delta) delta_vertex[g.edges[e].v[0]] = delta_vertex[g.edges[e].v[1]] = 1;
    int n_delta_vertices = 0;
    for (char b : delta_vertex) n_delta_vertices += b;
    int d_gamma = n_delta_vertices - 1;

    int hub = -1;
    {
        ConditionVerdict c;
        std::ostringstream os;
        if (delta.empty()) {
            c.pass = false;
            os << "no fixed edges";
        } else if ((int)delta.size() == g.edge_count()) {
            c.pass = false;
            os << "every edge is fixed; the diagram must be a proper subgraph";
        } else {
            try {
                Subgraph sub = induced_edge_subgraph(g, delta);
                ValidationReport inner = validate_abstract_channel_diagram(sub.graph);
                c.pass = inner.overall;
                if (inner.overall) {
                    hub = sub.vertex_ids[pick_hub(sub.graph)];
                    os << "fixed subgraph: " << sub.graph.vertex_count() << " vertices, "
                       << sub.graph.edge_count() << " edges, degree " << d_gamma;
                } else {
                    for (auto& [nm, v] : inner.verdicts)
                        if (!v.pass) os << nm << ": " << v.evidence << "; ";
                }
            } catch (const graph_error& ex) {
                c.pass = false;
                os << ex.what();
            }
        }
        c.evidence = os.str();
        rep.verdicts.emplace_back("fixed-subgraph-is-channel-diagram", c);
    }
    {
        ConditionVerdict c;
        c.pass = hub >= 0;
        std::ostringstream os;
        for (int v = 0; v < g.vertex_count() && c.pass; ++v) {
            if (!delta_vertex[v]) continue;
            int fixed_here = 0, free_here = 0;
            for (int dart : g.rotation[v])
                (in_delta[dart >> 1] ? fixed_here : free_here)++;
            if (v == hub) {
                if (free_here != 0) {
                    c.pass = false;
                    os << "the hub touches " << free_here << " non-fixed edges";
                }
            } else {
                if (free_here == 0) {
                    c.pass = false;
                    os << "vertex " << v << " meets no non-fixed edge";
                } else if (fixed_here != m.local_degree[v] - 1 || fixed_here < 1) {
                    c.pass = false;
                    os << "vertex " << v << " has " << fixed_here
                       << " fixed edges but local degree " << m.local_degree[v];
                }
            }
        }
        if (c.pass) os << "channel vertices carry local degree minus one fixed edges";
        c.evidence = os.str();
        rep.verdicts.emplace_back("channel-vertices-touch-new-edges", c);
    }
    {
        ConditionVerdict c;
        int total = 0;
        for (int v = 0; v < g.vertex_count(); ++v) total += m.local_degree[v] - 1;
        c.pass = d_gamma >= 3 && total == 2 * d_gamma - 2;
        std::ostringstream os;
        os << "sum of (local degree - 1) = " << total << ", expected " << 2 * d_gamma - 2;
        c.evidence = os.str();
        rep.verdicts.emplace_back("critical-count", c);
    }
    int level = combinatorial_level(g, m);
    {
        ConditionVerdict c;
        c.pass = level >= 1;
        std::ostringstream os;
        if (c.pass)
            os << "graph reaches the fixed subgraph after " << level << " steps";
        else
            os << "some orbit never enters the fixed subgraph, or overshoots the critical bound";
        c.evidence = os.str();
        rep.verdicts.emplace_back("finite-level", c);
    }
    {
        ConditionVerdict c;
        std::vector<int> rest;
        for (int e = 0; e < g.edge_count(); ++e)
            if (!in_delta[e]) rest.push_back(e);
        if (rest.empty()) {
            c.pass = false;
            c.evidence = "no edges outside the fixed subgraph";
        } else {
            Subgraph sub = induced_edge_subgraph(g, rest);
            c.pass = sub.graph.is_connected();
            c.evidence = c.pass ? "complement closure is connected"
                                : "complement closure falls apart";
        }
        rep.verdicts.emplace_back("complement-connected", c);
    }
    {
        ConditionVerdict c;
        ExtensionCheck ext = check_regular_extension(g, m);
        c.pass = ext.ok;
        std::ostringstream os;
        if (ext.ok)
            os << "corner images are disjoint";
        else
            os << ext.overlapping_corners.size() << " overlapping corner pairs";
        c.evidence = os.str();
        rep.verdicts.emplace_back("regular-extension", c);
    }
    {
        // The graph must exhaust the component of the pullback: each vertex of
        // local degree k carries exactly k lifts of every dart at its image
        // whose edge still has a level to spare.
        ConditionVerdict c;
        c.pass = level >= 1;
        std::ostringstream os;
        if (!c.pass) {
            os << "needs the finite-level condition";
        } else {
            std::vector<int> edge_time(g.edge_count(), -1);
            for (int e = 0; e < g.edge_count(); ++e) {
                int x = e, t = 0;
                while (t <= g.edge_count() && !in_delta[x]) {
                    x = m.edge_image_dart[x] >> 1;
                    ++t;
                }
                edge_time[e] = t;
            }
            for (int x = 0; x < g.vertex_count() && c.pass; ++x) {
                int y = m.vertex_image[x], k = m.local_degree[x];
                for (int dart : g.rotation[y]) {
                    if (edge_time[dart >> 1] > level - 1) continue;
                    int cnt = 0;
                    for (int dx : g.rotation[x])
                        if (m.dart_image(dx) == dart) ++cnt;
                    if (cnt != k) {
                        c.pass = false;
                        os << "vertex " << x << " carries " << cnt << " lifts of dart " << dart
                           << " at its image, local degree " << k;
                        break;
                    }
                }
            }
            if (c.pass) os << "every vertex carries a full set of lifts";
        }
        c.evidence = os.str();
        rep.verdicts.emplace_back("pullback-saturation", c);
    }
    rep.overall = true;
    for (auto& [name, v] : rep.verdicts) rep.overall = rep.overall && v.pass;
    return rep;
}

namespace {

// Closed loop for one face: edge polylines stitched together, with circular
// arcs standing in for the corners at infinity.
std::vector<Cx> face_loop(const EmbeddedGraph& g, const std::vector<int>& face_darts) {
    std::vector<Cx> loop;
    int nd = (int)face_darts.size();
    for (int i = 0; i < nd; ++i) {
        int dart = face_darts[i];
        const EdgeRecord& e = g.edges[dart >> 1];
        if ((dart & 1) == 0)
            loop.insert(loop.end(), e.geometry.begin(), e.geometry.end());
        else
            loop.insert(loop.end(), e.geometry.rbegin(), e.geometry.rend());
        if (g.vertices[g.target(dart)].kind == VertexKind::Infinity) {
            int next = face_darts[(i + 1) % nd];
            const EdgeRecord& en = g.edges[next >> 1];
            Cx far_in = (dart & 1) == 0 ? e.geometry.back() : e.geometry.front();
            Cx far_out = (next & 1) == 0 ? en.geometry.front() : en.geometry.back();
            double ti = std::arg(far_in), to = std::arg(far_out);
            double span = std::fmod(ti - to, kTwoPi);
            if (span <= 0) span += kTwoPi;
            double radius = 0.95 * std::min(std::abs(far_in), std::abs(far_out));
            int steps = std::max(8, (int)std::ceil(span / 0.03));
            for (int sstep = 0; sstep <= steps; ++sstep) {
                double th = ti - span * sstep / steps;
                loop.push_back(std::polar(radius, th));
            }
        }
    }
    return loop;
}

double winding_number(const std::vector<Cx>& loop, Cx q) {
    double total = 0.0;
    for (size_t i = 0; i < loop.size(); ++i) {
        Cx a = loop[i] - q, b = loop[(i + 1) % loop.size()] - q;
        total += std::arg(b / a);
    }
    return total / kTwoPi;
}

}  // namespace

std::vector<int> locate_in_channel_faces(const ChannelDiagram& cd, const std::vector<Cx>& pts,
                                         const Tolerances& tol) {
    FaceSet fs = trace_faces(cd.graph);
    std::vector<std::vector<Cx>> loops;
    loops.reserve(fs.count());
    for (const std::vector<int>& fd : fs.faces) loops.push_back(face_loop(cd.graph, fd));

    std::vector<int> out(pts.size(), -1);
    for (size_t i = 0; i < pts.size(); ++i) {
        Cx q = pts[i];
        bool boundary = false;
        for (const EdgeRecord& e : cd.graph.edges)
            if (point_polyline_dist(q, e.geometry) <= tol.ray_tube * rel_scale(q)) boundary = true;
        if (boundary) continue;
        for (int fi = 0; fi < fs.count(); ++fi) {
            if (std::abs(winding_number(loops[fi], q)) >= 0.5) {
                out[i] = fi;
                break;
            }
        }
    }
    return out;
}

std::vector<FaceCensus> channel_face_census(const ChannelDiagram& cd, const RationalMap& f,
                                            const Tolerances& tol) {
    FaceSet fs = trace_faces(cd.graph);
    std::vector<FaceCensus> out(fs.count());

    std::vector<RootCluster> poles = poles_of(f, tol.merge_tol);
    std::vector<Cx> centers;
    for (const RootCluster& p : poles) centers.push_back(p.center);
    std::vector<int> where = locate_in_channel_faces(cd, centers, tol);
    for (size_t i = 0; i < poles.size(); ++i) {
        if (where[i] < 0)
            throw numerical_error("pole could not be located strictly inside a face");
        out[where[i]].pole_weight += poles[i].multiplicity;
    }
    for (int fi = 0; fi < fs.count(); ++fi) {
        std::set<int> finite_vertices;
        for (int dart : fs.faces[fi]) {
            int v = cd.graph.origin(dart);
            if (cd.graph.vertices[v].kind != VertexKind::Infinity) finite_vertices.insert(v);
        }
        out[fi].boundary_fixed = (int)finite_vertices.size();
    }
    return out;
}

bool shared_pole_witness(const ChannelDiagram& cd, const NewtonGraphLevel& level1,
                         const RationalMap& f, const Tolerances& tol) {
    (void)f;
    FaceSet fs = trace_faces(cd.graph);
    std::vector<Cx> pole_pos;
    std::vector<int> pole_deg;
    for (int v = 0; v < level1.graph.vertex_count(); ++v) {
        const VertexRecord& vr = level1.graph.vertices[v];
        if (vr.kind != VertexKind::Pole) continue;
        pole_pos.push_back(vr.pos->z);
        pole_deg.push_back(level1.graph.degree(v));
    }
    std::vector<int> where = locate_in_channel_faces(cd, pole_pos, tol);
    std::vector<char> witnessed(fs.count(), 0);
    for (size_t i = 0; i < pole_pos.size(); ++i)
        if (where[i] >= 0 && pole_deg[i] >= 2) witnessed[where[i]] = 1;
    for (char w : witnessed)
        if (!w) return false;
    return true;
}

}  // namespace ng
