#include "ng/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ng {

namespace {

using nlohmann::json;

void dump_canonical(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ',';
                first = false;
                dump_canonical(el, out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            double x = j.get<double>();
            if (!std::isfinite(x)) throw io_error("cannot serialize a non-finite number");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out += buf;
            break;
        }
        default:
            out += j.dump();
    }
}

const char* kind_name(VertexKind k) {
    switch (k) {
        case VertexKind::Infinity: return "infinity";
        case VertexKind::Root: return "root";
        case VertexKind::Pole: return "pole";
        case VertexKind::Prepole: return "prepole";
        case VertexKind::RootPreimage: return "root_preimage";
    }
    return "root_preimage";
}

VertexKind kind_from_name(const std::string& s) {
    if (s == "infinity") return VertexKind::Infinity;
    if (s == "root") return VertexKind::Root;
    if (s == "pole") return VertexKind::Pole;
    if (s == "prepole") return VertexKind::Prepole;
    if (s == "root_preimage") return VertexKind::RootPreimage;
    throw io_error("unknown vertex kind: " + s);
}

}  // namespace

std::string canonical_json(const json& j) {
    std::string out;
    dump_canonical(j, out);
    return out;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw io_error(std::string("json parse: ") + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream body;
    body << in.rdbuf();
    if (!in.good() && !in.eof()) throw io_error("read failed on " + path);
    return body.str();
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot create " + path);
    out << body;
    if (!out.good()) throw io_error("write failed on " + path);
}

Poly poly_from_json_text(const std::string& text) {
    json j = parse_json(text);
    try {
        if (j.contains("roots")) {
            RootSpec spec;
            for (const auto& r : j.at("roots")) {
                Cx z{r.at("re").get<double>(), r.at("im").get<double>()};
                int mult = r.contains("mult") ? r.at("mult").get<int>() : 1;
                spec.roots.emplace_back(z, mult);
            }
            if (spec.roots.empty()) throw io_error("roots list is empty");
            return polynomial_from_roots(spec);
        }
        if (j.contains("coeffs")) {
            std::vector<Cx> c;
            for (const auto& e : j.at("coeffs"))
                c.emplace_back(e.at("re").get<double>(), e.at("im").get<double>());
            if (c.empty()) throw io_error("coefficient list is empty");
            return Poly{c};
        }
    } catch (const json::exception& e) {
        throw io_error(std::string("polynomial input: ") + e.what());
    }
    throw io_error("expected a top-level \"roots\" or \"coeffs\" key");
}

std::string graph_to_json(const EmbeddedGraph& g, const GraphMapRecord* map) {
    json doc;
    json jv = json::array();
    for (int i = 0; i < g.vertex_count(); ++i) {
        const VertexRecord& v = g.vertices[i];
        json e{{"id", i}, {"kind", kind_name(v.kind)}, {"level", v.level}};
        if (v.pos && !v.pos->at_inf) {
            e["re"] = v.pos->z.real();
            e["im"] = v.pos->z.imag();
        }
        jv.push_back(std::move(e));
    }
    doc["vertices"] = std::move(jv);

    json je = json::array();
    for (int e = 0; e < g.edge_count(); ++e)
        je.push_back(json{{"id", e},
                          {"from", g.edges[e].v[0]},
                          {"to", g.edges[e].v[1]},
                          {"level", g.edges[e].level}});
    doc["edges"] = std::move(je);

    json jr = json::object();
    for (int v = 0; v < g.vertex_count(); ++v) {
        json darts = json::array();
        for (int d : g.rotation[v]) darts.push_back(json::array({d >> 1, d & 1}));
        jr[std::to_string(v)] = std::move(darts);
    }
    doc["rotation"] = std::move(jr);

    if (map) {
        json jm;
        for (int i = 0; i < g.vertex_count(); ++i) {
            jm["vertices"][std::to_string(i)] = map->vertex_image[i];
            jm["local_degree"][std::to_string(i)] = map->local_degree[i];
        }
        for (int e = 0; e < g.edge_count(); ++e)
            jm["edges"][std::to_string(e)] = map->edge_image_dart[e];
        doc["map"] = std::move(jm);
    }
    return canonical_json(doc);
}

GraphBundle graph_from_json(const std::string& text) {
    json j = parse_json(text);
    GraphBundle out;
    EmbeddedGraph& g = out.graph;
    try {
        const json& jv = j.at("vertices");
        g.vertices.resize(jv.size());
        std::vector<char> seen(jv.size(), 0);
        for (const auto& e : jv) {
            int id = e.at("id").get<int>();
            if (id < 0 || id >= int(jv.size()) || seen[id])
                throw io_error("vertex ids must be 0..n-1 without repeats");
            seen[id] = 1;
            VertexRecord& v = g.vertices[id];
            v.kind = kind_from_name(e.at("kind").get<std::string>());
            v.level = e.at("level").get<int>();
            if (e.contains("re"))
                v.pos = SpherePoint::finite(Cx{e.at("re").get<double>(), e.at("im").get<double>()});
            else if (v.kind == VertexKind::Infinity)
                v.pos = SpherePoint::infinity();
        }

        const json& je = j.at("edges");
        g.edges.resize(je.size());
        std::vector<char> eseen(je.size(), 0);
        for (const auto& e : je) {
            int id = e.at("id").get<int>();
            if (id < 0 || id >= int(je.size()) || eseen[id])
                throw io_error("edge ids must be 0..m-1 without repeats");
            eseen[id] = 1;
            EdgeRecord& r = g.edges[id];
            r.v = {e.at("from").get<int>(), e.at("to").get<int>()};
            r.level = e.at("level").get<int>();
            for (int s : {0, 1})
                if (r.v[s] < 0 || r.v[s] >= g.vertex_count())
                    throw io_error("edge endpoint out of range");
        }

        g.rotation.assign(g.vertex_count(), {});
        for (const auto& [key, darts] : j.at("rotation").items()) {
            int v = std::stoi(key);
            if (v < 0 || v >= g.vertex_count()) throw io_error("rotation key out of range");
            for (const auto& d : darts) {
                int e = d.at(0).get<int>(), s = d.at(1).get<int>();
                if (e < 0 || e >= g.edge_count() || (s != 0 && s != 1))
                    throw io_error("rotation entry out of range");
                g.rotation[v].push_back(2 * e + s);
            }
        }

        if (j.contains("map")) {
            const json& jm = j.at("map");
            GraphMapRecord m;
            m.vertex_image.resize(g.vertex_count());
            m.local_degree.resize(g.vertex_count());
            m.edge_image_dart.resize(g.edge_count());
            for (int i = 0; i < g.vertex_count(); ++i) {
                m.vertex_image[i] = jm.at("vertices").at(std::to_string(i)).get<int>();
                m.local_degree[i] = jm.at("local_degree").at(std::to_string(i)).get<int>();
                if (m.vertex_image[i] < 0 || m.vertex_image[i] >= g.vertex_count())
                    throw io_error("vertex image out of range");
                if (m.local_degree[i] < 1) throw io_error("local degree must be positive");
            }
            for (int e = 0; e < g.edge_count(); ++e) {
                m.edge_image_dart[e] = jm.at("edges").at(std::to_string(e)).get<int>();
                if (m.edge_image_dart[e] < 0 || m.edge_image_dart[e] >= g.dart_count())
                    throw io_error("edge image dart out of range");
            }
            out.map = std::move(m);
        }
    } catch (const json::exception& e) {
        throw io_error(std::string("graph json: ") + e.what());
    }
    try {
        g.validate();
    } catch (const graph_error& e) {
        throw io_error(std::string("graph json: ") + e.what());
    }
    return out;
}

std::string graph_to_dot(const EmbeddedGraph& g) {
    DartCycles cyc(g);
    std::ostringstream os;
    os << "graph newton {\n  node [shape=circle];\n";
    for (int v = 0; v < g.vertex_count(); ++v)
        os << "  v" << v << " [label=\"" << v << " " << kind_name(g.vertices[v].kind) << " L"
           << g.vertices[v].level << "\"];\n";
    for (int e = 0; e < g.edge_count(); ++e) {
        // slot of each end in the cyclic order at its endpoint
        os << "  v" << g.edges[e].v[0] << " -- v" << g.edges[e].v[1] << " [label=\"e" << e
           << "\", rot=\"" << g.edges[e].v[0] << ":" << cyc.slot(2 * e) << "," << g.edges[e].v[1]
           << ":" << cyc.slot(2 * e + 1) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

std::string validation_report_to_json(const ValidationReport& report) {
    json doc = json::object();
    for (const auto& [name, verdict] : report.verdicts)
        doc[name] = json{{"pass", verdict.pass}, {"evidence", verdict.evidence}};
    return canonical_json(doc);
}

LiftData lift_data_from_json(const std::string& text) {
    json j = parse_json(text);
    LiftData out;
    try {
        out.curves = j.at("curves").get<int>();
        for (const auto& l : j.at("lifts")) {
            LiftDatum d;
            d.source = l.at("source").get<int>();
            for (const auto& c : l.at("components")) {
                LiftComponent lc;
                lc.target = c.at("target").is_null() ? -1 : c.at("target").get<int>();
                lc.degree = c.at("degree").get<int>();
                d.components.push_back(lc);
            }
            out.lifts.push_back(std::move(d));
        }
    } catch (const json::exception& e) {
        throw io_error(std::string("lift data: ") + e.what());
    }
    return out;
}

std::string obstruction_report_to_json(const ObstructionReport& r) {
    json rows = json::array();
    for (int i = 0; i < r.matrix.n; ++i) {
        json row = json::array();
        for (int j2 = 0; j2 < r.matrix.n; ++j2) row.push_back(r.matrix.at(i, j2));
        rows.push_back(std::move(row));
    }
    json doc{{"curves", r.matrix.n},
             {"matrix", std::move(rows)},
             {"labels", r.matrix.labels},
             {"lambda", r.lambda},
             {"irreducible", r.irreducible},
             {"obstruction_candidate", r.obstruction_candidate},
             {"verdict", r.verdict}};
    return canonical_json(doc);
}

OrbifoldMapData orbifold_data_from_json(const std::string& text) {
    json j = parse_json(text);
    OrbifoldMapData out;
    try {
        for (const auto& p : j.at("points")) out.points.push_back(p.get<std::string>());
        auto index_of = [&](const std::string& name) {
            for (size_t i = 0; i < out.points.size(); ++i)
                if (out.points[i] == name) return int(i);
            throw io_error("unknown marked point: " + name);
        };
        out.image.resize(out.points.size());
        out.local_degree.assign(out.points.size(), 1);
        const json& jm = j.at("map");
        for (size_t i = 0; i < out.points.size(); ++i)
            out.image[i] = index_of(jm.at(out.points[i]).get<std::string>());
        if (j.contains("degree"))
            for (const auto& [name, k] : j.at("degree").items())
                out.local_degree[index_of(name)] = k.get<int>();
    } catch (const json::exception& e) {
        throw io_error(std::string("orbifold data: ") + e.what());
    }
    return out;
}

std::string orbifold_signature_to_json(const OrbifoldMapData& data, const OrbifoldSignature& s) {
    json weights = json::object();
    json points = json::array();
    for (size_t i = 0; i < s.weights.size(); ++i) {
        std::string name = i < data.points.size() ? data.points[i] : "p" + std::to_string(i);
        points.push_back(name);
        if (s.weights[i] == kOrbifoldInfinity)
            weights[name] = "infinity";
        else
            weights[name] = s.weights[i];
    }
    json doc{{"points", std::move(points)},
             {"weights", std::move(weights)},
             {"chi", s.chi},
             {"hyperbolic", s.hyperbolic}};
    return canonical_json(doc);
}

std::string rays_to_json(const std::vector<RayPolyline>& rays) {
    json doc = json::array();
    for (const RayPolyline& r : rays) {
        json pts = json::array();
        for (Cx z : r.points) pts.push_back(json{{"re", z.real()}, {"im", z.imag()}});
        doc.push_back(std::move(pts));
    }
    return canonical_json(doc);
}

}  // namespace ng
