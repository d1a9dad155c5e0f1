#pragma once
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ng/newton_graph.hpp"
#include "ng/planar_graph.hpp"
#include "ng/poly.hpp"
#include "ng/thurston.hpp"

namespace ng {

// Serialization with sorted object keys and floats printed to 17 significant
// digits, so identical data always produces identical bytes.
std::string canonical_json(const nlohmann::json& j);

nlohmann::json parse_json(const std::string& text);  // io_error with position

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& body);

// Accepts {"roots":[{"re":..,"im":..,"mult":..},..]} or
// {"coeffs":[{"re":..,"im":..},..]} with coefficients in ascending degree.
Poly poly_from_json_text(const std::string& text);

struct GraphBundle {
    EmbeddedGraph graph;
    std::optional<GraphMapRecord> map;
};

// Graph schema: vertices (id, kind, level, re/im for finite positions), edges
// (id, from, to, level), rotation as lists of [edge, end] pairs per vertex,
// and an optional self-map (vertex images, dart image per edge, local degree
// per vertex). Edge geometry is not serialized.
std::string graph_to_json(const EmbeddedGraph& g, const GraphMapRecord* map = nullptr);
GraphBundle graph_from_json(const std::string& text);

// Graphviz export; the cyclic order at each vertex is kept as edge attributes.
std::string graph_to_dot(const EmbeddedGraph& g);

// {condition: {"pass": bool, "evidence": string}} for every verdict.
std::string validation_report_to_json(const ValidationReport& report);

struct LiftData {
    int curves = 0;
    std::vector<LiftDatum> lifts;
};

// {"curves":n, "lifts":[{"source":i, "components":[{"target":j|null,"degree":k}]}]}
LiftData lift_data_from_json(const std::string& text);

std::string obstruction_report_to_json(const ObstructionReport& r);

// {"points":[names], "map":{name:name}, "degree":{name:k}}; degree defaults to 1.
OrbifoldMapData orbifold_data_from_json(const std::string& text);

std::string orbifold_signature_to_json(const OrbifoldMapData& data, const OrbifoldSignature& s);

// Array of polylines, each an array of {"re","im"} samples.
std::string rays_to_json(const std::vector<RayPolyline>& rays);

}  // namespace ng
