#include "ng/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ng/dynamics.hpp"
#include "ng/json_io.hpp"
#include "ng/newton_graph.hpp"
#include "ng/render.hpp"

namespace ng {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOpts {
    std::string roots_file, coeffs_file, out_dir;
    int max_level = 20;
    double tol_fix = 0.0;
};

void add_input_flags(CLI::App* cmd, CommonOpts& o) {
    auto* r = cmd->add_option("--roots", o.roots_file,
                              "JSON file {\"roots\":[{\"re\":..,\"im\":..,\"mult\":..},..]}");
    auto* c = cmd->add_option("--coeffs", o.coeffs_file,
                              "JSON file {\"coeffs\":[{\"re\":..,\"im\":..},..]} ascending");
    r->excludes(c);
    cmd->add_option("--out", o.out_dir, "directory for output files");
    cmd->add_option("--tol-fix", o.tol_fix, "fixed point landing radius override")
        ->check(CLI::PositiveNumber);
}

Tolerances tol_of(const CommonOpts& o) {
    Tolerances t;
    if (o.tol_fix > 0.0) t.eps_fix = o.tol_fix;
    return t;
}

RationalMap load_map(const CommonOpts& o) {
    if (o.roots_file.empty() == o.coeffs_file.empty())
        throw invalid_spec_error("provide exactly one of --roots or --coeffs");
    const std::string& path = o.roots_file.empty() ? o.coeffs_file : o.roots_file;
    RationalMap f = newton_map(poly_from_json_text(read_text_file(path)));
    if (f.degree() < 3)
        throw invalid_spec_error(
            "newton map degree < 3: need at least three distinct roots");
    return f;
}

void emit(const CommonOpts& o, const std::string& filename, const std::string& body) {
    if (o.out_dir.empty()) return;
    fs::create_directories(o.out_dir);
    write_text_file((fs::path(o.out_dir) / filename).string(), body);
}

json sphere_json(const SpherePoint& p) {
    json j;
    j["at_infinity"] = p.at_inf;
    if (!p.at_inf) {
        j["re"] = p.z.real();
        j["im"] = p.z.imag();
    }
    return j;
}

const char* fixed_kind_name(FixedKind k) {
    switch (k) {
        case FixedKind::Superattracting: return "superattracting";
        case FixedKind::Attracting: return "attracting";
        case FixedKind::Repelling: return "repelling";
    }
    return "repelling";
}

int cmd_analyze(const CommonOpts& o) {
    RationalMap f = load_map(o);
    Tolerances tol = tol_of(o);
    std::vector<FixedPointRecord> fixed = classify_fixed_points(f, tol);
    PcfReport pcf = is_postcritically_fixed(f, 256, tol);

    json doc;
    doc["degree"] = f.degree();
    json jf = json::array();
    for (const FixedPointRecord& r : fixed) {
        json e = sphere_json(r.location);
        e["multiplier"] = json{{"re", r.multiplier.real()}, {"im", r.multiplier.imag()}};
        e["kind"] = fixed_kind_name(r.kind);
        e["root_multiplicity"] = r.m;
        jf.push_back(std::move(e));
    }
    doc["fixed_points"] = std::move(jf);
    json jc = json::array();
    for (const CriticalPointRecord& c : pcf.critical) {
        json e = sphere_json(c.location);
        e["local_degree"] = c.local_degree;
        e["resolved"] = c.fate.resolved;
        if (c.fate.resolved) {
            e["lands_on_fixed"] = c.fate.fixed_index;
            e["steps"] = c.fate.steps;
        }
        jc.push_back(std::move(e));
    }
    doc["critical_points"] = std::move(jc);
    doc["postcritically_fixed"] = pcf.postcritically_fixed;

    std::string body = canonical_json(doc);
    std::cout << body << "\n";
    emit(o, "analyze.json", body);
    return 0;
}

int cmd_newton_graph(const CommonOpts& o) {
    RationalMap f = load_map(o);
    Tolerances tol = tol_of(o);
    PcfReport pcf = is_postcritically_fixed(f, 256, tol);
    if (!pcf.postcritically_fixed) {
        json undecided = json::array();
        for (const CriticalPointRecord& c : pcf.critical)
            if (!c.fate.resolved) undecided.push_back(sphere_json(c.location));
        json doc{{"error", "map is not postcritically fixed"},
                 {"undecided_orbits", std::move(undecided)}};
        std::cout << canonical_json(doc) << "\n";
        return 2;
    }

    NewtonGraphResult res = newton_graph_level(f, o.max_level, tol);
    ValidationReport rep =
        validate_abstract_newton_graph(res.levels.back().graph, res.levels.back().map_to_previous);

    json files = json::array();
    for (const NewtonGraphLevel& lvl : res.levels) {
        std::string base = "level_" + std::to_string(lvl.n);
        emit(o, base + ".json", graph_to_json(lvl.graph, &lvl.map_to_previous));
        emit(o, base + ".dot", graph_to_dot(lvl.graph));
        files.push_back(base + ".json");
    }
    emit(o, "rays.json", rays_to_json(res.diagram.rays));

    json doc{{"N", res.N},
             {"levels", std::move(files)},
             {"validation", parse_json(validation_report_to_json(rep))},
             {"overall", rep.overall}};
    std::string body = canonical_json(doc);
    std::cout << body << "\n";
    emit(o, "summary.json", body);
    return rep.overall ? 0 : 2;
}

int cmd_render(const CommonOpts& o, RenderSpec spec, const std::string& viewport, bool overlay) {
    if (!viewport.empty()) {
        std::string t = viewport;
        std::replace(t.begin(), t.end(), ',', ' ');
        std::istringstream is(t);
        if (!(is >> spec.x0 >> spec.y0 >> spec.x1 >> spec.y1))
            throw invalid_spec_error("viewport must be x0,y0,x1,y1");
    }
    RationalMap f = load_map(o);
    Tolerances tol = tol_of(o);
    std::vector<Cx> roots;
    for (const FixedPointRecord& r : classify_fixed_points(f, tol))
        if (!r.location.at_inf) roots.push_back(r.location.z);

    std::vector<RayPolyline> rays;
    if (overlay) rays = build_channel_diagram(f, tol).rays;
    Image img = render_basins(f, roots, spec, overlay ? &rays : nullptr, tol);

    fs::path target = o.out_dir.empty() ? fs::path("render.ppm")
                                        : fs::path(o.out_dir) / "render.ppm";
    if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
    write_ppm(target.string(), img);
    std::cout << "wrote " << target.string() << "\n";
    return 0;
}

int cmd_validate(const std::string& path) {
    GraphBundle b = graph_from_json(read_text_file(path));
    if (!b.map) throw io_error("graph file has no self-map record");
    ValidationReport rep = validate_abstract_newton_graph(b.graph, *b.map);
    std::cout << validation_report_to_json(rep) << "\n";
    return rep.overall ? 0 : 2;
}

int cmd_equivalence(const std::string& path_a, const std::string& path_b) {
    GraphBundle a = graph_from_json(read_text_file(path_a));
    GraphBundle b = graph_from_json(read_text_file(path_b));
    bool conjugate = a.map.has_value() && b.map.has_value();
    std::vector<GraphEquivalence> eqs =
        conjugate ? find_equivalences(a.graph, *a.map, b.graph, *b.map)
                  : find_equivalences(a.graph, b.graph);
    json doc;
    doc["count"] = int(eqs.size());
    doc["conjugating_self_maps"] = conjugate;
    if (!eqs.empty()) doc["witness_vertex_map"] = eqs.front().vertex_map;
    std::cout << canonical_json(doc) << "\n";
    return eqs.empty() ? 2 : 0;
}

int cmd_thurston(const std::string& path) {
    LiftData ld = lift_data_from_json(read_text_file(path));
    ObstructionReport r = obstruction_verdict(ld.curves, ld.lifts);
    std::cout << obstruction_report_to_json(r) << "\n";
    return r.obstruction_candidate ? 2 : 0;
}

int cmd_orbifold(const std::string& path) {
    OrbifoldMapData d = orbifold_data_from_json(read_text_file(path));
    OrbifoldSignature s = orbifold_signature(d);
    std::cout << orbifold_signature_to_json(d, s) << "\n";
    return s.hyperbolic ? 0 : 2;
}

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const trace_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const lift_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const pullback_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int run_cli(int argc, const char* const argv[]) {
    CLI::App app{"channel diagrams, pullback graph towers, and graph checks for Newton maps"};
    app.require_subcommand(1);

    CommonOpts ao;
    CLI::App* analyze = app.add_subcommand("analyze", "classify fixed points and critical orbits");
    add_input_flags(analyze, ao);

    CommonOpts go;
    CLI::App* graphcmd =
        app.add_subcommand("newton-graph", "build and validate the pullback graph tower");
    add_input_flags(graphcmd, go);
    graphcmd->add_option("--max-level", go.max_level, "pullback level cap")
        ->check(CLI::PositiveNumber);

    CommonOpts ro;
    RenderSpec spec;
    std::string viewport;
    bool overlay = false;
    CLI::App* render = app.add_subcommand("render", "render basins of attraction to PPM");
    add_input_flags(render, ro);
    render->add_option("--width", spec.width, "image width")->check(CLI::PositiveNumber);
    render->add_option("--height", spec.height, "image height")->check(CLI::PositiveNumber);
    render->add_option("--viewport", viewport, "viewport corners x0,y0,x1,y1");
    render->add_option("--max-iter", spec.max_iter, "iteration budget per pixel")
        ->check(CLI::PositiveNumber);
    render->add_flag("--overlay", overlay, "draw the channel diagram rays on top");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "check the graph axioms on a graph file");
    validate->add_option("graph", validate_path, "graph JSON with a self-map record")->required();

    std::string eq_a, eq_b;
    CLI::App* equivalence =
        app.add_subcommand("equivalence", "find rotation-preserving isomorphisms between graphs");
    equivalence->add_option("first", eq_a, "graph JSON file")->required();
    equivalence->add_option("second", eq_b, "graph JSON file")->required();

    std::string lifts_path;
    CLI::App* thurston = app.add_subcommand("thurston", "evaluate a curve family transition matrix");
    thurston->add_option("lifts", lifts_path, "lift data JSON file")->required();

    std::string orb_path;
    CLI::App* orbifold = app.add_subcommand("orbifold", "orbifold weights of a marked self-map");
    orbifold->add_option("data", orb_path, "orbifold data JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (app.got_subcommand(analyze)) return guarded([&] { return cmd_analyze(ao); });
    if (app.got_subcommand(graphcmd)) return guarded([&] { return cmd_newton_graph(go); });
    if (app.got_subcommand(render))
        return guarded([&] { return cmd_render(ro, spec, viewport, overlay); });
    if (app.got_subcommand(validate)) return guarded([&] { return cmd_validate(validate_path); });
    if (app.got_subcommand(equivalence))
        return guarded([&] { return cmd_equivalence(eq_a, eq_b); });
    if (app.got_subcommand(thurston)) return guarded([&] { return cmd_thurston(lifts_path); });
    if (app.got_subcommand(orbifold)) return guarded([&] { return cmd_orbifold(orb_path); });
    return 1;
}

}  // namespace ng
