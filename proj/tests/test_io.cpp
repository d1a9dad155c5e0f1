#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ng/cli.hpp"
#include "ng/json_io.hpp"
#include "ng/render.hpp"

using namespace ng;
namespace fs = std::filesystem;

namespace {

Poly unit_cubic() { return Poly{{Cx{-1, 0}, Cx{0, 0}, Cx{0, 0}, Cx{1, 0}}}; }

struct StreamCapture {
    std::ostringstream out, err;
    std::streambuf* old_out;
    std::streambuf* old_err;
    StreamCapture()
        : old_out(std::cout.rdbuf(out.rdbuf())), old_err(std::cerr.rdbuf(err.rdbuf())) {}
    ~StreamCapture() {
        std::cout.rdbuf(old_out);
        std::cerr.rdbuf(old_err);
    }
};

int run(const std::vector<std::string>& args, std::string* out = nullptr,
        std::string* err = nullptr) {
    std::vector<const char*> argv;
    argv.push_back("ngraph");
    for (const std::string& a : args) argv.push_back(a.c_str());
    StreamCapture cap;
    int rc = run_cli(int(argv.size()), argv.data());
    if (out) *out = cap.out.str();
    if (err) *err = cap.err.str();
    return rc;
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("canonical json output is sorted and stable") {
    nlohmann::json j;
    j["b"] = 1;
    j["a"] = 0.5;
    j["c"] = nlohmann::json::array({true, nullptr, "x\"y"});
    CHECK(canonical_json(j) == "{\"a\":0.5,\"b\":1,\"c\":[true,null,\"x\\\"y\"]}");
    nlohmann::json f;
    f["t"] = 1.0 / 3.0;
    CHECK(canonical_json(f) == "{\"t\":0.33333333333333331}");
}

TEST_CASE("polynomial input parsing") {
    Poly p = poly_from_json_text(R"({"roots":[{"re":1,"im":0},{"re":-1,"im":0},{"re":0,"im":1}]})");
    CHECK(p.deg() == 3);
    CHECK(std::abs(p.eval(Cx{1, 0})) < 1e-12);
    CHECK(std::abs(p.eval(Cx{0, 1})) < 1e-12);

    Poly q = poly_from_json_text(R"({"roots":[{"re":0,"im":0,"mult":3}]})");
    CHECK(q.deg() == 3);

    Poly c = poly_from_json_text(R"({"coeffs":[{"re":-1,"im":0},{"re":0,"im":0},{"re":0,"im":0},{"re":1,"im":0}]})");
    CHECK(c.deg() == 3);
    CHECK(std::abs(c.eval(Cx{1, 0})) < 1e-15);

    CHECK_THROWS_AS(poly_from_json_text("{"), io_error);
    CHECK_THROWS_AS(poly_from_json_text("{}"), io_error);
    CHECK_THROWS_AS(poly_from_json_text(R"({"roots":[]})"), io_error);
    CHECK_THROWS_AS(poly_from_json_text(R"({"roots":[{"re":0}]})"), io_error);
    // parse failures carry the byte position
    try {
        poly_from_json_text("{\"roots\": oops}");
        CHECK(false);
    } catch (const io_error& e) {
        CHECK(std::string(e.what()).find("parse") != std::string::npos);
    }
}

TEST_CASE("graph json round trip preserves structure and verdicts") {
    RationalMap f = newton_map(unit_cubic());
    NewtonGraphResult res = newton_graph_level(f);
    const EmbeddedGraph& g = res.levels.back().graph;
    const GraphMapRecord& m = res.levels.back().map_to_previous;

    std::string text = graph_to_json(g, &m);
    GraphBundle back = graph_from_json(text);
    REQUIRE(back.map.has_value());
    REQUIRE(back.graph.vertex_count() == g.vertex_count());
    REQUIRE(back.graph.edge_count() == g.edge_count());
    for (int v = 0; v < g.vertex_count(); ++v) {
        CHECK(back.graph.vertices[v].kind == g.vertices[v].kind);
        CHECK(back.graph.vertices[v].level == g.vertices[v].level);
        CHECK(back.graph.rotation[v] == g.rotation[v]);
    }
    for (int e = 0; e < g.edge_count(); ++e) {
        CHECK(back.graph.edges[e].v == g.edges[e].v);
        CHECK(back.graph.edges[e].level == g.edges[e].level);
    }
    CHECK(back.map->vertex_image == m.vertex_image);
    CHECK(back.map->edge_image_dart == m.edge_image_dart);
    CHECK(back.map->local_degree == m.local_degree);

    // serializing the parsed graph reproduces the same bytes
    CHECK(graph_to_json(back.graph, &*back.map) == text);

    // the reloaded graph re-validates identically
    ValidationReport a = validate_abstract_newton_graph(g, m);
    ValidationReport b = validate_abstract_newton_graph(back.graph, *back.map);
    REQUIRE(a.verdicts.size() == b.verdicts.size());
    for (size_t i = 0; i < a.verdicts.size(); ++i) {
        CHECK(a.verdicts[i].first == b.verdicts[i].first);
        CHECK(a.verdicts[i].second.pass == b.verdicts[i].second.pass);
    }
    CHECK(a.overall == b.overall);

    std::string dot = graph_to_dot(g);
    CHECK(dot.find("graph newton {") == 0);
    CHECK(dot.find("rot=") != std::string::npos);
    CHECK(graph_to_dot(back.graph) == dot);
}

TEST_CASE("malformed graph files are rejected") {
    CHECK_THROWS_AS(graph_from_json("[]"), io_error);
    CHECK_THROWS_AS(graph_from_json(R"({"vertices":[],"edges":[]})"), io_error);
    // dangling rotation entry
    CHECK_THROWS_AS(
        graph_from_json(
            R"({"vertices":[{"id":0,"kind":"root","level":0}],"edges":[],"rotation":{"0":[[2,0]]}})"),
        io_error);
    // two components cannot form one of our graphs
    CHECK_THROWS_AS(
        graph_from_json(
            R"({"vertices":[{"id":0,"kind":"root","level":0},{"id":1,"kind":"root","level":0},
                {"id":2,"kind":"root","level":0},{"id":3,"kind":"root","level":0}],
                "edges":[{"id":0,"from":0,"to":1,"level":0},{"id":1,"from":2,"to":3,"level":0}],
                "rotation":{"0":[[0,0]],"1":[[0,1]],"2":[[1,0]],"3":[[1,1]]}})"),
        io_error);
}

TEST_CASE("lift and orbifold data parsing") {
    LiftData ld = lift_data_from_json(
        R"({"curves":2,"lifts":[{"source":0,"components":[{"target":1,"degree":1},
            {"target":null,"degree":3}]},{"source":1,"components":[{"target":0,"degree":4}]}]})");
    CHECK(ld.curves == 2);
    REQUIRE(ld.lifts.size() == 2);
    CHECK(ld.lifts[0].components[0].target == 1);
    CHECK(ld.lifts[0].components[1].target == -1);
    CHECK(ld.lifts[1].components[0].degree == 4);
    CHECK_THROWS_AS(lift_data_from_json(R"({"curves":1})"), io_error);

    OrbifoldMapData od = orbifold_data_from_json(
        R"({"points":["a","b"],"map":{"a":"b","b":"b"},"degree":{"a":2}})");
    CHECK(od.image == std::vector<int>{1, 1});
    CHECK(od.local_degree == std::vector<int>{2, 1});
    CHECK_THROWS_AS(
        orbifold_data_from_json(R"({"points":["a"],"map":{"a":"zz"}})"), io_error);
}

TEST_CASE("basin rendering colors roots and rays") {
    RationalMap f = newton_map(unit_cubic());
    std::vector<Cx> roots;
    for (const FixedPointRecord& r : classify_fixed_points(f))
        if (!r.location.at_inf) roots.push_back(r.location.z);
    REQUIRE(roots.size() == 3);

    RenderSpec spec;
    spec.width = spec.height = 64;
    spec.max_iter = 80;
    Image img = render_basins(f, roots, spec);
    REQUIRE(img.rgb.size() == size_t(64) * 64 * 3);

    auto pixel_of = [&](Cx z) {
        int c = int((z.real() - spec.x0) / ((spec.x1 - spec.x0) / spec.width));
        int r = int((spec.y1 - z.imag()) / ((spec.y1 - spec.y0) / spec.height));
        return std::pair<int, int>{std::clamp(c, 0, 63), std::clamp(r, 0, 63)};
    };
    std::vector<std::array<unsigned char, 3>> pal = basin_palette(3);
    for (size_t i = 0; i < roots.size(); ++i) {
        auto [c, r] = pixel_of(roots[i]);
        size_t o = (size_t(r) * 64 + c) * 3;
        CHECK(img.rgb[o] == pal[i][0]);
        CHECK(img.rgb[o + 1] == pal[i][1]);
        CHECK(img.rgb[o + 2] == pal[i][2]);
    }
    // the real point 1.9 sits in the basin of the root 1
    {
        size_t idx = 0;
        for (size_t i = 0; i < roots.size(); ++i)
            if (std::abs(roots[i] - Cx{1, 0}) < std::abs(roots[idx] - Cx{1, 0})) idx = i;
        auto [c, r] = pixel_of(Cx{1.9, 0.0});
        size_t o = (size_t(r) * 64 + c) * 3;
        CHECK(img.rgb[o] == pal[idx][0]);
        CHECK(img.rgb[o + 1] == pal[idx][1]);
        CHECK(img.rgb[o + 2] == pal[idx][2]);
    }

    // overlay pixels land within one pixel of the traced ray
    std::vector<RayPolyline> rays = build_channel_diagram(f).rays;
    Image over = render_basins(f, roots, spec, &rays);
    auto white_near = [&](int c, int r) {
        for (int dc = -1; dc <= 1; ++dc)
            for (int dr = -1; dr <= 1; ++dr) {
                int cc = c + dc, rr = r + dr;
                if (cc < 0 || cc >= 64 || rr < 0 || rr >= 64) continue;
                size_t o = (size_t(rr) * 64 + cc) * 3;
                if (over.rgb[o] == 255 && over.rgb[o + 1] == 255 && over.rgb[o + 2] == 255)
                    return true;
            }
        return false;
    };
    auto [c15, r15] = pixel_of(Cx{1.5, 0.0});
    CHECK(white_near(c15, r15));

    CHECK_THROWS_AS(render_basins(f, roots, RenderSpec{0, 64}), invalid_spec_error);
    {
        RenderSpec bad;
        bad.x1 = bad.x0;
        CHECK_THROWS_AS(render_basins(f, roots, bad), invalid_spec_error);
    }

    fs::path dir = fresh_dir("ng_ppm_test");
    write_ppm((dir / "a.ppm").string(), img);
    std::string bytes = read_text_file((dir / "a.ppm").string());
    std::string header = "P6\n64 64\n255\n";
    CHECK(bytes.rfind(header, 0) == 0);
    CHECK(bytes.size() == header.size() + img.rgb.size());
    write_ppm((dir / "b.ppm").string(), img);
    CHECK(read_text_file((dir / "b.ppm").string()) == bytes);
}

TEST_CASE("command line pipeline on the unit cubic") {
    fs::path dir = fresh_dir("ng_cli_test");
    std::string coeffs = (dir / "cubic.json").string();
    write_text_file(coeffs,
                    R"({"coeffs":[{"re":-1,"im":0},{"re":0,"im":0},{"re":0,"im":0},{"re":1,"im":0}]})");

    std::string out;
    REQUIRE(run({"analyze", "--coeffs", coeffs}, &out) == 0);
    nlohmann::json rep = parse_json(out);
    CHECK(rep.at("degree") == 3);
    CHECK(rep.at("postcritically_fixed") == true);
    CHECK(rep.at("fixed_points").size() == 4);
    int super = 0;
    for (const auto& p : rep.at("fixed_points"))
        if (p.at("kind") == "superattracting") ++super;
    CHECK(super == 3);

    std::string g1 = (dir / "g1").string(), g2 = (dir / "g2").string();
    REQUIRE(run({"newton-graph", "--coeffs", coeffs, "--out", g1}, &out) == 0);
    nlohmann::json summary = parse_json(out);
    CHECK(summary.at("N") == 2);
    CHECK(summary.at("overall") == true);
    CHECK(fs::exists(fs::path(g1) / "level_0.json"));
    CHECK(fs::exists(fs::path(g1) / "level_2.json"));
    CHECK(fs::exists(fs::path(g1) / "level_2.dot"));
    CHECK(fs::exists(fs::path(g1) / "rays.json"));

    // identical second run, byte for byte
    REQUIRE(run({"newton-graph", "--coeffs", coeffs, "--out", g2}) == 0);
    for (const char* name : {"summary.json", "level_0.json", "level_1.json", "level_2.json"})
        CHECK(read_text_file((fs::path(g1) / name).string()) ==
              read_text_file((fs::path(g2) / name).string()));

    // pipeline output re-validates and matches itself
    std::string level2 = (fs::path(g1) / "level_2.json").string();
    REQUIRE(run({"validate", level2}, &out) == 0);
    nlohmann::json verdicts = parse_json(out);
    for (const auto& [name, v] : verdicts.items()) CHECK(v.at("pass") == true);
    CHECK(run({"equivalence", level2, level2}, &out) == 0);
    CHECK(parse_json(out).at("count").get<int>() >= 1);

    // small render with overlay
    REQUIRE(run({"render", "--coeffs", coeffs, "--out", (dir / "img").string(), "--width", "48",
                 "--height", "48", "--max-iter", "60", "--viewport", "-2,-2,2,2", "--overlay"},
                &out) == 0);
    CHECK(fs::exists(dir / "img" / "render.ppm"));
}

TEST_CASE("command line verdicts and failure modes") {
    fs::path dir = fresh_dir("ng_cli_misc");
    std::string out, err;

    // usage problems
    CHECK(run({}, &out, &err) == 1);
    CHECK(run({"analyze"}, &out, &err) == 1);          // no input flag
    CHECK(run({"analyze", "--nope"}, &out, &err) == 1);
    CHECK(run({"--help"}, &out, &err) == 0);
    CHECK(run({"validate", (dir / "missing.json").string()}, &out, &err) == 1);

    // a quadratic cannot feed the pipeline
    std::string quad = (dir / "quad.json").string();
    write_text_file(quad, R"({"coeffs":[{"re":-1,"im":0},{"re":0,"im":0},{"re":1,"im":0}]})");
    CHECK(run({"analyze", "--coeffs", quad}, &out, &err) == 1);
    CHECK(err.find("degree < 3") != std::string::npos);

    // an invariant curve covered once is an obstruction candidate
    std::string lifts = (dir / "lifts.json").string();
    write_text_file(lifts, R"({"curves":1,"lifts":[{"source":0,"components":[{"target":0,"degree":1}]}]})");
    CHECK(run({"thurston", lifts}, &out, &err) == 2);
    CHECK(out.find("obstruction candidate") != std::string::npos);
    write_text_file(lifts, R"({"curves":1,"lifts":[{"source":0,"components":[{"target":0,"degree":2}]}]})");
    CHECK(run({"thurston", lifts}, &out, &err) == 0);
    CHECK(out.find("no obstruction") != std::string::npos);

    // doubling pattern: parabolic, not hyperbolic
    std::string orb = (dir / "orb.json").string();
    write_text_file(orb, R"({"points":["0","inf"],"map":{"0":"0","inf":"inf"},"degree":{"0":2,"inf":2}})");
    CHECK(run({"orbifold", orb}, &out, &err) == 2);
    CHECK(parse_json(out).at("chi") == 0.0);
    write_text_file(orb,
                    R"({"points":["a","b","c"],"map":{"a":"a","b":"b","c":"c"},"degree":{"a":2,"b":2,"c":2}})");
    CHECK(run({"orbifold", orb}, &out, &err) == 0);
    CHECK(parse_json(out).at("hyperbolic") == true);
}
