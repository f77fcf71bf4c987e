#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "sdri/error.hpp"
#include "sdri/io.hpp"

using namespace sdri;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("sdri_io_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Kind and message of the error parse_config_text raises.
std::pair<ErrorKind, std::string> parse_error(const std::string& text, const fs::path& base = {}) {
    try {
        parse_config_text(text, base);
    } catch (const ConfigError& e) {
        return {e.kind(), e.what()};
    }
    FAIL("expected a ConfigError");
    return {};
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::vector<double> r;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return rows;
}

int count(const std::string& s, const std::string& what) {
    int n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("minimal config gets defaults and an echo") {
    const auto dir = scratch("minimal");
    const auto c = parse_config_text(R"({"preset": "capillary", "v": 2.0, "seed": 9})");
    CHECK(c.preset == "capillary");
    CHECK(*c.params.v == 2.0);
    CHECK(c.seed == 9);
    CHECK(c.schedule.iterations == Schedule{}.iterations);
    CHECK(c.volume == "penalty");
    CHECK(c.emit_svg);
    CHECK_FALSE(c.emit_mesh);

    RunConfig short_run = c;
    short_run.schedule.iterations = 20;
    short_run.output = (dir / "out").string();
    run(short_run);
    const std::string echo = slurp(dir / "out" / "config.json");
    // Effective values are written out even when the config left them to the preset.
    const auto back = parse_config_text(echo);
    CHECK(*back.params.v == 2.0);
    CHECK(back.params.lambda.has_value());
    CHECK(back.params.m.has_value());
    CHECK(back.params.h.has_value());
    CHECK(config_to_json(back) == echo);
}

TEST_CASE("negative lambda and zero m are range errors") {
    auto [k1, m1] = parse_error(R"({"preset": "capillary", "lambda": -1})");
    CHECK(k1 == ErrorKind::ValidationError);
    CHECK(m1.find("lambda") != std::string::npos);

    auto [k2, m2] = parse_error(R"({"preset": "capillary", "m": 0})");
    CHECK(k2 == ErrorKind::ValidationError);
    CHECK(m2.find("m: must be >= 1") != std::string::npos);

    // Every violation is listed, not just the first.
    auto [k3, m3] = parse_error(R"({"preset": "capillary", "lambda": -1, "m": 0, "h": 0, "schedule": {"batch": 0}})");
    CHECK(k3 == ErrorKind::ValidationError);
    for (const char* f : {"lambda", "m:", "h:", "schedule.batch"}) CHECK(m3.find(f) != std::string::npos);

    CHECK(parse_error("{}").first == ErrorKind::ValidationError);
    CHECK(parse_error(R"({"preset": "teapot"})").first == ErrorKind::ValidationError);
    const auto missing = parse_error(R"({"geometry": "absent.json"})", scratch("missing"));
    CHECK(missing.second.find("does not exist") != std::string::npos);
}

TEST_CASE("strict parsing") {
    auto [k, msg] = parse_error(R"({"preset": "capillary", "schedule": {"iterations": 5, "temprature": 1}})");
    CHECK(k == ErrorKind::ParseError);
    CHECK(msg.find("schedule.temprature") != std::string::npos);

    auto [k2, msg2] = parse_error("{\"preset\": \"capillary\",\n \"v\": ,\n}");
    CHECK(k2 == ErrorKind::ParseError);
    CHECK(msg2.find("line 2") != std::string::npos);

    auto [k3, msg3] = parse_error(R"({"preset": "capillary", "v": "one"})");
    CHECK(k3 == ErrorKind::ParseError);
    CHECK(msg3.find("'v'") != std::string::npos);

    CHECK(parse_error(R"({"preset": "capillary", "m": 1.5})").first == ErrorKind::ParseError);
    CHECK(parse_error(R"({"preset": "capillary", "emit": {"png": true}})").first == ErrorKind::ParseError);
}

TEST_CASE("full config round trip") {
    const std::string text = R"({
      "preset": "thin_film", "v": 0.4, "beta": -0.5, "lambda": 20, "m": 1, "h": 0.2, "e0": 0.01, "height": 1.5,
      "phi": {"family": "elliptic", "a": 1.0, "b": 0.8},
      "elastic": {"film": {"lambda": 1, "mu": 1}, "substrate": {"voigt": [3, 1, 0, 3, 0, 1]}, "gauge": "mean_rigid"},
      "mismatch": {"affine": [0.01, 0, 0, 0.01]},
      "volume": "constrained", "vertex_budget": 128, "seed": 5,
      "schedule": {"iterations": 10, "greedy": true, "weights": {"slit": 0.3}},
      "output": "x", "emit": {"svg": false, "mesh_dump": true, "trace": true}
    })";
    const auto c = parse_config_text(text);
    const std::string once = config_to_json(c);
    CHECK(config_to_json(parse_config_text(once)) == once);
    const Problem p = build_problem(c);
    CHECK(p.v == 0.4);
    CHECK(p.lambda == 20.0);
    CHECK(p.elastic.h == 0.2);
    CHECK(p.volume == VolumeMode::Constrained);
    CHECK(p.vertex_budget == 128);
    CHECK(p.phi.family_name() == "elliptic");
    CHECK(p.elastic.tensor.substrate[0] == 3.0);
    CHECK(p.elastic.mismatch.at({0.3, 0.1})[1] == doctest::Approx(0.01));

    // Adhesion given piecewise.
    const auto pc = parse_config_text(
        R"({"preset": "thin_film", "beta": [{"from": [0, 0], "to": [2, 0], "beta": -0.2}, {"from": [2, 0], "to": [4, 0], "beta": 0.3}]})");
    REQUIRE(pc.beta_pieces.size() == 2);
    CHECK(config_to_json(parse_config_text(config_to_json(pc))) == config_to_json(pc));
    const Problem pp = build_problem(pc);
    CHECK(pp.beta.at({1, 0}) == doctest::Approx(-0.2));
    CHECK(pp.beta.at({3, 0}) == doctest::Approx(0.3));
}

TEST_CASE("adhesion beyond the norm is rejected when the problem is built") {
    const auto c = parse_config_text(R"({"preset": "thin_film", "beta": 1.5})");
    CHECK_THROWS_AS(build_problem(c), HypothesisError);
}

TEST_CASE("geometry files") {
    const std::string text = R"({
      "container": [[-3, 0], [3, 0], [3, 3], [-3, 3]],
      "substrates": [[[-3, -1], [3, -1], [3, 0], [-3, 0]]],
      "components": [{"outer": [[-1, 0], [1, 0], [1, 1], [-1, 1]], "holes": [[[-0.2, 0.4], [0.2, 0.4], [0.2, 0.6], [-0.2, 0.6]]]}],
      "slits": [{"vertices": [[1, 0.5], [1.5, 0.5]], "tag": "filament"}],
      "delamination": [[[-1, 0], [-0.5, 0]]]
    })";
    const auto g = geometry_from_json(text);
    CHECK(g.domain.contact_length() == doctest::Approx(6.0));
    REQUIRE(g.crystal.components.size() == 1);
    CHECK(area(g.crystal) == doctest::Approx(2.0 - 0.08));
    CHECK(g.crystal.slits.front().tag == SlitTag::Filament);
    CHECK(g.crystal.delamination.size() == 1);

    const auto again = geometry_from_json(geometry_to_json(g.domain, g.crystal));
    CHECK(geometry_to_json(again.domain, again.crystal) == geometry_to_json(g.domain, g.crystal));

    CHECK_THROWS_AS(geometry_from_json(R"({"container": [[0, 0], [1, 0], [1, 1]], "colour": 1})"), ConfigError);
    CHECK_THROWS_AS(geometry_from_json(R"({"components": []})"), ConfigError);
    try {
        geometry_from_json(R"({"container": [[0, 0], [1, 0], [1, 1], [0, 1]], "components": [[[0.5, 0.5], [2, 0.5], [2, 2]]]})");
        FAIL("expected GeometryError");
    } catch (const GeometryError& e) {
        CHECK(exit_code(e) == 3);
    }
}

TEST_CASE("breakdown columns sum to the total") {
    const auto dir = scratch("breakdown");
    auto c = parse_config_text(R"({"preset": "thin_film", "schedule": {"iterations": 40}})");
    c.output = dir.string();
    run(c);
    const auto rows = csv_rows(slurp(dir / "breakdown.csv"));
    // Refused proposals are never evaluated.
    REQUIRE(rows.size() > 10);
    for (const auto& r : rows) {
        REQUIRE(r.size() == 9);
        double s = 0.0;
        for (int i = 0; i < 8; ++i) s += r[i];
        CHECK(std::abs(s - r[8]) <= 1e-12 * std::max(1.0, std::abs(r[8])));
    }
    CHECK(slurp(dir / "trace.csv").rfind("iter,accepted,move_kind,F,F_lambda,area,components,elapsed_ms\n", 0) == 0);
    CHECK(fs::exists(dir / "final_geometry.json"));
    CHECK(fs::exists(dir / "snapshot.svg"));
    CHECK_FALSE(fs::exists(dir / "mesh.json"));
}

TEST_CASE("snapshot has one path per class present") {
    const Problem p = make_preset("thin_film");
    SUBCASE("start configuration") {
        const std::string svg = snapshot_svg(p.domain, p.init);
        std::set<ArcClass> present;
        for (const auto& a : classify_boundary(p.init, p.domain)) present.insert(a.cls);
        CHECK(count(svg, "<path") == static_cast<int>(present.size()));
        for (auto cls : present) CHECK(count(svg, "<path class=\"" + std::string(to_string(cls)) + "\"") == 1);
    }
    SUBCASE("every class") {
        const auto g = geometry_from_json(R"({
          "container": [[-3, 0], [3, 0], [3, 3], [-3, 3]],
          "substrates": [[[-3, -1], [3, -1], [3, 0], [-3, 0]]],
          "components": [[[-1, 0], [1, 0], [1, 1], [-1, 1]]],
          "slits": [{"vertices": [[0, 1], [0, 0.5]], "tag": "crack"},
                    {"vertices": [[1, 0.5], [1.5, 0.5]], "tag": "filament"},
                    {"vertices": [[1.5, 0], [2, 0]], "tag": "filament"}],
          "delamination": [[[-1, 0], [-0.5, 0]]]
        })");
        std::set<ArcClass> present;
        for (const auto& arc : classify_boundary(g.crystal, g.domain)) present.insert(arc.cls);
        CHECK(present.size() == kArcClassCount);
        const std::string svg = snapshot_svg(g.domain, g.crystal);
        CHECK(count(svg, "<path") == static_cast<int>(present.size()));
        // Crack, filament and wetting layer dashed, in the paths and in the legend.
        CHECK(count(svg, "stroke-dasharray") == 2 * 3);
        CHECK(count(svg, "<text") == static_cast<int>(present.size()));
    }
}

TEST_CASE("exit codes by error kind") {
    CHECK(exit_code(ConfigError(ErrorKind::ParseError, "")) == 2);
    CHECK(exit_code(ConfigError(ErrorKind::ValidationError, "")) == 2);
    CHECK(exit_code(ConfigError(ErrorKind::UnknownPreset, "")) == 2);
    CHECK(exit_code(HypothesisError("")) == 2);
    CHECK(exit_code(GeometryError(ErrorKind::OverlappingInteriors, "")) == 3);
    CHECK(exit_code(GeometryError(ErrorKind::DegenerateGeometry, "")) == 3);
    CHECK(exit_code(MeshError("")) == 4);
    CHECK(exit_code(SolveError(ErrorKind::SingularSystem, "")) == 4);
    CHECK(exit_code(SolveError(ErrorKind::NonConvergence, "")) == 4);
    CHECK(exit_code(ProbeError(ErrorKind::NoTriplePoint, "")) == 5);
}

TEST_CASE("same config and seed give byte-identical tables") {
    const auto dir = scratch("determinism");
    auto c = parse_config_text(R"({"preset": "delamination", "seed": 4, "schedule": {"iterations": 60, "batch": 3}})");
    c.output = (dir / "a").string();
    run(c);
    c.output = (dir / "b").string();
    c.schedule.threads = 3;
    run(c);
    for (const char* f : {"breakdown.csv", "trace.csv", "final_geometry.json", "snapshot.svg"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
}

TEST_CASE("probe reports serialize") {
    ProbeReport r;
    r.name = "demo";
    r.add_close("x", 1.0, 1.01, 0.1);
    r.add_close("y", 1.0, 2.0, 0.1);
    const std::string j = probe_reports_json({r});
    CHECK(j.find("\"passed\": false") != std::string::npos);
    std::ostringstream os;
    print_probe_table(os, {r});
    CHECK(os.str().find("FAIL") != std::string::npos);
    CHECK(os.str().find("0/1 probes passed") != std::string::npos);
}
