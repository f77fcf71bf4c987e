#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sdri/error.hpp"
#include "sdri/io.hpp"

namespace sdri {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw ConfigError(ErrorKind::ParseError, "geometry '" + field + "': " + what);
}

Vec2 point(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad(field, "expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Vec2> points(const json& j, const std::string& field) {
    if (!j.is_array()) bad(field, "expected a list of [x, y]");
    std::vector<Vec2> out;
    for (const auto& p : j) out.push_back(point(p, field));
    return out;
}

void only(const json& j, const std::string& field, std::initializer_list<const char*> keys) {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(ErrorKind::ParseError, "unknown key: " + field + "." + it.key());
}

// Either a bare vertex list or {"outer": [...], "holes": [[...], ...]}.
PolygonWithHoles polygon(const json& j, const std::string& field) {
    PolygonWithHoles p;
    if (j.is_array()) {
        p.outer = points(j, field);
    } else if (j.is_object()) {
        only(j, field, {"outer", "holes"});
        if (!j.contains("outer")) bad(field, "missing outer");
        p.outer = points(j.at("outer"), field + ".outer");
        if (j.contains("holes")) {
            if (!j.at("holes").is_array()) bad(field + ".holes", "expected a list of rings");
            for (const auto& h : j.at("holes")) p.holes.push_back(points(h, field + ".holes"));
        }
    } else {
        bad(field, "expected a vertex list or {outer, holes}");
    }
    if (p.outer.size() < 3) bad(field, "a ring needs at least three vertices");
    for (const auto& h : p.holes)
        if (h.size() < 3) bad(field, "a ring needs at least three vertices");
    p.normalize();
    return p;
}

json ring_json(const Ring& r) {
    json a = json::array();
    for (auto p : r) a.push_back(json::array({p.x, p.y}));
    return a;
}

json polygon_json(const PolygonWithHoles& p) {
    json o = {{"outer", ring_json(p.outer)}};
    if (!p.holes.empty()) {
        json hs = json::array();
        for (const auto& h : p.holes) hs.push_back(ring_json(h));
        o["holes"] = hs;
    }
    return o;
}

}  // namespace

GeometryFile geometry_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(ErrorKind::ParseError, std::string("geometry: malformed JSON at byte ") + std::to_string(e.byte));
    }
    if (!j.is_object()) bad("<root>", "expected an object");
    only(j, "", {"container", "substrates", "components", "slits", "delamination", "snap_tol"});
    if (!j.contains("container")) bad("container", "required");

    std::vector<PolygonWithHoles> subs;
    if (j.contains("substrates")) {
        if (!j.at("substrates").is_array()) bad("substrates", "expected a list");
        for (const auto& s : j.at("substrates")) subs.push_back(polygon(s, "substrates"));
    }
    std::optional<double> tol;
    if (j.contains("snap_tol")) {
        if (!j.at("snap_tol").is_number() || j.at("snap_tol").get<double>() <= 0.0) bad("snap_tol", "expected a positive number");
        tol = j.at("snap_tol").get<double>();
    }
    GeometryFile g;
    g.domain = build_domain(polygon(j.at("container"), "container"), std::move(subs), tol);

    if (j.contains("components")) {
        if (!j.at("components").is_array()) bad("components", "expected a list");
        for (const auto& c : j.at("components")) g.crystal.components.push_back(polygon(c, "components"));
    }
    if (j.contains("slits")) {
        if (!j.at("slits").is_array()) bad("slits", "expected a list");
        for (const auto& s : j.at("slits")) {
            if (!s.is_object()) bad("slits", "expected {vertices, tag}");
            only(s, "slits", {"vertices", "tag"});
            Slit sl;
            if (!s.contains("vertices")) bad("slits", "missing vertices");
            sl.vertices = points(s.at("vertices"), "slits.vertices");
            if (sl.vertices.size() < 2) bad("slits.vertices", "a slit needs at least two vertices");
            const std::string tag = s.value("tag", std::string("crack"));
            if (tag == "crack") sl.tag = SlitTag::Crack;
            else if (tag == "filament") sl.tag = SlitTag::Filament;
            else bad("slits.tag", "expected crack or filament");
            g.crystal.slits.push_back(std::move(sl));
        }
    }
    if (j.contains("delamination")) {
        if (!j.at("delamination").is_array()) bad("delamination", "expected a list of segments");
        for (const auto& s : j.at("delamination")) {
            const auto pts = points(s, "delamination");
            if (pts.size() != 2) bad("delamination", "a segment is [[x, y], [x, y]]");
            g.crystal.delamination.push_back({pts[0], pts[1]});
        }
    }
    g.crystal.normalize();
    // Empty crystals are allowed (the optimizer may seed one).
    if (!g.crystal.empty()) {
        if (auto why = check_crystal(g.crystal, g.domain, std::max<int>(1, component_count(g.crystal, g.domain.snap_tol))))
            throw GeometryError(ErrorKind::InvariantViolation, "geometry file crystal: " + *why);
    }
    return g;
}

GeometryFile read_geometry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ErrorKind::ParseError, "cannot read geometry '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return geometry_from_json(ss.str());
}

std::string geometry_to_json(const Domain& dom, const FreeCrystal& a) {
    json j;
    j["container"] = polygon_json(dom.container);
    j["substrates"] = json::array();
    for (const auto& s : dom.substrates) j["substrates"].push_back(polygon_json(s));
    j["components"] = json::array();
    for (const auto& c : a.components) j["components"].push_back(polygon_json(c));
    j["slits"] = json::array();
    for (const auto& s : a.slits)
        j["slits"].push_back({{"vertices", ring_json(s.vertices)}, {"tag", s.tag == SlitTag::Crack ? "crack" : "filament"}});
    j["delamination"] = json::array();
    for (const auto& s : a.delamination) j["delamination"].push_back(ring_json({s.a, s.b}));
    j["snap_tol"] = dom.snap_tol;
    return j.dump(2) + "\n";
}

}  // namespace sdri
