#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sdri/io.hpp"

namespace sdri {

using json = nlohmann::ordered_json;

namespace {

// Shortest text that reads back to the same double.
std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json ring_json(const Ring& r) {
    json a = json::array();
    for (auto p : r) a.push_back(json::array({p.x, p.y}));
    return a;
}

struct ClassStyle {
    const char* color;
    const char* dash;  // empty for solid
    const char* legend;
};

// Legend text names the energy term each class carries.
const ClassStyle kStyle[kArcClassCount] = {
    {"#1f4e9c", "", "free boundary: phi(x, nu)"},
    {"#c0392b", "6 3", "crack: 2 phi(x, nu)"},
    {"#8e44ad", "2 3", "filament: 2 phi(x, nu)"},
    {"#16a085", "8 3 2 3", "wetting layer: phi(x, nu) + beta"},
    {"#e67e22", "", "contact: beta"},
    {"#7f8c8d", "", "delamination: phi(x, nu_Sigma)"},
};

}  // namespace

void write_breakdown_csv(std::ostream& os, const std::vector<EnergyBreakdown>& rows) {
    os << "free_boundary,cracks,filaments,wetting,contact,delamination,elastic,penalty,total\n";
    for (const auto& e : rows)
        os << num(e.free_boundary) << ',' << num(e.cracks) << ',' << num(e.filaments) << ',' << num(e.wetting) << ','
           << num(e.contact) << ',' << num(e.delamination) << ',' << num(e.elastic) << ',' << num(e.penalty) << ','
           << num(e.total()) << '\n';
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
    os << "iter,accepted,move_kind,F,F_lambda,area,components,elapsed_ms\n";
    for (const auto& r : rows)
        os << r.iter << ',' << (r.accepted ? 1 : 0) << ',' << to_string(r.move) << ',' << num(r.f) << ',' << num(r.f_lambda)
           << ',' << num(r.area) << ',' << r.components << ',' << num(r.elapsed_ms) << '\n';
}

std::string final_geometry_json(const Problem& p, const FreeCrystal& a, const EnergyBreakdown& e, RunStatus status) {
    json j;
    j["preset"] = p.preset;
    j["status"] = std::string(to_string(status));
    j["geometry"] = json::parse(geometry_to_json(p.domain, a));
    j["energy"] = {{"free_boundary", e.free_boundary}, {"cracks", e.cracks},   {"filaments", e.filaments},
                   {"wetting", e.wetting},             {"contact", e.contact}, {"delamination", e.delamination},
                   {"elastic", e.elastic},             {"penalty", e.penalty}, {"surface", e.surface()},
                   {"F", e.energy()},                  {"F_lambda", e.total()}};
    const auto totals = class_totals(classify_boundary(a, p.domain));
    json len = json::object();
    for (std::size_t c = 0; c < kArcClassCount; ++c) len[std::string(to_string(static_cast<ArcClass>(c)))] = totals.length[c];
    j["class_lengths"] = len;
    j["area"] = area(a);
    j["v"] = p.v;
    j["components"] = component_count(a, p.domain.snap_tol);
    // Arcs whose weighting is a modelling choice rather than forced by the functional.
    j["flags"] = {{"wall_arcs", e.wall_arcs}, {"corner_incidences", e.corner_incidences}};
    return j.dump(2) + "\n";
}

std::string snapshot_svg(const Domain& dom, const FreeCrystal& a) {
    BoundingBox bb = dom.bbox();
    for (const auto& c : a.components)
        for (auto q : c.outer) bb.expand(q);
    const double w = std::max(bb.hi.x - bb.lo.x, 1e-12), h = std::max(bb.hi.y - bb.lo.y, 1e-12);
    const double pad = 0.05 * std::max(w, h);
    const double width = 800.0, scale = width / (w + 2 * pad);
    const double legend_h = 22.0 * kArcClassCount + 10.0;
    const double height = (h + 2 * pad) * scale;
    auto X = [&](double x) { return (x - bb.lo.x + pad) * scale; };
    auto Y = [&](double y) { return (bb.hi.y - y + pad) * scale; };
    auto f = [](double x) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(3) << x;
        return s.str();
    };
    auto poly_points = [&](const Ring& r) {
        std::string s;
        for (auto q : r) s += f(X(q.x)) + "," + f(Y(q.y)) + " ";
        if (!s.empty()) s.pop_back();
        return s;
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f(width) << "\" height=\"" << f(height + legend_h)
       << "\" viewBox=\"0 0 " << f(width) << " " << f(height + legend_h) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<g id=\"domain\">\n";
    os << "<polygon class=\"container\" points=\"" << poly_points(dom.container.outer)
       << "\" fill=\"#f7f7f7\" stroke=\"#999\" stroke-width=\"1\"/>\n";
    for (const auto& s : dom.substrates)
        os << "<polygon class=\"substrate\" points=\"" << poly_points(s.outer)
           << "\" fill=\"#d9cbb0\" stroke=\"#8b7d62\" stroke-width=\"1\"/>\n";
    for (const auto& c : a.components) {
        os << "<polygon class=\"crystal\" points=\"" << poly_points(c.outer) << "\" fill=\"#cfe0f7\" stroke=\"none\"/>\n";
        for (const auto& hole : c.holes)
            os << "<polygon class=\"crystal-hole\" points=\"" << poly_points(hole) << "\" fill=\"#f7f7f7\" stroke=\"none\"/>\n";
    }
    os << "</g>\n";

    std::string d[kArcClassCount];
    for (const auto& arc : classify_boundary(a, dom)) {
        auto& s = d[static_cast<std::size_t>(arc.cls)];
        s += "M" + f(X(arc.segment.a.x)) + " " + f(Y(arc.segment.a.y)) + "L" + f(X(arc.segment.b.x)) + " " +
             f(Y(arc.segment.b.y));
    }
    os << "<g id=\"arcs\" fill=\"none\" stroke-width=\"2\" stroke-linecap=\"round\">\n";
    for (std::size_t c = 0; c < kArcClassCount; ++c) {
        if (d[c].empty()) continue;
        os << "<path class=\"" << to_string(static_cast<ArcClass>(c)) << "\" stroke=\"" << kStyle[c].color << "\"";
        if (*kStyle[c].dash) os << " stroke-dasharray=\"" << kStyle[c].dash << "\"";
        os << " d=\"" << d[c] << "\"/>\n";
    }
    os << "</g>\n";

    os << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"13\">\n";
    double y = height + 18.0;
    for (std::size_t c = 0; c < kArcClassCount; ++c) {
        if (d[c].empty()) continue;
        os << "<line x1=\"10\" y1=\"" << f(y - 4) << "\" x2=\"40\" y2=\"" << f(y - 4) << "\" stroke=\"" << kStyle[c].color
           << "\" stroke-width=\"2\"";
        if (*kStyle[c].dash) os << " stroke-dasharray=\"" << kStyle[c].dash << "\"";
        os << "/><text x=\"48\" y=\"" << f(y) << "\">" << kStyle[c].legend << "</text>\n";
        y += 22.0;
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string mesh_json(const ElasticState& st) {
    json j;
    j["energy"] = st.energy;
    j["energy_film"] = st.energy_film;
    j["energy_substrate"] = st.energy_substrate;
    j["residual"] = st.residual;
    j["iterative"] = st.iterative;
    if (!st.mesh) {
        j["points"] = json::array();
        j["triangles"] = json::array();
        return j.dump() + "\n";
    }
    const Mesh& m = *st.mesh;
    j["h"] = m.h;
    j["points"] = ring_json(m.points);
    json t = json::array(), r = json::array(), tn = json::array();
    for (std::size_t i = 0; i < m.tris.size(); ++i) {
        t.push_back(m.tris[i]);
        r.push_back(m.region[i] == Region::Film ? "film" : "substrate");
        tn.push_back(m.tri_nodes[i]);
    }
    j["triangles"] = t;
    j["region"] = r;
    j["node_point"] = m.node_point;
    j["triangle_nodes"] = tn;
    j["cut_edges"] = m.cut_edges;
    j["displacement"] = st.u;
    return j.dump() + "\n";
}

std::string probe_reports_json(const std::vector<ProbeReport>& reports) {
    json a = json::array();
    bool all = true;
    for (const auto& r : reports) {
        json vals = json::array();
        for (const auto& v : r.values)
            vals.push_back({{"label", v.label},
                            {"measured", v.measured},
                            {"oracle", v.oracle},
                            {"tolerance", v.tolerance},
                            {"passed", v.passed}});
        a.push_back({{"name", r.name}, {"passed", r.passed()}, {"note", r.note}, {"values", vals}});
        all = all && r.passed();
    }
    json j = {{"passed", all}, {"reports", a}};
    return j.dump(2) + "\n";
}

void print_probe_table(std::ostream& os, const std::vector<ProbeReport>& reports) {
    std::size_t wl = 5;
    for (const auto& r : reports)
        for (const auto& v : r.values) wl = std::max(wl, r.name.size() + 1 + v.label.size());
    os << std::left << std::setw(static_cast<int>(wl)) << "probe" << "  " << std::setw(14) << "measured" << std::setw(14)
       << "oracle" << std::setw(12) << "tol" << "result\n";
    for (const auto& r : reports) {
        for (const auto& v : r.values) {
            std::ostringstream m, o, t;
            m << std::setprecision(8) << v.measured;
            o << std::setprecision(8) << v.oracle;
            t << std::setprecision(3) << v.tolerance;
            os << std::setw(static_cast<int>(wl)) << (r.name + "/" + v.label) << "  " << std::setw(14) << m.str()
               << std::setw(14) << o.str() << std::setw(12) << t.str() << (v.passed ? "ok" : "FAIL") << '\n';
        }
        if (!r.note.empty()) os << "  " << r.name << ": " << r.note << '\n';
    }
    const auto failed = std::count_if(reports.begin(), reports.end(), [](const ProbeReport& r) { return !r.passed(); });
    os << reports.size() - failed << "/" << reports.size() << " probes passed\n";
}

}  // namespace sdri
