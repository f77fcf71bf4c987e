#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdri/error.hpp"
#include "sdri/scenarios.hpp"

namespace sdri {

namespace {

PolygonWithHoles poly(Ring r) {
    PolygonWithHoles p{std::move(r), {}};
    p.normalize();
    return p;
}

Problem capillary(const PresetParams& o) {
    Problem p;
    p.preset = "capillary";
    p.domain = build_domain(poly(make_rectangle({-3.0, -3.0}, {3.0, 3.0})), {});
    p.phi = AnisotropyField::isotropic(o.gamma.value_or(1.0));
    p.v = o.v.value_or(std::numbers::pi);
    p.lambda = o.lambda.value_or(10.0);
    p.m = o.m.value_or(1);
    p.elastic.tensor = ElasticTensor::zero();
    p.init_for_m = [v = p.v](int) {
        const double s = 0.5 * std::sqrt(v);
        FreeCrystal a;
        a.components.push_back(poly(make_subdivided_rectangle({-s, -s}, {s, s}, 64)));
        return a;
    };
    p.init = p.init_for_m(p.m);
    return p;
}

Problem thin_film(const PresetParams& o) {
    Problem p;
    p.preset = "thin_film";
    const double a = 0.0, b = 4.0;
    const double h = o.height.value_or(2.0);
    p.domain = build_domain(poly(make_rectangle({a, 0.0}, {b, h})), {poly(make_rectangle({a, -h}, {b, 0.0}))});
    const double gf = o.gamma_f.value_or(1.0);
    p.phi = AnisotropyField::isotropic(o.gamma.value_or(gf));
    p.beta = AdhesionField::constant(
        p.domain, o.beta.value_or(thin_film_beta(gf, o.gamma_s.value_or(1.2), o.gamma_fs.value_or(0.1))));
    p.v = o.v.value_or(0.5);
    p.lambda = o.lambda.value_or(10.0);
    p.m = o.m.value_or(1);
    p.elastic.tensor = ElasticTensor::isotropic(o.film.value_or(Lame{1.0, 1.0}), o.substrate.value_or(Lame{1.0, 1.0}));
    p.elastic.mismatch = MismatchSpec::lattice(o.e0.value_or(0.02));
    p.elastic.h = o.h.value_or(0.2);
    p.filter = subgraph_filter(0.0);
    p.filter_name = "subgraph";
    p.init_for_m = [a, b, v = p.v](int) {
        FreeCrystal c;
        c.components.push_back(poly(densify(make_rectangle({a, 0.0}, {b, v / (b - a)}), 0.1)));
        return c;
    };
    p.init = p.init_for_m(p.m);
    return p;
}

Problem crystal_cavity(const PresetParams& o) {
    Problem p;
    p.preset = "crystal_cavity";
    const Ring cavity = make_regular_polygon({0.0, 0.0}, 1.0, 64);
    PolygonWithHoles shell{make_regular_polygon({0.0, 0.0}, 1.5, 64), {cavity}};
    shell.normalize();
    p.domain = build_domain(poly(cavity), {shell});
    p.phi = AnisotropyField::isotropic(o.gamma.value_or(1.0));
    p.beta = AdhesionField::constant(p.domain, o.beta.value_or(0.0));
    const double full = area(p.domain.container);
    p.v = o.v.value_or(0.9 * full);
    p.lambda = o.lambda.value_or(10.0);
    p.m = o.m.value_or(1);
    p.elastic.tensor = ElasticTensor::isotropic(o.film.value_or(Lame{1.0, 1.0}), o.substrate.value_or(Lame{1.0, 1.0}));
    p.elastic.mismatch = MismatchSpec::lattice(o.e0.value_or(0.01));
    p.elastic.h = o.h.value_or(0.15);
    p.filter = starshaped_filter({0.0, 0.0});
    p.filter_name = "starshaped";
    p.init_for_m = [cavity](int) {
        FreeCrystal c;
        c.components.push_back(poly(cavity));
        return c;
    };
    p.init = p.init_for_m(p.m);
    return p;
}

Problem griffith(const PresetParams& o, bool scalar) {
    Problem p;
    p.preset = scalar ? "mumford_shah" : "griffith";
    const Vec2 lo{0.0, 0.0}, hi{2.0, 1.0};
    p.domain = build_domain(poly(make_rectangle(lo, hi)), {});
    p.phi = AnisotropyField::isotropic(o.gamma.value_or(1.0));
    p.v = o.v.value_or(2.0);
    p.lambda = o.lambda.value_or(10.0);
    p.m = o.m.value_or(2);
    p.elastic.tensor = scalar ? ElasticTensor::scalar_identity()
                              : ElasticTensor::isotropic(o.film.value_or(Lame{1.0, 1.0}), Lame{1.0, 1.0});
    const double e0 = o.e0.value_or(0.0);
    if (e0 != 0.0) p.elastic.mismatch = MismatchSpec::lattice(e0);
    p.elastic.h = o.h.value_or(0.1);
    p.init_for_m = [lo, hi](int) {
        FreeCrystal c;
        c.components.push_back(poly(make_subdivided_rectangle(lo, hi, 8)));
        return c;
    };
    p.init = p.init_for_m(p.m);
    return p;
}

Problem delamination(const PresetParams& o) {
    Problem p;
    p.preset = "delamination";
    p.domain = build_domain(poly(make_rectangle({-0.5, 0.0}, {4.5, 2.0})), {poly(make_rectangle({-0.5, -1.0}, {4.5, 0.0}))});
    const double gf = o.gamma_f.value_or(1.0);
    p.phi = AnisotropyField::isotropic(o.gamma.value_or(gf));
    double beta = 0.0;
    if (o.gamma_s || o.gamma_fs) beta = thin_film_beta(gf, o.gamma_s.value_or(1.2), o.gamma_fs.value_or(0.1));
    p.beta = AdhesionField::constant(p.domain, o.beta.value_or(beta));
    p.v = o.v.value_or(4.0);
    p.lambda = o.lambda.value_or(10.0);
    p.m = o.m.value_or(1);
    const Lame film = o.film.value_or(Lame{1.0, 1.0});
    p.elastic.tensor = ElasticTensor::isotropic(film, o.substrate.value_or(Lame{10.0 * film.lambda, 10.0 * film.mu}));
    p.elastic.mismatch = MismatchSpec::lattice(o.e0.value_or(0.01));
    p.elastic.gauge = Gauge::ClampSubstrateBottom;
    p.elastic.h = o.h.value_or(0.25);
    p.init_for_m = [](int) {
        FreeCrystal c;
        c.components.push_back(poly(make_subdivided_rectangle({0.0, 0.0}, {4.0, 1.0}, 8)));
        return c;
    };
    p.init = p.init_for_m(p.m);
    return p;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"thin_film", "crystal_cavity", "capillary",
                                                "griffith", "mumford_shah", "delamination"};
    return names;
}

Problem make_preset(std::string_view name, const PresetParams& o) {
    if (name == "capillary") return capillary(o);
    if (name == "thin_film") return thin_film(o);
    if (name == "crystal_cavity") return crystal_cavity(o);
    if (name == "griffith") return griffith(o, false);
    if (name == "mumford_shah") return griffith(o, true);
    if (name == "delamination") return delamination(o);
    throw ConfigError(ErrorKind::UnknownPreset, "unknown preset '" + std::string(name) + "'");
}

MoveFilter subgraph_filter(double base) {
    return [base](const FreeCrystal& a, const Domain& dom) -> std::optional<std::string> {
        const double tol = 1e3 * dom.snap_tol;
        if (a.components.size() > 1) return "subgraph: more than one component";
        for (const auto& s : a.slits) {
            if (s.tag != SlitTag::Crack) return "subgraph: filament";
            for (const auto& v : s.vertices)
                if (std::abs(v.x - s.vertices.front().x) > tol) return "subgraph: crack not vertical";
        }
        if (a.components.empty()) return std::nullopt;
        const auto& c = a.components.front();
        if (!c.holes.empty()) return "subgraph: hole";
        const Ring& r = c.outer;
        const std::size_t n = r.size();
        auto on_base = [&](std::size_t i) { return std::abs(r[i].y - base) <= tol; };
        for (const auto& p : r)
            if (p.y < base - tol) return "subgraph: below Sigma";
        // Base vertices must form one contiguous run; the rest is the graph.
        std::size_t start = n;
        for (std::size_t i = 0; i < n; ++i)
            if (on_base(i) && !on_base((i + n - 1) % n)) {
                if (start != n) return "subgraph: base touched twice";
                start = i;
            }
        if (start == n) return "subgraph: not attached to Sigma";
        std::size_t i = start;
        while (on_base((i + 1) % n) && (i + 1) % n != start) i = (i + 1) % n;
        // Ring is counter-clockwise, so the top chain runs right to left.
        for (std::size_t k = i; (k + 1) % n != start; k = (k + 1) % n)
            if (r[(k + 1) % n].x > r[k].x + tol) return "subgraph: top not a graph";
        return std::nullopt;
    };
}

MoveFilter starshaped_filter(Vec2 origin) {
    return [origin](const FreeCrystal& a, const Domain& dom) -> std::optional<std::string> {
        const double tol = 1e3 * dom.snap_tol;
        if (a.components.size() != 1) return "starshaped: need exactly one component";
        if (!a.slits.empty()) return "starshaped: slit";
        const auto& c = a.components.front();
        if (!c.holes.empty()) return "starshaped: hole";
        const Ring& r = c.outer;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const Vec2 p = r[i], q = r[(i + 1) % r.size()];
            if (cross(q - p, origin - p) < -tol * norm(q - p)) return "starshaped: edge hides the origin";
        }
        return std::nullopt;
    };
}

Ring densify(const Ring& r, double max_edge) {
    Ring out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Vec2 a = r[i], b = r[(i + 1) % r.size()];
        const int k = std::max(1, static_cast<int>(std::ceil(distance(a, b) / max_edge)));
        for (int j = 0; j < k; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / k));
    }
    return out;
}

Problem two_well_problem(double v, double lambda) {
    Problem p;
    p.preset = "two_well";
    const Ring wells{{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.45}, {2.0, 0.45}, {2.0, 0.0}, {3.0, 0.0},
                     {3.0, 1.0}, {2.0, 1.0}, {2.0, 0.55}, {1.0, 0.55}, {1.0, 1.0}, {0.0, 1.0}};
    p.domain = build_domain(poly(wells), {});
    p.v = v;
    p.lambda = lambda;
    p.m = 1;
    p.elastic.tensor = ElasticTensor::zero();
    p.init_for_m = [v](int m) {
        FreeCrystal c;
        if (m < 2) {
            // Dumbbell threading the corridor.
            const Ring bell{{0.1, 0.1}, {0.9, 0.1}, {0.9, 0.47}, {2.1, 0.47}, {2.1, 0.1}, {2.9, 0.1},
                            {2.9, 0.9}, {2.1, 0.9}, {2.1, 0.53}, {0.9, 0.53}, {0.9, 0.9}, {0.1, 0.9}};
            c.components.push_back(poly(densify(bell, 0.05)));
        } else {
            const double r = std::min(0.45, std::sqrt(0.5 * v / std::numbers::pi));
            c.components.push_back(poly(make_regular_polygon({0.5, 0.5}, r, 64)));
            c.components.push_back(poly(make_regular_polygon({2.5, 0.5}, r, 64)));
        }
        return c;
    };
    p.init = p.init_for_m(p.m);
    return p;
}

}  // namespace sdri
