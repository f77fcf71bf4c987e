#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sdri/error.hpp"
#include "sdri/io.hpp"

namespace sdri {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
    throw ConfigError(ErrorKind::ParseError, "field '" + field + "': " + what);
}

// Strict view of one JSON object: every key must be consumed.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) parse_fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    bool has(const std::string& k) {
        seen_.insert(k);
        return j_.contains(k) && !j_.at(k).is_null();
    }
    const json& at(const std::string& k) {
        seen_.insert(k);
        return j_.at(k);
    }

    double num(const std::string& k) {
        const json& v = at(k);
        if (!v.is_number()) parse_fail(field(k), "expected a number");
        return v.get<double>();
    }
    long long integer(const std::string& k) {
        const json& v = at(k);
        if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
        if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long long>(v.get<double>());
        parse_fail(field(k), "expected an integer");
    }
    std::uint64_t uinteger(const std::string& k) {
        const json& v = at(k);
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) return v.get<std::uint64_t>();
        parse_fail(field(k), "expected a nonnegative integer");
    }
    bool boolean(const std::string& k) {
        const json& v = at(k);
        if (!v.is_boolean()) parse_fail(field(k), "expected true or false");
        return v.get<bool>();
    }
    std::string str(const std::string& k) {
        const json& v = at(k);
        if (!v.is_string()) parse_fail(field(k), "expected a string");
        return v.get<std::string>();
    }

    std::optional<double> opt_num(const std::string& k) { return has(k) ? std::optional(num(k)) : std::nullopt; }

    void finish() const {
        std::string unknown;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) unknown += (unknown.empty() ? "" : ", ") + field(it.key());
        if (!unknown.empty()) throw ConfigError(ErrorKind::ParseError, "unknown key(s): " + unknown);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Vec2 point(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) parse_fail(field, "expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> numbers(const json& j, const std::string& field) {
    if (!j.is_array()) parse_fail(field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) parse_fail(field, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

json pt(Vec2 p) { return json::array({p.x, p.y}); }

ScaleGrid parse_grid(Obj o) {
    ScaleGrid g;
    g.origin = point(o.at("origin"), o.field("origin"));
    if (o.has("spacing")) g.spacing = point(o.at("spacing"), o.field("spacing"));
    g.nx = static_cast<int>(o.integer("nx"));
    g.ny = static_cast<int>(o.integer("ny"));
    g.values = numbers(o.at("values"), o.field("values"));
    o.finish();
    return g;
}

MaterialSpec parse_material(Obj o) {
    MaterialSpec m;
    if (o.has("voigt")) {
        const auto v = numbers(o.at("voigt"), o.field("voigt"));
        if (v.size() != 6) parse_fail(o.field("voigt"), "expected six entries D11 D12 D13 D22 D23 D33");
        Voigt d{};
        for (int i = 0; i < 6; ++i) d[i] = v[i];
        m.voigt = d;
    }
    if (o.has("lambda") || o.has("mu")) {
        Lame l;
        l.lambda = o.has("lambda") ? o.num("lambda") : 0.0;
        l.mu = o.has("mu") ? o.num("mu") : 0.0;
        m.lame = l;
    }
    o.finish();
    return m;
}

json material_json(const MaterialSpec& m) {
    json j = json::object();
    if (m.lame) {
        j["lambda"] = m.lame->lambda;
        j["mu"] = m.lame->mu;
    }
    if (m.voigt) j["voigt"] = *m.voigt;
    return j;
}

// Range checks collected across the whole config.
struct Violations {
    std::vector<std::string> list;
    void need(bool ok, const std::string& what) {
        if (!ok) list.push_back(what);
    }
};

void check_ranges(const RunConfig& c, Violations& v) {
    const auto& p = c.params;
    v.need(!c.preset.empty() || !c.geometry.empty(), "one of preset or geometry is required");
    if (!c.preset.empty()) {
        bool known = false;
        for (const auto& n : preset_names()) known = known || n == c.preset;
        v.need(known, "preset: unknown name '" + c.preset + "'");
    }
    if (p.v) v.need(*p.v > 0.0, "v: must be > 0");
    if (p.lambda) v.need(*p.lambda >= 0.0, "lambda: must be >= 0");
    if (p.m) v.need(*p.m >= 1, "m: must be >= 1");
    if (p.h) v.need(*p.h > 0.0, "h: must be > 0");
    if (p.gamma) v.need(*p.gamma > 0.0, "gamma: must be > 0");
    if (p.height) v.need(*p.height > 0.0, "height: must be > 0");
    if (p.gamma_f) v.need(*p.gamma_f > 0.0, "gamma_f: must be > 0");
    if (c.vertex_budget) v.need(*c.vertex_budget >= 3, "vertex_budget: must be >= 3");
    v.need(c.volume == "penalty" || c.volume == "constrained", "volume: must be penalty or constrained");
    if (c.phi) {
        const auto& f = *c.phi;
        v.need(f.family == "isotropic" || f.family == "elliptic" || f.family == "pnorm" || f.family == "crystalline",
               "phi.family: must be isotropic, elliptic, pnorm or crystalline");
        if (f.family == "isotropic") v.need(f.gamma > 0.0, "phi.gamma: must be > 0");
        if (f.family == "elliptic") v.need(f.a > 0.0 && f.b > 0.0, "phi.a, phi.b: must be > 0");
        if (f.family == "pnorm") v.need(f.p >= 1.0 && f.scale > 0.0, "phi.p: must be >= 1 with scale > 0");
        if (f.family == "crystalline") v.need(!f.forms.empty(), "phi.forms: at least one linear form");
        if (f.modulation) {
            const auto& g = *f.modulation;
            v.need(g.nx >= 1 && g.ny >= 1 && g.values.size() == static_cast<std::size_t>(g.nx) * g.ny,
                   "phi.modulation: values must hold nx * ny entries");
            v.need(g.spacing.x > 0.0 && g.spacing.y > 0.0, "phi.modulation.spacing: must be > 0");
            bool pos = true;
            for (double x : g.values) pos = pos && x > 0.0;
            v.need(pos, "phi.modulation.values: must be > 0");
        }
    }
    if (c.elastic && c.elastic->gauge)
        v.need(*c.elastic->gauge == "mean_rigid" || *c.elastic->gauge == "clamp_substrate_bottom",
               "elastic.gauge: must be mean_rigid or clamp_substrate_bottom");
    if (c.elastic)
        for (const auto* m : {&c.elastic->film, &c.elastic->substrate})
            if (*m) v.need((*m)->lame.has_value() != (*m)->voigt.has_value(), "elastic: give either lambda/mu or voigt per material");
    if (c.mismatch) v.need(!(c.mismatch->e0 && c.mismatch->affine), "mismatch: give either e0 or affine");

    const Schedule& s = c.schedule;
    v.need(s.iterations >= 0, "schedule.iterations: must be >= 0");
    v.need(s.t_start >= 0.0 && s.t_end >= 0.0, "schedule temperatures: must be >= 0");
    v.need(s.t_start == 0.0 || s.t_end > 0.0, "schedule.t_end: must be > 0 when annealing");
    v.need(s.sigma_start > 0.0 && s.sigma_end > 0.0, "schedule sigmas: must be > 0");
    v.need(s.batch >= 1, "schedule.batch: must be >= 1");
    v.need(s.threads >= 0, "schedule.threads: must be >= 0");
    v.need(s.time_limit >= 0.0, "schedule.time_limit: must be >= 0");
    v.need(s.stall >= 0, "schedule.stall: must be >= 0");
    const auto& w = s.weights;
    v.need(w.vertex_shift >= 0 && w.split_collapse >= 0 && w.slit >= 0 && w.delamination >= 0 && w.topology >= 0,
           "schedule.weights: must be >= 0");
    v.need(w.vertex_shift + w.split_collapse + w.slit + w.delamination + w.topology > 0.0,
           "schedule.weights: at least one must be positive");
    v.need(!c.output.empty(), "output: must not be empty");
    if (!c.geometry.empty()) {
        const auto path = c.base_dir / c.geometry;
        v.need(std::filesystem::exists(path), "geometry: file '" + path.string() + "' does not exist");
    }
}

RunConfig from_json(const json& root, const std::filesystem::path& base) {
    RunConfig c;
    c.base_dir = base;
    Obj o(root, "");
    if (o.has("preset")) c.preset = o.str("preset");
    if (o.has("geometry")) c.geometry = o.str("geometry");
    auto& p = c.params;
    p.v = o.opt_num("v");
    p.lambda = o.opt_num("lambda");
    if (o.has("m")) p.m = static_cast<int>(o.integer("m"));
    p.h = o.opt_num("h");
    p.gamma = o.opt_num("gamma");
    p.e0 = o.opt_num("e0");
    p.height = o.opt_num("height");
    p.gamma_f = o.opt_num("gamma_f");
    p.gamma_s = o.opt_num("gamma_s");
    p.gamma_fs = o.opt_num("gamma_fs");
    if (o.has("beta")) {
        const json& b = o.at("beta");
        if (b.is_number()) {
            p.beta = b.get<double>();
        } else if (b.is_array()) {
            for (std::size_t i = 0; i < b.size(); ++i) {
                Obj pc(b[i], "beta[" + std::to_string(i) + "]");
                AdhesionField::Piece piece;
                piece.seg.a = point(pc.at("from"), pc.field("from"));
                piece.seg.b = point(pc.at("to"), pc.field("to"));
                piece.beta = pc.num("beta");
                pc.finish();
                c.beta_pieces.push_back(piece);
            }
        } else {
            parse_fail("beta", "expected a number or a list of pieces");
        }
    }
    if (o.has("phi")) {
        Obj f(o.at("phi"), "phi");
        PhiSpec s;
        if (f.has("family")) s.family = f.str("family");
        if (f.has("gamma")) s.gamma = f.num("gamma");
        if (f.has("a")) s.a = f.num("a");
        if (f.has("b")) s.b = f.num("b");
        if (f.has("p")) s.p = f.num("p");
        if (f.has("scale")) s.scale = f.num("scale");
        if (f.has("forms")) {
            const json& fs = f.at("forms");
            if (!fs.is_array()) parse_fail("phi.forms", "expected a list of [x, y]");
            for (const auto& x : fs) s.forms.push_back(point(x, "phi.forms"));
        }
        if (f.has("modulation")) s.modulation = parse_grid(Obj(f.at("modulation"), "phi.modulation"));
        f.finish();
        c.phi = s;
    }
    if (o.has("elastic")) {
        Obj e(o.at("elastic"), "elastic");
        ElasticSpec s;
        if (e.has("film")) s.film = parse_material(Obj(e.at("film"), "elastic.film"));
        if (e.has("substrate")) s.substrate = parse_material(Obj(e.at("substrate"), "elastic.substrate"));
        if (e.has("scalar_mode")) s.scalar_mode = e.boolean("scalar_mode");
        if (e.has("gauge")) s.gauge = e.str("gauge");
        e.finish();
        c.elastic = s;
    }
    if (o.has("mismatch")) {
        Obj m(o.at("mismatch"), "mismatch");
        MismatchConfig s;
        s.e0 = m.opt_num("e0");
        if (m.has("affine")) {
            const auto g = numbers(m.at("affine"), "mismatch.affine");
            if (g.size() != 4) parse_fail("mismatch.affine", "expected [g11, g12, g21, g22]");
            s.affine = std::array<double, 4>{g[0], g[1], g[2], g[3]};
        }
        m.finish();
        c.mismatch = s;
    }
    if (o.has("volume")) c.volume = o.str("volume");
    if (o.has("vertex_budget")) c.vertex_budget = static_cast<int>(o.integer("vertex_budget"));
    if (o.has("seed")) c.seed = o.uinteger("seed");
    if (o.has("schedule")) {
        Obj s(o.at("schedule"), "schedule");
        Schedule& d = c.schedule;
        if (s.has("iterations")) d.iterations = static_cast<int>(s.integer("iterations"));
        if (s.has("t_start")) d.t_start = s.num("t_start");
        if (s.has("t_end")) d.t_end = s.num("t_end");
        if (s.has("sigma_start")) d.sigma_start = s.num("sigma_start");
        if (s.has("sigma_end")) d.sigma_end = s.num("sigma_end");
        if (s.has("greedy")) d.greedy = s.boolean("greedy");
        if (s.has("batch")) d.batch = static_cast<int>(s.integer("batch"));
        if (s.has("threads")) d.threads = static_cast<int>(s.integer("threads"));
        if (s.has("time_limit")) d.time_limit = s.num("time_limit");
        if (s.has("stall")) d.stall = static_cast<int>(s.integer("stall"));
        if (s.has("timing")) d.timing = s.boolean("timing");
        if (s.has("weights")) {
            Obj w(s.at("weights"), "schedule.weights");
            auto& mw = d.weights;
            if (w.has("vertex_shift")) mw.vertex_shift = w.num("vertex_shift");
            if (w.has("split_collapse")) mw.split_collapse = w.num("split_collapse");
            if (w.has("slit")) mw.slit = w.num("slit");
            if (w.has("delamination")) mw.delamination = w.num("delamination");
            if (w.has("topology")) mw.topology = w.num("topology");
            w.finish();
        }
        s.finish();
    }
    if (o.has("output")) c.output = o.str("output");
    if (o.has("emit")) {
        Obj e(o.at("emit"), "emit");
        if (e.has("svg")) c.emit_svg = e.boolean("svg");
        if (e.has("mesh_dump")) c.emit_mesh = e.boolean("mesh_dump");
        if (e.has("trace")) c.emit_trace = e.boolean("trace");
        e.finish();
    }
    o.finish();

    Violations v;
    check_ranges(c, v);
    if (!v.list.empty()) {
        std::string msg;
        for (const auto& s : v.list) msg += (msg.empty() ? "" : "; ") + s;
        throw ConfigError(ErrorKind::ValidationError, msg);
    }
    return c;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // Byte offset to line and column.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                                     ": malformed JSON");
    }
    return from_json(root, base_dir);
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ErrorKind::ParseError, "cannot read config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path());
}

std::string config_to_json(const RunConfig& c) {
    json j = json::object();
    if (!c.preset.empty()) j["preset"] = c.preset;
    if (!c.geometry.empty()) j["geometry"] = c.geometry;
    const auto& p = c.params;
    auto put = [&](const char* k, const std::optional<double>& x) {
        if (x) j[k] = *x;
    };
    put("v", p.v);
    put("lambda", p.lambda);
    if (p.m) j["m"] = *p.m;
    put("h", p.h);
    put("gamma", p.gamma);
    put("e0", p.e0);
    put("height", p.height);
    put("gamma_f", p.gamma_f);
    put("gamma_s", p.gamma_s);
    put("gamma_fs", p.gamma_fs);
    if (!c.beta_pieces.empty()) {
        json b = json::array();
        for (const auto& pc : c.beta_pieces) b.push_back({{"from", pt(pc.seg.a)}, {"to", pt(pc.seg.b)}, {"beta", pc.beta}});
        j["beta"] = b;
    } else if (p.beta) {
        j["beta"] = *p.beta;
    }
    if (c.phi) {
        const auto& f = *c.phi;
        json o = {{"family", f.family}};
        if (f.family == "isotropic") o["gamma"] = f.gamma;
        if (f.family == "elliptic") {
            o["a"] = f.a;
            o["b"] = f.b;
        }
        if (f.family == "pnorm") {
            o["p"] = f.p;
            o["scale"] = f.scale;
        }
        if (f.family == "crystalline") {
            json fs = json::array();
            for (const auto& x : f.forms) fs.push_back(pt(x));
            o["forms"] = fs;
        }
        if (f.modulation) {
            const auto& g = *f.modulation;
            o["modulation"] = {{"origin", pt(g.origin)}, {"spacing", pt(g.spacing)}, {"nx", g.nx}, {"ny", g.ny}, {"values", g.values}};
        }
        j["phi"] = o;
    }
    if (c.elastic) {
        json e = json::object();
        if (c.elastic->film) e["film"] = material_json(*c.elastic->film);
        if (c.elastic->substrate) e["substrate"] = material_json(*c.elastic->substrate);
        if (c.elastic->scalar_mode) e["scalar_mode"] = *c.elastic->scalar_mode;
        if (c.elastic->gauge) e["gauge"] = *c.elastic->gauge;
        j["elastic"] = e;
    }
    if (c.mismatch) {
        json m = json::object();
        if (c.mismatch->e0) m["e0"] = *c.mismatch->e0;
        if (c.mismatch->affine) m["affine"] = *c.mismatch->affine;
        j["mismatch"] = m;
    }
    j["volume"] = c.volume;
    if (c.vertex_budget) j["vertex_budget"] = *c.vertex_budget;
    j["seed"] = c.seed;
    const Schedule& s = c.schedule;
    j["schedule"] = {{"iterations", s.iterations},
                     {"t_start", s.t_start},
                     {"t_end", s.t_end},
                     {"sigma_start", s.sigma_start},
                     {"sigma_end", s.sigma_end},
                     {"greedy", s.greedy},
                     {"batch", s.batch},
                     {"threads", s.threads},
                     {"time_limit", s.time_limit},
                     {"stall", s.stall},
                     {"timing", s.timing},
                     {"weights",
                      {{"vertex_shift", s.weights.vertex_shift},
                       {"split_collapse", s.weights.split_collapse},
                       {"slit", s.weights.slit},
                       {"delamination", s.weights.delamination},
                       {"topology", s.weights.topology}}}};
    j["output"] = c.output;
    j["emit"] = {{"svg", c.emit_svg}, {"mesh_dump", c.emit_mesh}, {"trace", c.emit_trace}};
    return j.dump(2) + "\n";
}

// Problem construction -------------------------------------------------------------

AnisotropyField PhiSpec::build() const {
    AnisotropyField f = AnisotropyField::isotropic(gamma);
    if (family == "elliptic") f = AnisotropyField::elliptic(a, b);
    if (family == "pnorm") f = AnisotropyField::pnorm(p, scale);
    if (family == "crystalline") f = AnisotropyField::crystalline(forms);
    return modulation ? f.modulated(*modulation) : f;
}

Voigt MaterialSpec::build() const { return voigt ? *voigt : isotropic_voigt(lame.value_or(Lame{})); }

Problem build_problem(const RunConfig& c) {
    Problem p;
    if (!c.preset.empty()) {
        PresetParams o = c.params;
        if (c.elastic && c.elastic->film && c.elastic->film->lame) o.film = c.elastic->film->lame;
        if (c.elastic && c.elastic->substrate && c.elastic->substrate->lame) o.substrate = c.elastic->substrate->lame;
        p = make_preset(c.preset, o);
    } else {
        p.preset = "custom";
        p.v = c.params.v.value_or(1.0);
        p.lambda = c.params.lambda.value_or(10.0);
        p.m = c.params.m.value_or(1);
        p.elastic.tensor = ElasticTensor::zero();
        if (c.params.h) p.elastic.h = *c.params.h;
        if (c.params.gamma) p.phi = AnisotropyField::isotropic(*c.params.gamma);
        if (c.params.e0) p.elastic.mismatch = MismatchSpec::lattice(*c.params.e0);
    }
    if (!c.geometry.empty()) {
        const GeometryFile g = read_geometry(c.base_dir / c.geometry);
        if (c.preset.empty()) {
            p.domain = g.domain;
            if (!c.params.v) p.v = area(g.crystal);
            if (!c.params.m) p.m = std::max(1, component_count(g.crystal, p.domain.snap_tol));
            p.beta = AdhesionField::constant(p.domain, c.params.beta.value_or(0.0));
        }
        // A preset keeps its domain; the file then only supplies the start.
        p.init = g.crystal;
        p.init_for_m = nullptr;
    }
    if (c.phi) p.phi = c.phi->build();
    if (!c.beta_pieces.empty()) p.beta = AdhesionField::from_pieces(c.beta_pieces, p.domain.snap_tol);
    if (c.elastic) {
        const auto& e = *c.elastic;
        if (p.elastic.tensor.is_zero() && (e.film || e.substrate)) p.elastic.tensor = ElasticTensor::isotropic({}, {});
        if (e.film) p.elastic.tensor.film = e.film->build();
        if (e.substrate) p.elastic.tensor.substrate = e.substrate->build();
        if (e.scalar_mode) p.elastic.tensor.scalar_mode = *e.scalar_mode;
        if (e.gauge) p.elastic.gauge = *e.gauge == "clamp_substrate_bottom" ? Gauge::ClampSubstrateBottom : Gauge::MeanRigid;
    }
    if (c.mismatch) {
        if (c.mismatch->e0) p.elastic.mismatch = MismatchSpec::lattice(*c.mismatch->e0);
        if (c.mismatch->affine) {
            const auto& g = *c.mismatch->affine;
            p.elastic.mismatch = MismatchSpec::affine(g[0], g[1], g[2], g[3]);
        }
    }
    if (c.vertex_budget) p.vertex_budget = *c.vertex_budget;
    p.volume = c.volume == "constrained" ? VolumeMode::Constrained : VolumeMode::Penalty;
    p.validate();
    return p;
}

}  // namespace sdri
