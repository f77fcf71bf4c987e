// Runs the ten acceptance criteria and prints one [PASS]/[FAIL] line each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <unistd.h>

#include "sdri/error.hpp"
#include "sdri/io.hpp"

using namespace sdri;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    // Records a check; the first failing one is named in the detail line.
    void need(bool cond, const std::string& what) {
        if (!cond && ok) detail << " first failure: " << what << ";";
        ok = ok && cond;
    }
};

PolygonWithHoles poly(Ring r) {
    PolygonWithHoles p{std::move(r), {}};
    p.normalize();
    return p;
}

FreeCrystal one(Ring r) {
    FreeCrystal a;
    a.components.push_back(poly(std::move(r)));
    return a;
}

Schedule budget(int iterations) {
    Schedule s;
    s.iterations = iterations;
    s.threads = 1;
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// AC1 --------------------------------------------------------------------------
void surface_identities(Outcome& o) {
    const Domain dom = build_domain(poly(make_rectangle({-2, -2}, {2, 2})), {});
    const auto phi = AnisotropyField::isotropic(1.0);
    FreeCrystal sq = one(make_rectangle({0, 0}, {1, 1}));
    const double base = surface_energy(sq, dom, phi, AdhesionField{}).total();
    o.detail << " square " << base << ";";
    o.need(std::abs(base - 4.0) <= 1e-12, "unit square energy is 4");
    for (double L : {0.25, 0.5, 0.7}) {
        FreeCrystal cracked = sq;
        cracked.slits.push_back({{{0.15, 0.5}, {0.15 + L, 0.5}}, SlitTag::Crack});
        const double d = surface_energy(cracked, dom, phi, AdhesionField{}).total() - base;
        o.need(std::abs(d - 2.0 * L) <= 1e-12, "interior slit adds 2L");
    }
    o.detail << " slit increments 2L to 1e-12;";
}

// AC2 --------------------------------------------------------------------------
void hypothesis_gate(Outcome& o) {
    // beta above the norm on part of Sigma: refused before the first evaluation.
    PresetParams pp;
    pp.beta = 1.5;
    const Problem bad = make_preset("thin_film", pp);
    bool refused = false;
    try {
        minimize(bad, budget(10), 1);
    } catch (const HypothesisError&) {
        refused = true;
    }
    o.need(refused, "uniform beta = 1.5 refused by minimize");

    Problem local = make_preset("thin_film");
    local.beta = AdhesionField::from_pieces({{{{0, 0}, {3.9, 0}}, 0.2}, {{{3.9, 0}, {4, 0}}, -1.01}}, 1e-9);
    bool refused_local = false;
    try {
        local.validate();
    } catch (const HypothesisError&) {
        refused_local = true;
    }
    o.need(refused_local, "violation on a short piece refused");

    bool refused_cfg = false;
    try {
        build_problem(parse_config_text(R"({"preset": "delamination", "beta": -1.2})"));
    } catch (const HypothesisError& e) {
        refused_cfg = exit_code(e) == 2;
    }
    o.need(refused_cfg, "config with |beta| > phi exits with code 2");

    const Domain dom = make_preset("thin_film").domain;
    const AdhesionField zero = AdhesionField::constant(dom, 0.0);
    const std::vector<std::pair<std::string, AnisotropyField>> fams{
        {"isotropic", AnisotropyField::isotropic(1.3)},
        {"elliptic", AnisotropyField::elliptic(2.0, 0.5)},
        {"pnorm", AnisotropyField::pnorm(3.0, 1.0)},
        {"crystalline", AnisotropyField::crystalline({{1, 0}, {0.5, std::sqrt(3.0) / 2}, {-0.5, std::sqrt(3.0) / 2}})},
    };
    for (const auto& [name, phi] : fams) {
        const auto r = validate_hypotheses(phi, zero, dom);
        o.need(r.h1_passed, name + " norm axioms");
    }
    o.detail << " beta gate and four norm families checked;";
}

// AC3 --------------------------------------------------------------------------
void elasticity(Outcome& o) {
    const Domain box = build_domain(poly(make_rectangle({-2, -2}, {2, 2})), {});
    const auto sq = one(make_rectangle({0, 0}, {1, 1}));
    const ElasticTensor c = ElasticTensor::isotropic({1.0, 1.0}, {1.0, 1.0});
    auto mesh = std::make_shared<const Mesh>(triangulate(sq, box, 0.2));

    const auto s0 = solve_elastic(mesh, c, MismatchSpec::zero());
    o.detail << " E0=0 energy " << s0.energy << ";";
    o.need(s0.energy <= 1e-12, "zero mismatch gives zero energy");

    const auto e0 = MismatchSpec::affine(0.02, 0.01, -0.03, 0.015);
    const auto sa = solve_elastic(mesh, c, e0);
    const double ref = elastic_energy(*mesh, c, e0, std::vector<double>(sa.u.size(), 0.0));
    o.detail << " affine relative " << sa.energy / ref << ";";
    o.need(ref > 0.0 && sa.energy <= 1e-10 * ref, "compatible affine mismatch relieved");

    // u* = (x1^2, x1 x2) is compatible with this strain, so the exact minimum is 0
    // and the discrete energy is the energy error.
    const auto quad = MismatchSpec::from_field([](Vec2 x) { return std::array{2.0 * x.x, x.x, x.y}; });
    Mesh m = triangulate(sq, box, 0.25);
    double e[3];
    for (int k = 0; k < 3; ++k) {
        if (k) m = refine_uniform(m);
        e[k] = solve_elastic(std::make_shared<const Mesh>(m), c, quad).energy;
    }
    const double r1 = std::log2(e[0] / e[1]), r2 = std::log2(e[1] / e[2]);
    o.detail << " rates " << r1 << ", " << r2 << ";";
    o.need(r1 >= 1.8 && r2 >= 1.8, "energy error rate >= 1.8");
}

// AC4 --------------------------------------------------------------------------
void delamination_relief(Outcome& o) {
    PresetParams pp;
    pp.e0 = 0.01;
    const Problem p = make_preset("delamination", pp);
    const FreeCrystal bonded = p.init;
    FreeCrystal off = bonded;
    for (const auto& cs : p.domain.contact) {
        // Delaminate the part of each contact segment covered by the film.
        const double lo = std::max(std::min(cs.seg.a.x, cs.seg.b.x), 0.0), hi = std::min(std::max(cs.seg.a.x, cs.seg.b.x), 4.0);
        if (hi > lo) off.delamination.push_back({{lo, 0.0}, {hi, 0.0}});
    }
    const double wb = elastic_for(bonded, p.domain, p.elastic).energy;
    const double wd = elastic_for(off, p.domain, p.elastic).energy;
    o.detail << " bonded W " << wb << ", delaminated W " << wd << ";";
    o.need(wd < wb, "delaminated elastic energy below bonded");

    // No mismatch: every toggle pays phi - beta >= 0 and relieves nothing.
    for (double beta : {0.0, 0.5, -0.5}) {
        PresetParams z;
        z.e0 = 0.0;
        z.beta = beta;
        const Problem q = make_preset("delamination", z);
        Rng rng(5);
        FreeCrystal cur = q.init;
        int toggles = 0;
        for (int i = 0; i < 200; ++i) {
            const auto pr = propose_move(cur, q, MoveKind::DelaminationToggle, 0.05, rng);
            if (!pr.crystal || check_crystal(*pr.crystal, q.domain, q.m)) continue;
            const double before = penalized_energy(cur, q).total(), after = penalized_energy(*pr.crystal, q).total();
            const bool grew = boundary_length(*pr.crystal, q.domain, ArcClass::Delamination) >
                              boundary_length(cur, q.domain, ArcClass::Delamination);
            if (grew) {
                ++toggles;
                o.need(after >= before - 1e-12 * std::max(1.0, before), "delaminating never lowers the total");
            }
            cur = *pr.crystal;
        }
        o.need(toggles > 0, "toggles were exercised");
    }
    o.detail << " zero-mismatch toggles never decrease F;";
}

// AC5 --------------------------------------------------------------------------
void wulff(Outcome& o) {
    {
        Problem p = make_preset("capillary");
        o.need(p.vertex_budget == 256, "256-vertex budget");
        const auto st = minimize(p, budget(60000), 7);
        const double oracle = 2.0 * std::sqrt(kPi * p.v);
        const double gap = (st.best_energy.total() - oracle) / oracle;
        o.detail << " isotropic gap " << gap << ";";
        o.need(std::abs(gap) <= 0.02, "isotropic within 2% of the disk");
    }
    {
        PresetParams pp;
        pp.v = 1.0;
        Problem p = make_preset("capillary", pp);
        p.phi = AnisotropyField::pnorm(1.0);
        // Start from a disk so the square oracle has to be found.
        p.init = one(make_regular_polygon({0, 0}, std::sqrt(1.0 / kPi), 128));
        o.need(p.vertex_budget == 256, "256-vertex budget");
        const auto st = minimize(p, budget(60000), 7);
        // Brute force over rectangles w x (v / w): F = 2 (w + v / w), minimum 4 sqrt(v).
        double oracle = std::numeric_limits<double>::infinity();
        for (int i = 1; i < 200000; ++i) {
            const double w = 4.0 * i / 200000.0;
            oracle = std::min(oracle, 2.0 * (w + p.v / w));
        }
        const double gap = (st.best_energy.total() - oracle) / oracle;
        o.detail << " l1 gap " << gap << " (oracle " << oracle << ");";
        o.need(std::abs(gap) <= 0.02, "l1 norm within 2% of 4 sqrt(v)");
    }
}

// AC6 --------------------------------------------------------------------------
void young(Outcome& o) {
    for (double ratio : {-0.5, 0.0, 0.5}) {
        const Problem p = droplet_problem(1.0, ratio, 1.0);
        const auto st = minimize(p, budget(60000), 7);
        const double oracle = std::acos(-ratio) * 180.0 / kPi;
        const auto angles = contact_angles(st.best, p.domain);
        o.need(angles.size() == 2, "two triple points");
        for (double a : angles) {
            o.detail << " " << a << "/" << oracle;
            o.need(std::abs(a - oracle) <= 3.0, "angle within 3 degrees");
        }
    }
    const Problem p = droplet_problem(1.0, -1.0, 1.0);
    const auto st = minimize(p, budget(60000), 7);
    const auto t = class_totals(classify_boundary(st.best, p.domain));
    const double wet = (t.length[static_cast<int>(ArcClass::Contact)] + t.length[static_cast<int>(ArcClass::WettingLayer)]) /
                       p.domain.contact_length();
    o.detail << "; spread fraction " << wet << ";";
    o.need(wet >= 0.9, "complete spreading at beta = -gamma");
}

// AC7 --------------------------------------------------------------------------
void penalization(Outcome& o) {
    const Problem p = droplet_problem(1.0, 0.0, 1.0);
    const std::vector<double> lambdas{0.1, 1.0, 10.0, 100.0};
    const auto rows = sweep(p, SweepParam::Lambda, lambdas, budget(60000), 7);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        const double defect = std::abs(r.area - p.v) / p.v;
        o.detail << " defect(" << r.param << ") " << defect;
        o.need(defect <= prev, "defect nonincreasing in lambda");
        prev = defect;
    }
    o.need(prev < 1e-2, "defect below 1e-2 at the top lambda");
    Problem q = p;
    q.lambda = lambdas.back();
    q.volume = VolumeMode::Constrained;
    const auto st = minimize(q, budget(60000), 7);
    const double fc = st.best_energy.energy(), fp = rows.back().best_f_lambda;
    o.detail << "; constrained " << fc << " penalized " << fp << ";";
    o.need(std::abs(fc - fp) <= 0.01 * std::abs(fc), "constrained and penalized agree within 1%");
}

// AC8 --------------------------------------------------------------------------
void m_monotone(Outcome& o) {
    const Problem p = two_well_problem();
    const auto rows = sweep(p, SweepParam::M, {1, 2, 4, 8}, budget(60000), 7);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        o.detail << " F(m=" << r.param << ") " << r.best_f;
        o.need(r.best_f <= prev + 0.005 * std::abs(prev), "best F nonincreasing in m");
        prev = std::min(prev, r.best_f);
    }
    o.detail << ";";
}

// AC9 --------------------------------------------------------------------------
void lsc(Outcome& o) {
    const std::vector<int> ks{4, 16, 64, 256};
    const auto phi = AnisotropyField::isotropic(1.0);
    for (auto f : {LscFamily::FilamentCollapse, LscFamily::CrackPinch, LscFamily::SlitToDelamination}) {
        const auto c = lsc_family(f, ks);
        const auto beta = AdhesionField::constant(c.domain, 0.5);
        const double lim = surface_energy(c.limit, c.domain, phi, beta).total();
        double fk = 0.0;
        for (const auto& a : c.sequence) {
            fk = surface_energy(a, c.domain, phi, beta).total();
            o.need(fk + 1e-9 >= lim, std::string(to_string(f)) + " stays above the limit");
        }
        const double gap = (fk - lim) / lim;
        o.detail << " " << to_string(f) << " gap " << gap;
        o.need(gap < 0.01, std::string(to_string(f)) + " gap below 1% at k = 256");
    }
    o.detail << ";";
}

// AC10 -------------------------------------------------------------------------
void determinism(Outcome& o) {
    const fs::path dir = fs::temp_directory_path() / ("sdri_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    auto c = parse_config_text(R"({"preset": "thin_film", "seed": 21, "schedule": {"iterations": 400, "batch": 2}})");
    for (const char* run_dir : {"a", "b"}) {
        c.output = (dir / run_dir).string();
        run(c);
    }
    for (const char* f : {"trace.csv", "breakdown.csv"}) {
        const std::string a = slurp(dir / "a" / f), b = slurp(dir / "b" / f);
        o.detail << " " << f << " " << a.size() << " bytes;";
        o.need(!a.empty() && a == b, std::string(f) + " byte-identical");
    }
    fs::remove_all(dir);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"AC1 surface-energy identities", surface_identities},
        {"AC2 hypothesis gate", hypothesis_gate},
        {"AC3 elasticity", elasticity},
        {"AC4 delamination relief", delamination_relief},
        {"AC5 Wulff oracles", wulff},
        {"AC6 Young angle", young},
        {"AC7 penalization threshold", penalization},
        {"AC8 m-monotonicity", m_monotone},
        {"AC9 lsc probes", lsc},
        {"AC10 determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail << " threw: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char t[32];
        std::snprintf(t, sizeof t, "%.1f s", secs);
        std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << name << " (" << t << ")" << o.detail.str() << std::endl;
        failed += o.ok ? 0 : 1;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
