#include "sdri/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "sdri/error.hpp"

namespace sdri {

std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::Converged: return "converged";
        case RunStatus::BudgetExhausted: return "budget_exhausted";
    }
    return "?";
}

void Problem::validate() const {
    std::string bad;
    auto need = [&](bool ok, const char* what) {
        if (!ok) bad += (bad.empty() ? "" : "; ") + std::string(what);
    };
    const double omega = area(domain.container);
    need(v > 0.0 && v <= omega * (1.0 + 1e-12), "v must lie in (0, |Omega|]");
    need(lambda >= 0.0, "lambda must be >= 0");
    need(m >= 1, "m must be >= 1");
    need(elastic.h > 0.0, "h must be > 0");
    need(vertex_budget >= 3, "vertex_budget must be >= 3");
    if (!bad.empty()) throw ConfigError(ErrorKind::ValidationError, bad);
    require_hypotheses(phi, beta, domain);
    elastic.tensor.require_coercive();
}

EnergyBreakdown penalized_energy(const FreeCrystal& a, const Problem& p) {
    EnergyBreakdown e = surface_energy(classify_boundary(a, p.domain), p.phi, p.beta);
    e.elastic = elastic_for(a, p.domain, p.elastic).energy;
    e.penalty = p.lambda * std::abs(area(a) - p.v);
    return e;
}

int worker_count(int requested) {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("SDRI_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    if (requested > 0) n = std::min(n, requested);
    return n;
}

namespace {

int total_vertices(const FreeCrystal& a) {
    int n = 0;
    for (const auto& c : a.components) {
        n += static_cast<int>(c.outer.size());
        for (const auto& h : c.holes) n += static_cast<int>(h.size());
    }
    for (const auto& s : a.slits) n += static_cast<int>(s.vertices.size());
    return n;
}

bool admissible(const FreeCrystal& a, const Problem& p) {
    if (total_vertices(a) > p.vertex_budget) return false;
    if (check_crystal(a, p.domain, p.m)) return false;
    if (p.filter && p.filter(a, p.domain)) return false;
    return true;
}

struct Candidate {
    MoveKind kind;
    std::optional<FreeCrystal> crystal;
    bool valid = false;
    bool failed = false;
    EnergyBreakdown energy;
};

void evaluate(Candidate& c, const Problem& p) {
    if (!c.valid) return;
    try {
        c.energy = penalized_energy(*c.crystal, p);
    } catch (const Error&) {
        c.failed = true;
    }
}

}  // namespace

OptimState minimize(const Problem& p, const Schedule& s, std::uint64_t seed) {
    p.validate();
    using Clock = std::chrono::steady_clock;
    const auto t_begin = Clock::now();
    auto elapsed_s = [&] { return std::chrono::duration<double>(Clock::now() - t_begin).count(); };

    OptimState st;
    st.rng = Rng(seed);
    st.current = p.init;
    st.current.normalize();
    if (auto why = check_crystal(st.current, p.domain, p.m))
        throw GeometryError(ErrorKind::InvariantViolation, "initial crystal: " + *why);
    st.current_energy = penalized_energy(st.current, p);
    st.best = st.current;
    st.best_energy = st.current_energy;
    if (s.log_evaluations) st.evaluations.push_back(st.current_energy);

    const double f0 = std::abs(st.current_energy.total());
    const double scale = f0 > 0.0 ? f0 : 1.0;
    const double len = std::sqrt(p.v);
    const int batch = std::max(1, s.batch);
    const int workers = std::min(worker_count(s.threads), batch);
    const int n_iter = std::max(0, s.iterations);
    int since_best = 0;

    st.status = RunStatus::Completed;
    for (int it = 0; it < n_iter; ++it) {
        if (s.time_limit > 0.0 && elapsed_s() >= s.time_limit) {
            st.status = RunStatus::BudgetExhausted;
            break;
        }
        const double frac = n_iter > 1 ? static_cast<double>(it) / (n_iter - 1) : 1.0;
        const bool greedy = s.greedy || s.t_start <= 0.0;
        st.temperature = greedy ? 0.0 : scale * s.t_start * std::pow(s.t_end / s.t_start, frac);
        const double sigma = len * s.sigma_start * std::pow(s.sigma_end / s.sigma_start, frac);

        std::vector<Candidate> cand(batch);
        for (auto& c : cand) {
            c.kind = draw_move_kind(s.weights, st.rng);
            Proposal pr = propose_move(st.current, p, c.kind, sigma, st.rng);
            c.crystal = std::move(pr.crystal);
            c.valid = c.crystal && admissible(*c.crystal, p);
            if (c.crystal && !c.valid) ++st.rejected_invalid;
        }
        if (workers > 1) {
            std::vector<std::jthread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    for (int k = w; k < batch; k += workers) evaluate(cand[k], p);
                });
        } else {
            for (auto& c : cand) evaluate(c, p);
        }

        // Acceptance in proposal order; one uniform per candidate keeps the
        // random stream independent of the outcomes.
        TraceRow row;
        row.iter = it + 1;
        row.move = cand.front().kind;
        const double cur = st.current_energy.total();
        for (auto& c : cand) {
            const double u = st.rng.uniform();
            if (!c.valid) continue;
            if (c.failed) {
                ++st.failed_evaluations;
                continue;
            }
            if (s.log_evaluations) st.evaluations.push_back(c.energy);
            if (row.accepted) continue;
            const double df = c.energy.total() - cur;
            const bool ok = df <= 1e-12 * std::max(1.0, std::abs(cur)) ||
                            (st.temperature > 0.0 && u < std::exp(-df / st.temperature));
            if (ok) {
                row.accepted = true;
                row.move = c.kind;
                st.current = std::move(*c.crystal);
                st.current_energy = c.energy;
                ++st.accepted;
            }
        }
        ++since_best;
        if (st.current_energy.total() < st.best_energy.total()) {
            st.best = st.current;
            st.best_energy = st.current_energy;
            since_best = 0;
        }
        st.iteration = it + 1;
        row.f = st.current_energy.energy();
        row.f_lambda = st.current_energy.total();
        row.area = area(st.current);
        row.components = component_count(st.current, p.domain.snap_tol);
        row.elapsed_ms = s.timing ? 1e3 * elapsed_s() : 0.0;
        st.trace.push_back(row);
        if (s.stall > 0 && since_best >= s.stall) {
            st.status = RunStatus::Converged;
            break;
        }
    }
    return st;
}

ProjectResult project_m(const FreeCrystal& a, int m, double snap_tol) {
    ProjectResult r{a, 0.0, 0};
    while (component_count(r.crystal, snap_tol) > std::max(m, 0) && !r.crystal.empty()) {
        const auto elems = boundary_elements(r.crystal);
        const auto groups = boundary_groups(r.crystal, snap_tol);
        const int ng = groups.empty() ? 0 : *std::max_element(groups.begin(), groups.end()) + 1;
        std::vector<double> delta(ng, 0.0);
        for (std::size_t i = 0; i < elems.size(); ++i) {
            const auto& e = elems[i];
            switch (e.kind) {
                case BoundaryElement::Kind::Outer: delta[groups[i]] -= area(r.crystal.components[e.component]); break;
                case BoundaryElement::Kind::Hole:
                    delta[groups[i]] += std::abs(ring_signed_area(r.crystal.components[e.component].holes[e.index]));
                    break;
                case BoundaryElement::Kind::Slit: break;
            }
        }
        int pick = 0;
        for (int g = 1; g < ng; ++g)
            if (std::abs(delta[g]) < std::abs(delta[pick])) pick = g;

        FreeCrystal next;
        std::vector<char> drop_comp(r.crystal.components.size(), 0);
        std::vector<std::vector<char>> drop_hole(r.crystal.components.size());
        for (std::size_t c = 0; c < r.crystal.components.size(); ++c)
            drop_hole[c].assign(r.crystal.components[c].holes.size(), 0);
        std::vector<char> drop_slit(r.crystal.slits.size(), 0);
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (groups[i] != pick) continue;
            const auto& e = elems[i];
            if (e.kind == BoundaryElement::Kind::Outer) drop_comp[e.component] = 1;
            if (e.kind == BoundaryElement::Kind::Hole) drop_hole[e.component][e.index] = 1;
            if (e.kind == BoundaryElement::Kind::Slit) drop_slit[e.index] = 1;
        }
        const double before = area(r.crystal);
        for (std::size_t c = 0; c < r.crystal.components.size(); ++c) {
            if (drop_comp[c]) continue;
            PolygonWithHoles comp{r.crystal.components[c].outer, {}};
            for (std::size_t h = 0; h < drop_hole[c].size(); ++h)
                if (!drop_hole[c][h]) comp.holes.push_back(r.crystal.components[c].holes[h]);
            next.components.push_back(std::move(comp));
        }
        for (std::size_t k = 0; k < r.crystal.slits.size(); ++k)
            if (!drop_slit[k]) next.slits.push_back(r.crystal.slits[k]);
        const auto edges = next.boundary_segments();
        for (const auto& j : r.crystal.delamination) {
            for (const auto& e : edges)
                if (point_segment_distance(j.a, e) <= snap_tol && point_segment_distance(j.b, e) <= snap_tol) {
                    next.delamination.push_back(j);
                    break;
                }
        }
        r.area_change += area(next) - before;
        ++r.removed;
        r.crystal = std::move(next);
    }
    return r;
}

std::vector<SweepRow> sweep(const Problem& p, SweepParam param, const std::vector<double>& values, const Schedule& s,
                            std::uint64_t seed) {
    if (values.empty()) throw ConfigError(ErrorKind::ValidationError, "sweep needs at least one value");
    std::vector<SweepRow> rows;
    std::optional<FreeCrystal> prev;
    for (double val : values) {
        Problem q = p;
        if (param == SweepParam::Lambda) {
            q.lambda = val;
        } else {
            q.m = static_cast<int>(val);
            if (q.init_for_m) q.init = q.init_for_m(q.m);
            if (prev && !check_crystal(*prev, q.domain, q.m) && (!q.filter || !q.filter(*prev, q.domain)) &&
                penalized_energy(*prev, q).total() < penalized_energy(q.init, q).total())
                q.init = *prev;
        }
        q.validate();
        const OptimState st = minimize(q, s, seed);
        SweepRow row;
        row.param = val;
        row.best_f = st.best_energy.energy();
        row.best_f_lambda = st.best_energy.total();
        row.area = area(st.best);
        row.components = component_count(st.best, q.domain.snap_tol);
        row.status = st.status;
        row.best = st.best;
        prev = st.best;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace sdri
