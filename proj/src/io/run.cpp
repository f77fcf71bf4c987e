#include <fstream>

#include "sdri/error.hpp"
#include "sdri/io.hpp"

namespace sdri {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ConfigError(ErrorKind::ValidationError, "cannot write '" + path.string() + "'");
}

std::filesystem::path prepare(const RunConfig& c, const Problem& p) {
    const std::filesystem::path out = c.output;
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw ConfigError(ErrorKind::ValidationError, "output: cannot create '" + out.string() + "': " + ec.message());
    // Echo with the effective values so the run can be repeated from the echo alone.
    RunConfig echo = c;
    echo.params.v = p.v;
    echo.params.lambda = p.lambda;
    echo.params.m = p.m;
    echo.params.h = p.elastic.h;
    if (!echo.geometry.empty())
        echo.geometry = std::filesystem::absolute(c.base_dir / c.geometry).lexically_normal().string();
    write_file(out / "config.json", config_to_json(echo));
    return out;
}

}  // namespace

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::ParseError:
        case ErrorKind::ValidationError:
        case ErrorKind::UnknownPreset:
        case ErrorKind::HypothesisViolated:
            return 2;
        case ErrorKind::OverlappingInteriors:
        case ErrorKind::DegenerateGeometry:
        case ErrorKind::UnclassifiableArc:
        case ErrorKind::InvariantViolation:
            return 3;
        case ErrorKind::MeshFailure:
        case ErrorKind::SingularSystem:
        case ErrorKind::NonConvergence:
            return 4;
        case ErrorKind::NoTriplePoint:
            return 5;
    }
    return 1;
}

RunOutcome run(const RunConfig& c) {
    RunOutcome r{{}, build_problem(c), {}};
    r.output = prepare(c, r.problem);
    Schedule s = c.schedule;
    s.log_evaluations = true;
    r.state = minimize(r.problem, s, c.seed);
    {
        std::ofstream os(r.output / "breakdown.csv", std::ios::binary);
        write_breakdown_csv(os, r.state.evaluations);
    }
    if (c.emit_trace) {
        std::ofstream os(r.output / "trace.csv", std::ios::binary);
        write_trace_csv(os, r.state.trace);
    }
    write_file(r.output / "final_geometry.json",
               final_geometry_json(r.problem, r.state.best, r.state.best_energy, r.state.status));
    if (c.emit_svg) write_file(r.output / "snapshot.svg", snapshot_svg(r.problem.domain, r.state.best));
    if (c.emit_mesh)
        write_file(r.output / "mesh.json", mesh_json(elastic_for(r.state.best, r.problem.domain, r.problem.elastic)));
    return r;
}

std::vector<SweepRow> run_sweep(const RunConfig& c, SweepParam param, const std::vector<double>& values) {
    const Problem p = build_problem(c);
    const auto out = prepare(c, p);
    const auto rows = sweep(p, param, values, c.schedule, c.seed);
    std::ofstream os(out / "sweep.csv", std::ios::binary);
    os << (param == SweepParam::Lambda ? "lambda" : "m") << ",best_F,best_F_lambda,area,components,status\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,", row.param, row.best_f, row.best_f_lambda, row.area,
                      row.components);
        os << buf << to_string(row.status) << '\n';
    }
    return rows;
}

}  // namespace sdri
