#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sdri/scenarios.hpp"

namespace sdri {

class Error;

// Configuration ---------------------------------------------------------------

struct PhiSpec {
    std::string family = "isotropic";  // isotropic, elliptic, pnorm, crystalline
    double gamma = 1.0;
    double a = 1.0;
    double b = 1.0;
    double p = 2.0;
    double scale = 1.0;
    std::vector<Vec2> forms;
    std::optional<ScaleGrid> modulation;

    AnisotropyField build() const;
};

/// A film or substrate material: Lame pair or explicit Voigt matrix.
struct MaterialSpec {
    std::optional<Lame> lame;
    std::optional<Voigt> voigt;
    Voigt build() const;
};

struct ElasticSpec {
    std::optional<MaterialSpec> film;
    std::optional<MaterialSpec> substrate;
    std::optional<bool> scalar_mode;
    std::optional<std::string> gauge;  // mean_rigid, clamp_substrate_bottom
};

struct MismatchConfig {
    std::optional<double> e0;
    std::optional<std::array<double, 4>> affine;  // row-major grad u0
};

struct RunConfig {
    std::string preset;
    /// Geometry JSON path, resolved against the config file's directory.
    std::string geometry;
    PresetParams params;
    std::vector<AdhesionField::Piece> beta_pieces;
    std::optional<PhiSpec> phi;
    std::optional<ElasticSpec> elastic;
    std::optional<MismatchConfig> mismatch;
    std::string volume = "penalty";
    std::optional<int> vertex_budget;
    Schedule schedule;
    std::uint64_t seed = 1;
    std::string output = "sdri_out";
    bool emit_svg = true;
    bool emit_mesh = false;
    bool emit_trace = true;
    std::filesystem::path base_dir;
};

/// Strict parse: unknown keys, wrong types and out-of-range values are errors.
/// Throws ConfigError(ParseError) naming the line or field, or
/// ConfigError(ValidationError) listing every violated range.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
/// Every field with defaults applied; parsing the result gives the same config.
std::string config_to_json(const RunConfig& c);

/// Problem described by the config: a preset (with overrides) or an explicit
/// geometry with phi, beta, elastic and mismatch specs. Validates it.
Problem build_problem(const RunConfig& c);

// Geometry files ----------------------------------------------------------------

struct GeometryFile {
    Domain domain;
    FreeCrystal crystal;
};
GeometryFile read_geometry(const std::filesystem::path& path);
GeometryFile geometry_from_json(const std::string& text);
std::string geometry_to_json(const Domain& dom, const FreeCrystal& a);

// Artifacts ----------------------------------------------------------------------

/// free_boundary..elastic, penalty, total; one row per evaluation.
void write_breakdown_csv(std::ostream& os, const std::vector<EnergyBreakdown>& rows);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);
/// Geometry plus energy breakdown and per-class lengths of the final crystal.
std::string final_geometry_json(const Problem& p, const FreeCrystal& a, const EnergyBreakdown& e, RunStatus status);
/// One path per arc class present, slits dashed, with a legend.
std::string snapshot_svg(const Domain& dom, const FreeCrystal& a);
std::string mesh_json(const ElasticState& st);
std::string probe_reports_json(const std::vector<ProbeReport>& reports);
void print_probe_table(std::ostream& os, const std::vector<ProbeReport>& reports);

// Commands -----------------------------------------------------------------------

/// CLI exit code of a library error: 2 config or hypothesis, 3 geometry,
/// 4 mesh or solve, 5 probe.
int exit_code(const Error& e);

struct RunOutcome {
    OptimState state;
    Problem problem;
    std::filesystem::path output;
};
/// minimize plus every artifact under c.output (relative to the working directory).
RunOutcome run(const RunConfig& c);

/// Writes sweep.csv under c.output.
std::vector<SweepRow> run_sweep(const RunConfig& c, SweepParam param, const std::vector<double>& values);

}  // namespace sdri
