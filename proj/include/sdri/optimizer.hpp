#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdri/elasticity.hpp"
#include "sdri/random.hpp"
#include "sdri/surface_energy.hpp"

namespace sdri {

enum class VolumeMode { Penalty, Constrained };

enum class MoveKind {
    VertexShift = 0,
    EdgeSplit,
    EdgeCollapse,
    SlitGrow,
    SlitRetract,
    DelaminationToggle,
    HoleFill,
    ComponentDrop,
    ComponentSeed,
};
inline constexpr std::size_t kMoveKindCount = 9;
std::string_view to_string(MoveKind k);

/// Constraint class applied on top of the crystal invariants; returns the
/// reason a configuration is refused.
using MoveFilter = std::function<std::optional<std::string>(const FreeCrystal&, const Domain&)>;

struct Problem {
    Domain domain;
    AnisotropyField phi = AnisotropyField::isotropic(1.0);
    AdhesionField beta;
    ElasticSetup elastic;
    double v = 1.0;
    double lambda = 10.0;
    int m = 1;
    std::string preset = "custom";
    MoveFilter filter;
    std::string filter_name = "free";
    VolumeMode volume = VolumeMode::Penalty;
    FreeCrystal init;
    /// Total vertex count (rings and slits) a configuration may use.
    int vertex_budget = 256;
    /// Initial crystal for a given component budget; used by the m sweep.
    std::function<FreeCrystal(int m)> init_for_m;

    /// Range checks plus (H1)-(H3); throws ConfigError or HypothesisError.
    void validate() const;
};

/// S + W + lambda ||A| - v|, with u the exact elastic minimiser for A.
EnergyBreakdown penalized_energy(const FreeCrystal& a, const Problem& p);

/// Proposal weights by family; the split/collapse, slit and topology
/// families are shared evenly between their members.
struct MoveWeights {
    double vertex_shift = 0.6;
    double split_collapse = 0.2;
    double slit = 0.1;
    double delamination = 0.05;
    double topology = 0.05;
};

struct Schedule {
    int iterations = 20000;
    /// Temperatures relative to the initial F^lambda; zero start means greedy.
    double t_start = 1e-3;
    double t_end = 1e-7;
    /// Vertex-shift standard deviation relative to sqrt(v).
    double sigma_start = 0.05;
    double sigma_end = 5e-4;
    bool greedy = false;
    MoveWeights weights;
    /// Proposals evaluated per iteration (concurrently when threads allow).
    int batch = 1;
    /// Worker cap; 0 means hardware concurrency, further capped by SDRI_THREADS.
    int threads = 0;
    /// Wall-clock budget in seconds, 0 for none.
    double time_limit = 0.0;
    /// Stop as converged after this many iterations without improving best, 0 for never.
    int stall = 0;
    /// Record wall-clock time in the trace (breaks byte-identical output).
    bool timing = false;
    /// Keep the breakdown of every evaluation.
    bool log_evaluations = false;
};

enum class RunStatus { Completed, Converged, BudgetExhausted };
std::string_view to_string(RunStatus s);

struct TraceRow {
    int iter = 0;
    bool accepted = false;
    MoveKind move = MoveKind::VertexShift;
    double f = 0.0;
    double f_lambda = 0.0;
    double area = 0.0;
    int components = 0;
    double elapsed_ms = 0.0;
};

struct OptimState {
    FreeCrystal current;
    EnergyBreakdown current_energy;
    FreeCrystal best;
    EnergyBreakdown best_energy;
    int iteration = 0;
    double temperature = 0.0;
    Rng rng{1};
    std::vector<TraceRow> trace;
    std::vector<EnergyBreakdown> evaluations;
    RunStatus status = RunStatus::Completed;
    int accepted = 0;
    int rejected_invalid = 0;
    int failed_evaluations = 0;
};

/// Proposal machinery, exposed for tests: returns the moved crystal or
/// nullopt when the move does not apply.
struct Proposal {
    MoveKind kind;
    std::optional<FreeCrystal> crystal;
};
Proposal propose_move(const FreeCrystal& a, const Problem& p, MoveKind kind, double sigma, Rng& rng);
MoveKind draw_move_kind(const MoveWeights& w, Rng& rng);

OptimState minimize(const Problem& p, const Schedule& s, std::uint64_t seed);

struct ProjectResult {
    FreeCrystal crystal;
    double area_change = 0.0;
    int removed = 0;
};
/// Drops the boundary group whose removal changes the area least until at
/// most m boundary components remain.
ProjectResult project_m(const FreeCrystal& a, int m, double snap_tol);

enum class SweepParam { Lambda, M };
struct SweepRow {
    double param = 0.0;
    double best_f = 0.0;
    double best_f_lambda = 0.0;
    double area = 0.0;
    int components = 0;
    RunStatus status = RunStatus::Completed;
    FreeCrystal best;
};
/// One minimize per value with a common seed. The m sweep warm-starts each
/// run from the better of the problem's initial crystal and the previous best.
std::vector<SweepRow> sweep(const Problem& p, SweepParam param, const std::vector<double>& values, const Schedule& s,
                            std::uint64_t seed);

/// Worker count honouring SDRI_THREADS.
int worker_count(int requested);

}  // namespace sdri
