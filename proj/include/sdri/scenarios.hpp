#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdri/optimizer.hpp"

namespace sdri {

/// Overrides for make_preset; unset fields keep the preset's defaults.
struct PresetParams {
    std::optional<double> v;
    std::optional<double> lambda;
    std::optional<int> m;
    std::optional<double> h;
    std::optional<double> gamma;
    std::optional<double> beta;
    std::optional<double> e0;
    /// Height of the truncated thin-film container.
    std::optional<double> height;
    // Thin-film surface tensions: film-vapor, substrate-vapor, film-substrate.
    std::optional<double> gamma_f;
    std::optional<double> gamma_s;
    std::optional<double> gamma_fs;
    std::optional<Lame> film;
    std::optional<Lame> substrate;
};

const std::vector<std::string>& preset_names();
/// Fully populated problem for one of the application settings; throws
/// ConfigError(UnknownPreset) for other names.
Problem make_preset(std::string_view name, const PresetParams& o = {});

/// A = {0 < x2 < h(x1)} over a horizontal Sigma at x2 = base: one component,
/// no holes, x-monotone top, vertical cracks only.
MoveFilter subgraph_filter(double base = 0.0);
/// A starshaped with respect to origin: origin inside, no holes or slits, and
/// origin on the inner side of every edge.
MoveFilter starshaped_filter(Vec2 origin = {0.0, 0.0});

/// Two square wells joined by a thin corridor, used by the m probe. A single
/// well holds less than v, so one boundary component must thread the corridor.
Problem two_well_problem(double v = 1.2, double lambda = 40.0);
/// Splits every edge longer than max_edge into equal pieces.
Ring densify(const Ring& r, double max_edge);

// Probes --------------------------------------------------------------------

struct ProbeValue {
    std::string label;
    double measured = 0.0;
    double oracle = 0.0;
    double tolerance = 0.0;
    bool passed = true;
};

struct ProbeReport {
    std::string name;
    std::vector<ProbeValue> values;
    std::string note;
    bool passed() const;
    void add(std::string label, double measured, double oracle, double tolerance, bool passed);
    /// |measured - oracle| <= tolerance.
    void add_close(std::string label, double measured, double oracle, double tolerance);
};

/// Run budget shared by the optimizer-backed probes.
struct ProbeOptions {
    int iterations = 60000;
    std::uint64_t seed = 7;
    int threads = 1;
};

/// Contact angles (degrees, inside the crystal) at the triple points of the
/// first component touching Sigma, from a line fitted to the three free edges
/// next to each triple point. Throws ProbeError(NoTriplePoint).
std::vector<double> contact_angles(const FreeCrystal& a, const Domain& dom);
/// Minimiser of 2R(gamma theta + beta sin theta) over circular caps of area v
/// whose base fits in half_width; brute force over theta, in degrees.
double cap_angle_oracle(double gamma, double beta, double v, double half_width);
/// Droplet on a flat substrate: Omega = (-3, 3) x (0, 3), S = (-3, 3) x (-1, 0).
Problem droplet_problem(double gamma, double beta, double v);
ProbeReport young_angle_probe(double gamma, double beta, double v, const ProbeOptions& opt = {});
/// beta = -gamma: reports the wetted fraction of Sigma (contact plus wetting
/// layer), expected to reach 0.9.
ProbeReport young_spread_probe(double gamma, double v, const ProbeOptions& opt = {});

enum class LscFamily { FilamentCollapse, CrackPinch, SlitToDelamination };
std::string_view to_string(LscFamily f);
struct LscCase {
    Domain domain;
    FreeCrystal limit;
    std::vector<FreeCrystal> sequence;
};
LscCase lsc_family(LscFamily f, const std::vector<int>& ks);
ProbeReport lsc_probe(LscFamily f, const std::vector<int>& ks, const AnisotropyField& phi = AnisotropyField::isotropic(1.0),
                      double beta = 0.5);

/// Optimizer on the capillary preset against the Wulff energy at area v.
ProbeReport wulff_gap_probe(const AnisotropyField& phi, double v, const ProbeOptions& opt = {}, double tol = 0.02);
/// Relative area defect nonincreasing in lambda and below 1e-2 at the top
/// value; constrained and penalized energies within 1% there.
ProbeReport lambda_probe(const Problem& p, const std::vector<double>& lambdas, const ProbeOptions& opt = {});
/// Best F nonincreasing in m within 0.5%.
ProbeReport m_probe(const Problem& p, const std::vector<int>& ms, const ProbeOptions& opt = {});

const std::vector<std::string>& probe_suites();
/// Named suite ("lsc", "wulff", "young", "lambda", "m", "all"); probes whose
/// name does not contain filter are skipped. betas overrides the Young
/// probe's adhesion ratios.
std::vector<ProbeReport> run_probe_suite(std::string_view suite, std::string_view filter, const ProbeOptions& opt,
                                         const std::vector<double>& betas = {});

Schedule probe_schedule(const ProbeOptions& opt);

}  // namespace sdri
