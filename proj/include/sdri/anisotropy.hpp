#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sdri/geometry.hpp"

namespace sdri {

/// Bilinear scalar field on a regular grid, clamped outside. Used to modulate
/// an anisotropy in space.
struct ScaleGrid {
    Vec2 origin;
    Vec2 spacing{1.0, 1.0};
    int nx = 1;
    int ny = 1;
    std::vector<double> values;  // row-major, values[j * nx + i]

    double at(Vec2 x) const;
    double min() const;
    double max() const;
    /// Lipschitz constant of the bilinear interpolant (max over cells of the gradient bound).
    double lipschitz() const;
    /// Parameters in (0, 1) where s crosses a grid line.
    std::vector<double> crossings(const Segment& s) const;
};

/// Finsler norm phi(x, xi) = scale(x) * base(xi), with base one of the
/// built-in norm families. Evaluation is the positively one-homogeneous
/// extension, so xi need not be a unit vector.
class AnisotropyField {
public:
    struct Isotropic { double gamma; };
    struct Elliptic { double a; double b; };
    struct PNorm { double p; double scale; };
    struct Crystalline { std::vector<Vec2> forms; };  // phi = max_i |l_i . xi|
    using Family = std::variant<Isotropic, Elliptic, PNorm, Crystalline>;

    static AnisotropyField isotropic(double gamma);
    static AnisotropyField elliptic(double a, double b);
    static AnisotropyField pnorm(double p, double scale = 1.0);
    static AnisotropyField crystalline(std::vector<Vec2> forms);

    AnisotropyField modulated(ScaleGrid grid) const;
    AnisotropyField scaled(double t) const;

    double operator()(Vec2 x, Vec2 xi) const;
    double base(Vec2 xi) const;
    double scale_at(Vec2 x) const { return modulation_ ? modulation_->at(x) : 1.0; }

    bool spatially_constant() const { return !modulation_.has_value(); }
    const Family& family() const { return family_; }
    const std::optional<ScaleGrid>& modulation() const { return modulation_; }
    std::string family_name() const;

    /// Certified constants with c1|xi| <= phi(x, xi) <= c2|xi|.
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    /// Lipschitz constant of x -> phi(x, nu) for unit nu (0 when unmodulated).
    double lipschitz_x() const;

private:
    explicit AnisotropyField(Family f);
    void certify();

    Family family_;
    std::optional<ScaleGrid> modulation_;
    double c1_ = 0.0;
    double c2_ = 0.0;
};

/// phi_eval: |xi| phi(x, xi / |xi|), zero for xi = 0.
double phi_eval(const AnisotropyField& phi, Vec2 x, Vec2 xi);

/// Piecewise-constant adhesion coefficient on Sigma.
class AdhesionField {
public:
    struct Piece {
        Segment seg;
        double beta;
    };

    AdhesionField() = default;
    /// Same beta on every contact segment of dom.
    static AdhesionField constant(const Domain& dom, double beta);
    static AdhesionField from_pieces(std::vector<Piece> pieces, double snap_tol);

    /// beta at a point of Sigma; 0 away from every piece.
    double at(Vec2 x) const;
    const std::vector<Piece>& pieces() const { return pieces_; }
    /// Parameters in (0, 1) where s crosses a piece boundary.
    std::vector<double> breakpoints(const Segment& s) const;
    AdhesionField scaled(double t) const;

private:
    std::vector<Piece> pieces_;
    double tol_ = 1e-12;
};

/// beta from the three thin-film surface tensions (film-vapor, substrate-vapor,
/// film-substrate): beta = -max{min{gamma_f, gamma_s - gamma_fs}, -gamma_f}.
double thin_film_beta(double gamma_f, double gamma_s, double gamma_fs);

struct HypothesisReport {
    bool h1_passed = true;
    bool h2_passed = true;
    double homogeneity_error = 0.0;  // max |phi(t xi) - |t| phi(xi)| / (|t| phi(xi))
    double triangle_margin = 0.0;    // min of phi(xi) + phi(eta) - phi(xi + eta), normalised
    double sampled_c1 = 0.0;         // min of phi over sampled unit vectors
    double sampled_c2 = 0.0;         // max of phi over sampled unit vectors
    double bounds_margin = 0.0;      // min of phi - c1 and c2 - phi over samples
    double h2_margin = 0.0;          // min over Sigma samples of phi(x, nu_Sigma) - |beta|
    Vec2 worst_location;             // location of the worst (H2) sample
    std::string message;

    bool passed() const { return h1_passed && h2_passed; }
};

/// Samples the norm axioms and bounds of phi and the adhesion inequality along
/// Sigma. Deterministic for a given seed.
HypothesisReport validate_hypotheses(const AnisotropyField& phi, const AdhesionField& beta, const Domain& dom,
                                     int n_samples = 4096, std::uint64_t seed = 1);
/// Throws HypothesisError carrying the worst location and margin on failure.
void require_hypotheses(const AnisotropyField& phi, const AdhesionField& beta, const Domain& dom,
                        int n_samples = 4096);

}  // namespace sdri
