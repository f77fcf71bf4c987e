#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sdri/anisotropy.hpp"
#include "sdri/error.hpp"
#include "sdri/random.hpp"

namespace sdri {

// ScaleGrid ----------------------------------------------------------------

double ScaleGrid::at(Vec2 x) const {
    if (values.empty()) return 1.0;
    auto coord = [](double v, double o, double h, int n, int& i, double& f) {
        double u = (v - o) / h;
        u = std::clamp(u, 0.0, static_cast<double>(n - 1));
        i = std::min(static_cast<int>(std::floor(u)), std::max(n - 2, 0));
        f = n > 1 ? u - i : 0.0;
    };
    int i = 0, j = 0;
    double fx = 0.0, fy = 0.0;
    coord(x.x, origin.x, spacing.x, nx, i, fx);
    coord(x.y, origin.y, spacing.y, ny, j, fy);
    const int i1 = std::min(i + 1, nx - 1);
    const int j1 = std::min(j + 1, ny - 1);
    const double v00 = values[j * nx + i], v10 = values[j * nx + i1];
    const double v01 = values[j1 * nx + i], v11 = values[j1 * nx + i1];
    return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 + (1 - fx) * fy * v01 + fx * fy * v11;
}

double ScaleGrid::min() const { return values.empty() ? 1.0 : *std::min_element(values.begin(), values.end()); }
double ScaleGrid::max() const { return values.empty() ? 1.0 : *std::max_element(values.begin(), values.end()); }

double ScaleGrid::lipschitz() const {
    double l = 0.0;
    for (int j = 0; j + 1 < std::max(ny, 2); ++j) {
        for (int i = 0; i + 1 < std::max(nx, 2); ++i) {
            const int i1 = std::min(i + 1, nx - 1), j1 = std::min(j + 1, ny - 1);
            const double v00 = values[j * nx + i], v10 = values[j * nx + i1];
            const double v01 = values[j1 * nx + i], v11 = values[j1 * nx + i1];
            const double gx = nx > 1 ? std::max(std::abs(v10 - v00), std::abs(v11 - v01)) / spacing.x : 0.0;
            const double gy = ny > 1 ? std::max(std::abs(v01 - v00), std::abs(v11 - v10)) / spacing.y : 0.0;
            l = std::max(l, std::hypot(gx, gy));
        }
    }
    return l;
}

std::vector<double> ScaleGrid::crossings(const Segment& s) const {
    std::vector<double> ts;
    auto add = [&](double a, double b, double o, double h, int n) {
        if (std::abs(b - a) < 1e-300) return;
        for (int k = 0; k < n; ++k) {
            const double t = (o + k * h - a) / (b - a);
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    };
    add(s.a.x, s.b.x, origin.x, spacing.x, nx);
    add(s.a.y, s.b.y, origin.y, spacing.y, ny);
    std::sort(ts.begin(), ts.end());
    return ts;
}

// AnisotropyField ----------------------------------------------------------

AnisotropyField::AnisotropyField(Family f) : family_(std::move(f)) { certify(); }

AnisotropyField AnisotropyField::isotropic(double gamma) {
    if (!(gamma > 0.0)) throw HypothesisError("isotropic surface tension must be positive");
    return AnisotropyField(Isotropic{gamma});
}

AnisotropyField AnisotropyField::elliptic(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw HypothesisError("elliptic axes must be positive");
    return AnisotropyField(Elliptic{a, b});
}

AnisotropyField AnisotropyField::pnorm(double p, double scale) {
    if (!(p >= 1.0) || !(scale > 0.0)) throw HypothesisError("p-norm needs p >= 1 and positive scale");
    return AnisotropyField(PNorm{p, scale});
}

AnisotropyField AnisotropyField::crystalline(std::vector<Vec2> forms) {
    if (forms.empty()) throw HypothesisError("crystalline anisotropy needs at least one linear form");
    return AnisotropyField(Crystalline{std::move(forms)});
}

AnisotropyField AnisotropyField::modulated(ScaleGrid grid) const {
    if (grid.nx < 1 || grid.ny < 1 || grid.values.size() != static_cast<std::size_t>(grid.nx) * grid.ny)
        throw HypothesisError("modulation grid size does not match nx * ny");
    if (!(grid.spacing.x > 0.0 && grid.spacing.y > 0.0)) throw HypothesisError("modulation grid spacing must be positive");
    if (!(grid.min() > 0.0)) throw HypothesisError("modulation scale must stay positive");
    AnisotropyField out = *this;
    out.modulation_ = std::move(grid);
    out.certify();
    return out;
}

AnisotropyField AnisotropyField::scaled(double t) const {
    AnisotropyField out = *this;
    std::visit(
        [t](auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Isotropic>) f.gamma *= t;
            else if constexpr (std::is_same_v<T, Elliptic>) { f.a *= t; f.b *= t; }
            else if constexpr (std::is_same_v<T, PNorm>) f.scale *= t;
            else for (auto& l : f.forms) l *= t;
        },
        out.family_);
    out.certify();
    return out;
}

double AnisotropyField::base(Vec2 xi) const {
    return std::visit(
        [xi](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Isotropic>) {
                return f.gamma * norm(xi);
            } else if constexpr (std::is_same_v<T, Elliptic>) {
                return std::hypot(f.a * xi.x, f.b * xi.y);
            } else if constexpr (std::is_same_v<T, PNorm>) {
                const double ax = std::abs(xi.x), ay = std::abs(xi.y);
                const double m = std::max(ax, ay);
                if (m == 0.0) return 0.0;
                return f.scale * m * std::pow(std::pow(ax / m, f.p) + std::pow(ay / m, f.p), 1.0 / f.p);
            } else {
                double best = 0.0;
                for (const auto& l : f.forms) best = std::max(best, std::abs(dot(l, xi)));
                return best;
            }
        },
        family_);
}

double AnisotropyField::operator()(Vec2 x, Vec2 xi) const { return scale_at(x) * base(xi); }

double phi_eval(const AnisotropyField& phi, Vec2 x, Vec2 xi) {
    if (xi.x == 0.0 && xi.y == 0.0) return 0.0;
    return phi(x, xi);
}

std::string AnisotropyField::family_name() const {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Isotropic>) return "isotropic";
            else if constexpr (std::is_same_v<T, Elliptic>) return "elliptic";
            else if constexpr (std::is_same_v<T, PNorm>) return "pnorm";
            else return "crystalline";
        },
        family_);
}

double AnisotropyField::lipschitz_x() const { return modulation_ ? modulation_->lipschitz() * c2_ / modulation_->max() : 0.0; }

void AnisotropyField::certify() {
    double lo = 0.0, hi = 0.0;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Isotropic>) {
                lo = hi = f.gamma;
            } else if constexpr (std::is_same_v<T, Elliptic>) {
                lo = std::min(f.a, f.b);
                hi = std::max(f.a, f.b);
            } else if constexpr (std::is_same_v<T, PNorm>) {
                const double diag = std::pow(2.0, 1.0 / f.p - 0.5);
                lo = f.scale * std::min(1.0, diag);
                hi = f.scale * std::max(1.0, diag);
            } else {
                for (const auto& l : f.forms) hi = std::max(hi, norm(l));
                // The minimum of max_i |l_i . nu| over the circle sits where two
                // forms tie or where a form vanishes.
                std::vector<Vec2> candidates;
                for (std::size_t i = 0; i < f.forms.size(); ++i) {
                    candidates.push_back(perp(f.forms[i]));
                    for (std::size_t j = i + 1; j < f.forms.size(); ++j) {
                        candidates.push_back(perp(f.forms[i] - f.forms[j]));
                        candidates.push_back(perp(f.forms[i] + f.forms[j]));
                    }
                }
                lo = std::numeric_limits<double>::infinity();
                for (const auto& c : candidates) {
                    const Vec2 nu = normalized(c);
                    if (norm(nu) == 0.0) continue;
                    lo = std::min(lo, base(nu));
                }
                if (!(lo > 1e-12 * hi)) throw HypothesisError("crystalline forms do not span the plane; phi is not a norm");
            }
        },
        family_);
    if (modulation_) {
        lo *= modulation_->min();
        hi *= modulation_->max();
    }
    c1_ = lo;
    c2_ = hi;
}

// AdhesionField ------------------------------------------------------------

AdhesionField AdhesionField::constant(const Domain& dom, double beta) {
    std::vector<Piece> pieces;
    for (const auto& c : dom.contact) pieces.push_back({c.seg, beta});
    return from_pieces(std::move(pieces), dom.snap_tol);
}

AdhesionField AdhesionField::from_pieces(std::vector<Piece> pieces, double snap_tol) {
    AdhesionField f;
    f.pieces_ = std::move(pieces);
    f.tol_ = snap_tol;
    return f;
}

double AdhesionField::at(Vec2 x) const {
    for (const auto& p : pieces_)
        if (point_segment_distance(x, p.seg) <= tol_) return p.beta;
    return 0.0;
}

std::vector<double> AdhesionField::breakpoints(const Segment& s) const {
    std::vector<double> ts;
    const double len = s.length();
    if (len <= 0.0) return ts;
    const Vec2 dir = (s.b - s.a) / len;
    for (const auto& p : pieces_) {
        for (const Vec2 q : {p.seg.a, p.seg.b}) {
            if (point_segment_distance(q, s) > tol_) continue;
            const double t = dot(q - s.a, dir) / len;
            if (t * len > tol_ && (1.0 - t) * len > tol_) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());
    return ts;
}

AdhesionField AdhesionField::scaled(double t) const {
    AdhesionField out = *this;
    for (auto& p : out.pieces_) p.beta *= t;
    return out;
}

double thin_film_beta(double gamma_f, double gamma_s, double gamma_fs) {
    return -std::max(std::min(gamma_f, gamma_s - gamma_fs), -gamma_f);
}

// Hypotheses ---------------------------------------------------------------

HypothesisReport validate_hypotheses(const AnisotropyField& phi, const AdhesionField& beta, const Domain& dom,
                                     int n_samples, std::uint64_t seed) {
    HypothesisReport rep;
    Rng rng(seed);
    const double tol = 1e-9;

    std::vector<Vec2> xs;
    if (phi.spatially_constant()) {
        xs.push_back(BoundingBox::of(dom.container.outer).lo);
    } else {
        const BoundingBox box = dom.bbox();
        for (int j = 0; j <= 8; ++j)
            for (int i = 0; i <= 8; ++i)
                xs.push_back({box.lo.x + (box.hi.x - box.lo.x) * i / 8.0, box.lo.y + (box.hi.y - box.lo.y) * j / 8.0});
        const auto& g = *phi.modulation();
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) xs.push_back(g.origin + Vec2{g.spacing.x * i, g.spacing.y * j});
    }

    // Directions on a grid that is a multiple of 8 so axis and diagonal directions are hit exactly.
    const int n_dir = std::max(8, ((n_samples + 7) / 8) * 8);
    rep.sampled_c1 = std::numeric_limits<double>::infinity();
    rep.sampled_c2 = 0.0;
    rep.bounds_margin = std::numeric_limits<double>::infinity();
    for (const Vec2 x : xs) {
        for (int k = 0; k < n_dir; ++k) {
            const double t = 2.0 * std::numbers::pi * k / n_dir;
            const double v = phi(x, {std::cos(t), std::sin(t)});
            rep.sampled_c1 = std::min(rep.sampled_c1, v);
            rep.sampled_c2 = std::max(rep.sampled_c2, v);
            rep.bounds_margin = std::min({rep.bounds_margin, v - phi.c1(), phi.c2() - v});
        }
    }

    rep.triangle_margin = std::numeric_limits<double>::infinity();
    const int n_pairs = std::max(16, n_samples / 4);
    for (int k = 0; k < n_pairs; ++k) {
        const Vec2 x = xs[rng.index(xs.size())];
        const Vec2 xi{rng.normal(), rng.normal()};
        const Vec2 eta{rng.normal(), rng.normal()};
        const double t = rng.uniform(-3.0, 3.0);
        const double pxi = phi(x, xi);
        if (pxi > 0.0 && std::abs(t) > 1e-3) {
            const double err = std::abs(phi(x, xi * t) - std::abs(t) * pxi) / (std::abs(t) * pxi);
            rep.homogeneity_error = std::max(rep.homogeneity_error, err);
        }
        const double scale = norm(xi) + norm(eta);
        if (scale > 0.0)
            rep.triangle_margin = std::min(rep.triangle_margin, (pxi + phi(x, eta) - phi(x, xi + eta)) / scale);
    }
    rep.h1_passed = rep.homogeneity_error <= tol && rep.triangle_margin >= -tol &&
                    rep.bounds_margin >= -tol * phi.c2() && rep.sampled_c1 > 0.0;

    rep.h2_margin = std::numeric_limits<double>::infinity();
    auto sample_h2 = [&](Vec2 x, Vec2 nu, double b) {
        const double m = phi(x, nu) - std::abs(b);
        if (m < rep.h2_margin) {
            rep.h2_margin = m;
            rep.worst_location = x;
        }
    };
    for (const auto& c : dom.contact) {
        const Vec2 nu = c.normal;
        bool covered = false;
        for (const auto& p : beta.pieces()) {
            double t0 = 0.0, t1 = 0.0;
            if (!collinear_overlap(c.seg, p.seg, dom.snap_tol, &t0, &t1)) continue;
            covered = true;
            const Segment part{c.seg.at(t0), c.seg.at(t1)};
            for (const Vec2 x : {part.a, part.midpoint(), part.b}) sample_h2(x, nu, p.beta);
        }
        if (!covered)
            for (const Vec2 x : {c.seg.a, c.seg.midpoint(), c.seg.b}) sample_h2(x, nu, 0.0);
    }
    rep.h2_passed = rep.h2_margin >= -tol;

    std::ostringstream msg;
    if (!rep.h1_passed)
        msg << "(H1) violated: homogeneity error " << rep.homogeneity_error << ", triangle margin "
            << rep.triangle_margin << ", bounds margin " << rep.bounds_margin << "; ";
    if (!rep.h2_passed)
        msg << "(H2) violated at (" << rep.worst_location.x << ", " << rep.worst_location.y << "), margin "
            << rep.h2_margin;
    rep.message = msg.str();
    return rep;
}

void require_hypotheses(const AnisotropyField& phi, const AdhesionField& beta, const Domain& dom, int n_samples) {
    const auto rep = validate_hypotheses(phi, beta, dom, n_samples);
    if (!rep.passed()) throw HypothesisError(rep.message);
}

}  // namespace sdri
