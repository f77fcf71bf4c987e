#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdri/elasticity.hpp"
#include "sdri/error.hpp"
#include "sdri/kernels.hpp"

namespace sdri {

Voigt isotropic_voigt(Lame l) {
    return {l.lambda + 2.0 * l.mu, l.lambda, 0.0, l.lambda + 2.0 * l.mu, 0.0, l.mu};
}

Voigt voigt_from_tensor(double c1111, double c1122, double c1112, double c2222, double c2212, double c1212) {
    return {c1111, c1122, c1112, c2222, c2212, c1212};
}

double coercivity(const Voigt& d) {
    // M:M = eps^T P eps with P = diag(1, 1, 1/2); c3 = lambda_min(P^-1/2 D P^-1/2) / 2.
    const double s = std::sqrt(2.0);
    Eigen::Matrix3d a;
    a << d[0], d[1], s * d[2],
         d[1], d[3], s * d[4],
         s * d[2], s * d[4], 2.0 * d[5];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().minCoeff();
}

ElasticTensor ElasticTensor::isotropic(Lame f, Lame s) {
    ElasticTensor t;
    t.film = isotropic_voigt(f);
    t.substrate = isotropic_voigt(s);
    return t;
}

ElasticTensor ElasticTensor::scalar_identity() {
    ElasticTensor t;
    t.film = {1.0, 0.0, 0.0, 1.0, 0.0, 1.0};
    t.substrate = t.film;
    t.scalar_mode = true;
    return t;
}

namespace {
bool all_zero(const Voigt& d) {
    return std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; });
}
}  // namespace

bool ElasticTensor::is_zero() const {
    if (!all_zero(film) || !all_zero(substrate)) return false;
    for (const auto& [k, v] : component_override)
        if (!all_zero(v)) return false;
    return true;
}

const Voigt& ElasticTensor::at(Region r, int component) const {
    if (r == Region::Substrate) return substrate;
    auto it = component_override.find(component);
    return it == component_override.end() ? film : it->second;
}

double ElasticTensor::c3() const {
    if (is_zero()) return 0.0;
    double c = coercivity(film);
    if (!all_zero(substrate)) c = std::min(c, coercivity(substrate));
    for (const auto& [k, v] : component_override) c = std::min(c, coercivity(v));
    return c;
}

void ElasticTensor::require_coercive() const {
    if (is_zero()) return;
    const double c = c3();
    if (!(c > 0.0)) throw HypothesisError("elastic tensor is not coercive (c3 = " + std::to_string(c) + ")");
}

MismatchSpec MismatchSpec::affine(double g11, double g12, double g21, double g22) {
    MismatchSpec m;
    if (g11 == 0.0 && g22 == 0.0 && g12 + g21 == 0.0) return m;
    const std::array<double, 3> e{g11, g22, g12 + g21};
    m.field = [e](Vec2) { return e; };
    m.affine_gradient = std::array<double, 4>{g11, g12, g21, g22};
    return m;
}

MismatchSpec MismatchSpec::from_field(std::function<std::array<double, 3>(Vec2)> f) {
    MismatchSpec m;
    m.field = std::move(f);
    return m;
}

std::array<double, 3> MismatchSpec::at(Vec2 x) const {
    return field ? field(x) : std::array<double, 3>{0.0, 0.0, 0.0};
}

namespace {

struct Element {
    double area;
    double gx[3], gy[3];
    const Voigt* d;
    std::array<std::array<double, 3>, 3> e0;  // per edge-midpoint quadrature point
};

std::vector<Element> elements(const Mesh& m, const ElasticTensor& c, const MismatchSpec& e0) {
    std::vector<Element> el(m.tris.size());
    for (std::size_t t = 0; t < m.tris.size(); ++t) {
        const auto& v = m.tris[t];
        const Vec2 p[3] = {m.points[v[0]], m.points[v[1]], m.points[v[2]]};
        const double a2 = cross(p[1] - p[0], p[2] - p[0]);
        Element& e = el[t];
        e.area = 0.5 * a2;
        for (int i = 0; i < 3; ++i) {
            const Vec2 pj = p[(i + 1) % 3], pk = p[(i + 2) % 3];
            e.gx[i] = (pj.y - pk.y) / a2;
            e.gy[i] = (pk.x - pj.x) / a2;
        }
        e.d = &c.at(m.region[t], m.component[t]);
        for (int q = 0; q < 3; ++q) {
            const Vec2 x = (p[q] + p[(q + 1) % 3]) * 0.5;
            e.e0[q] = m.region[t] == Region::Film ? e0.at(x) : std::array<double, 3>{0.0, 0.0, 0.0};
        }
    }
    return el;
}

Eigen::Matrix3d dmat(const Voigt& d) {
    Eigen::Matrix3d m;
    m << d[0], d[1], d[2], d[1], d[3], d[4], d[2], d[4], d[5];
    return m;
}

double energy_of(const Mesh& m, const std::vector<Element>& el, const std::vector<double>& u, double* film,
                 double* sub) {
    const std::size_t n = el.size();
    std::vector<double> area(n), g[6], uu[6], e0[9], d[6];
    for (auto& x : g) x.resize(n);
    for (auto& x : uu) x.resize(n);
    for (auto& x : e0) x.resize(n);
    for (auto& x : d) x.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        area[t] = el[t].area;
        for (int k = 0; k < 3; ++k) {
            g[k][t] = el[t].gx[k];
            g[3 + k][t] = el[t].gy[k];
            const int node = m.tri_nodes[t][k];
            uu[k][t] = u[2 * node];
            uu[3 + k][t] = u[2 * node + 1];
            for (int c = 0; c < 3; ++c) e0[3 * k + c][t] = el[t].e0[k][c];
        }
        for (int j = 0; j < 6; ++j) d[j][t] = (*el[t].d)[j];
    }
    kernels::TriangleEnergyInput in;
    in.count = n;
    in.area = area.data();
    for (int k = 0; k < 3; ++k) {
        in.gx[k] = g[k].data();
        in.gy[k] = g[3 + k].data();
        in.ux[k] = uu[k].data();
        in.uy[k] = uu[3 + k].data();
        for (int c = 0; c < 3; ++c) in.e0[k][c] = e0[3 * k + c].data();
    }
    for (int j = 0; j < 6; ++j) in.d[j] = d[j].data();
    std::vector<double> out(n);
    kernels::triangle_energies(in, out);
    double ef = 0.0, es = 0.0;
    for (std::size_t t = 0; t < n; ++t) (m.region[t] == Region::Film ? ef : es) += out[t];
    if (film) *film = ef;
    if (sub) *sub = es;
    return ef + es;
}

}  // namespace

double elastic_energy(const Mesh& mesh, const ElasticTensor& c, const MismatchSpec& e0, const std::vector<double>& u,
                      double* film, double* substrate) {
    return energy_of(mesh, elements(mesh, c, e0), u, film, substrate);
}

ElasticState solve_elastic(std::shared_ptr<const Mesh> mesh, const ElasticTensor& c, const MismatchSpec& e0,
                           Gauge gauge) {
    const Mesh& m = *mesh;
    ElasticState st;
    st.mesh = mesh;
    const int nn = m.num_nodes();
    st.u.assign(2 * static_cast<std::size_t>(nn), 0.0);
    if (m.tris.empty() || c.is_zero()) return st;

    const auto el = elements(m, c, e0);

    // Active material graph: nodes joined by triangles with nonzero stiffness.
    std::vector<int> parent(nn);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<char> active(nn, 0);
    for (std::size_t t = 0; t < m.tris.size(); ++t) {
        if (all_zero(*el[t].d)) continue;
        const auto& v = m.tri_nodes[t];
        for (int k = 0; k < 3; ++k) active[v[k]] = 1;
        parent[find(v[1])] = find(v[0]);
        parent[find(v[2])] = find(v[0]);
    }

    std::vector<char> fixed(2 * nn, 0);
    for (int i = 0; i < nn; ++i)
        if (!active[i] || c.scalar_mode) fixed[2 * i + 1] = 1;
    for (int i = 0; i < nn; ++i)
        if (!active[i]) fixed[2 * i] = 1;

    std::vector<char> piece_clamped(nn, 0);
    if (gauge == Gauge::ClampSubstrateBottom) {
        double ymin = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < m.tris.size(); ++t)
            if (m.region[t] == Region::Substrate)
                for (int v : m.tris[t]) ymin = std::min(ymin, m.points[v].y);
        const double tol = 1e-9 * std::max(1.0, std::abs(ymin));
        for (std::size_t t = 0; t < m.tris.size(); ++t) {
            if (m.region[t] != Region::Substrate) continue;
            for (int k = 0; k < 3; ++k) {
                const int node = m.tri_nodes[t][k];
                if (!active[node] || m.node(node).y > ymin + tol) continue;
                if (!fixed[2 * node] || !fixed[2 * node + 1]) ++st.clamped_nodes;
                fixed[2 * node] = fixed[2 * node + 1] = 1;
                piece_clamped[find(node)] = 1;
            }
        }
    }

    // Per free piece: pin a translation (and a rotation unless scalar).
    std::vector<std::vector<int>> pieces(nn);
    for (int i = 0; i < nn; ++i)
        if (active[i]) pieces[find(i)].push_back(i);
    std::vector<int> rigid_pieces;
    for (int r = 0; r < nn; ++r) {
        if (pieces[r].empty()) continue;
        ++st.pieces;
        if (piece_clamped[r]) continue;
        rigid_pieces.push_back(r);
        const int a = pieces[r].front();
        int b = a;
        double best = -1.0;
        for (int i : pieces[r]) {
            const double d = distance(m.node(i), m.node(a));
            if (d > best) {
                best = d;
                b = i;
            }
        }
        fixed[2 * a] = 1;
        st.pinned_dofs += 1;
        if (!c.scalar_mode) {
            fixed[2 * a + 1] = 1;
            const Vec2 d = m.node(b) - m.node(a);
            fixed[2 * b + (std::abs(d.x) >= std::abs(d.y) ? 1 : 0)] = 1;
            st.pinned_dofs += 2;
        }
    }

    std::vector<int> red(2 * nn, -1);
    int nfree = 0;
    for (int d = 0; d < 2 * nn; ++d)
        if (!fixed[d]) red[d] = nfree++;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m.tris.size() * 36);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(nfree);
    for (std::size_t t = 0; t < m.tris.size(); ++t) {
        const Element& e = el[t];
        if (all_zero(*e.d)) continue;
        Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
        for (int k = 0; k < 3; ++k) {
            b(0, 2 * k) = e.gx[k];
            b(1, 2 * k + 1) = e.gy[k];
            b(2, 2 * k) = e.gy[k];
            b(2, 2 * k + 1) = e.gx[k];
        }
        const Eigen::Matrix3d d = dmat(*e.d);
        const Eigen::Matrix<double, 6, 6> ke = e.area * b.transpose() * d * b;
        Eigen::Vector3d ebar = Eigen::Vector3d::Zero();
        for (int q = 0; q < 3; ++q) ebar += Eigen::Vector3d(e.e0[q][0], e.e0[q][1], e.e0[q][2]);
        ebar /= 3.0;
        const Eigen::Matrix<double, 6, 1> fe = e.area * b.transpose() * d * ebar;
        int dof[6];
        for (int k = 0; k < 3; ++k) {
            dof[2 * k] = red[2 * m.tri_nodes[t][k]];
            dof[2 * k + 1] = red[2 * m.tri_nodes[t][k] + 1];
        }
        for (int i = 0; i < 6; ++i) {
            if (dof[i] < 0) continue;
            f[dof[i]] += fe[i];
            for (int j = 0; j < 6; ++j)
                if (dof[j] >= 0) trip.emplace_back(dof[i], dof[j], ke(i, j));
        }
    }

    if (nfree > 0 && f.norm() > 0.0) {
        Eigen::SparseMatrix<double> k(nfree, nfree);
        k.setFromTriplets(trip.begin(), trip.end());
        Eigen::VectorXd x;
        const double fn = f.norm();
        bool ok = false;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k);
        if (ldlt.info() == Eigen::Success) {
            x = ldlt.solve(f);
            st.residual = (k * x - f).norm() / fn;
            ok = ldlt.info() == Eigen::Success && x.allFinite() && st.residual <= 1e-8;
        }
        if (!ok) {
            Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
            cg.setTolerance(1e-10);
            cg.setMaxIterations(10 * nfree + 100);
            cg.compute(k);
            x = cg.solve(f);
            st.iterative = true;
            if (cg.info() != Eigen::Success) throw SolveError(ErrorKind::NonConvergence, "iterative solve failed");
            st.residual = (k * x - f).norm() / fn;
            if (!(st.residual <= 1e-8)) throw SolveError(ErrorKind::SingularSystem, "residual too large after gauge");
        }
        for (int d = 0; d < 2 * nn; ++d)
            if (red[d] >= 0) st.u[d] = x[red[d]];
    }

    // Mean-displacement / mean-rotation gauge on each unclamped piece.
    for (int r : rigid_pieces) {
        const auto& nodes = pieces[r];
        Vec2 xbar{}, ubar{};
        for (int i : nodes) {
            xbar += m.node(i);
            ubar += Vec2{st.u[2 * i], st.u[2 * i + 1]};
        }
        xbar = xbar / static_cast<double>(nodes.size());
        ubar = ubar / static_cast<double>(nodes.size());
        double num = 0.0, den = 0.0;
        if (!c.scalar_mode) {
            for (int i : nodes) {
                const Vec2 dx = m.node(i) - xbar;
                num += cross(dx, Vec2{st.u[2 * i], st.u[2 * i + 1]} - ubar);
                den += norm2(dx);
            }
        }
        const double theta = den > 0.0 ? num / den : 0.0;
        for (int i : nodes) {
            const Vec2 rot = perp(m.node(i) - xbar) * theta;
            st.u[2 * i] -= ubar.x + rot.x;
            if (!c.scalar_mode) st.u[2 * i + 1] -= ubar.y + rot.y;
        }
    }

    st.energy = energy_of(m, el, st.u, &st.energy_film, &st.energy_substrate);
    return st;
}

ElasticState elastic_for(const FreeCrystal& a, const Domain& dom, const ElasticSetup& setup) {
    ElasticState st;
    // Zero stiffness or zero mismatch: u = 0 is optimal with zero energy.
    if (setup.tensor.is_zero() || setup.mismatch.is_zero() || a.components.empty()) return st;
    MeshOptions opt;
    opt.include_substrate = false;
    if (!dom.substrates.empty())
        for (const auto& arc : classify_boundary(a, dom))
            if (arc.cls == ArcClass::Contact) opt.include_substrate = true;
    auto mesh = std::make_shared<const Mesh>(triangulate(a, dom, setup.h, opt));
    return solve_elastic(mesh, setup.tensor, setup.mismatch, opt.include_substrate ? setup.gauge : Gauge::MeanRigid);
}

}  // namespace sdri
