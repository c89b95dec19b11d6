#include "graphnls/bands.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "graphnls/special.hpp"

namespace graphnls {

namespace {
constexpr double TWO_PI = 2.0 * M_PI;

void require_normalized(double L1, double L2) {
    if (std::abs(L1 + L2 - TWO_PI) > 1e-10)
        fail(errc::domain, "necklace band equations require L1 + L2 = 2*pi");
}
} // namespace

double flat_band_frequency(int m, double L2) {
    if (m < 1) fail(errc::domain, "flat band index must be >= 1");
    if (!(L2 > 0.0)) fail(errc::domain, "flat bands are absent for L2 = 0");
    return M_PI * M_PI * m * m / (L2 * L2);
}

// Coefficient transfer over one cell in the (value, derivative) basis
// w(0) = a, w'(0) = b:  w(x) = a cos(s x) + b sin(s x)/s, s = sqrt(omega).
// The entire extensions keep everything finite and real for omega <= 0.
MonodromyMatrix build_monodromy(double omega, double L1, double L2) {
    double c1 = cos_sqrt(omega, L1), s1 = sinc_sqrt(omega, L1);
    double c2 = cos_sqrt(omega, L2), s2 = sinc_sqrt(omega, L2);
    Eigen::Matrix2d seg, semi;
    // joint: value continuity, derivative split across the two semicircles
    seg << c1, s1, -0.5 * omega * s1, 0.5 * c1;
    // cell boundary: value continuity, derivatives of the pair recombine
    semi << c2, s2, -2.0 * omega * s2, 2.0 * c2;
    MonodromyMatrix r;
    r.omega = omega;
    r.M = semi * seg;
    return r;
}

double trace_monodromy(double omega, double L1, double L2) {
    double c1 = cos_sqrt(omega, L1), s1 = sinc_sqrt(omega, L1);
    double c2 = cos_sqrt(omega, L2), s2 = sinc_sqrt(omega, L2);
    // omega * s1 * s2 == sin(s L1) sin(s L2)
    return 2.0 * c2 * c1 - 2.5 * omega * s2 * s1;
}

double char_F(double ell, double omega, double L2) {
    return 9.0 * cos_sqrt(omega, TWO_PI) - cos_sqrt(omega, 2.0 * (M_PI - L2)) -
           8.0 * std::cos(TWO_PI * ell);
}

double char_F_omega(double omega, double L2) {
    return 9.0 * dcos_sqrt(omega, TWO_PI) - dcos_sqrt(omega, 2.0 * (M_PI - L2));
}

double char_F_ell(double ell) { return 8.0 * TWO_PI * std::sin(TWO_PI * ell); }

double char_F_ellell(double ell) { return 8.0 * TWO_PI * TWO_PI * std::cos(TWO_PI * ell); }

double char_F_omegaomega(double omega, double L2) {
    return 9.0 * d2cos_sqrt(omega, TWO_PI) - d2cos_sqrt(omega, 2.0 * (M_PI - L2));
}

namespace {

// Newton in omega from a nearby guess; certifies |F| <= 1e-10.
double polish_omega(double ell, double w_guess, double L2) {
    double w = w_guess;
    for (int it = 0; it < 60; ++it) {
        double Fv = char_F(ell, w, L2);
        if (std::abs(Fv) < 1e-13) break;
        double Fw = char_F_omega(w, L2);
        if (std::abs(Fw) < 1e-14) break;
        w -= Fv / Fw;
    }
    if (std::abs(char_F(ell, w, L2)) > 1e-10)
        fail(errc::numeric, "band root polish failed the residual certificate");
    return w;
}

// Ascending roots (omega >= 0) of F(ell, .) = 0.  Tangent double roots
// (closed gaps, possible at ell in {0, -1/2}) are emitted twice.
std::vector<double> band_roots(double ell, int count, double L2) {
    std::vector<double> roots;
    const double s_max = count + 3.0;
    const double ds = 5e-4;
    auto P = [&](double s) { return char_F(ell, s * s, L2); };

    // In s the root at omega = 0 is a tangency, so handle it before the scan.
    if (std::abs(char_F(ell, 0.0, L2)) < 1e-12) roots.push_back(0.0);

    double s_prev = 1e-7, v_prev = P(s_prev);
    double v_prev2 = v_prev;
    for (double s = s_prev + ds; s <= s_max && static_cast<int>(roots.size()) < count + 2;
         s += ds) {
        double v = P(s);
        if (v_prev == 0.0) {
            roots.push_back(s_prev * s_prev);
        } else if (v_prev * v < 0.0) {
            double lo = s_prev, hi = s, flo = v_prev;
            for (int it = 0; it < 50; ++it) {
                double mid = 0.5 * (lo + hi), fm = P(mid);
                if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
            }
            double sr = 0.5 * (lo + hi);
            roots.push_back(polish_omega(ell, sr * sr, L2));
        } else if (std::abs(v_prev) < 1e-3 && v_prev2 * v_prev > 0.0 && v_prev * v > 0.0 &&
                   std::abs(v_prev) <= std::abs(v_prev2) && std::abs(v_prev) <= std::abs(v)) {
            // near-zero local extremum without sign change: tangent candidate
            double sr = s_prev;
            for (int it = 0; it < 50; ++it) {
                double w = sr * sr;
                double d1 = 2.0 * sr * char_F_omega(w, L2);
                double d2 = 2.0 * char_F_omega(w, L2) + 4.0 * w * char_F_omegaomega(w, L2);
                if (std::abs(d2) < 1e-14) break;
                double step = d1 / d2;
                sr -= step;
                if (std::abs(step) < 1e-14) break;
            }
            double w = sr * sr;
            if (std::abs(char_F(ell, w, L2)) < 1e-9 &&
                (roots.empty() || std::abs(w - roots.back()) > 1e-8)) {
                roots.push_back(w);
                roots.push_back(w);
            }
        }
        v_prev2 = v_prev;
        s_prev = s;
        v_prev = v;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace

double band_frequency(double ell, int branch, double L1, double L2) {
    require_normalized(L1, L2);
    if (branch < 1) fail(errc::domain, "branch must be >= 1");
    auto roots = band_roots(ell, branch, L2);
    if (static_cast<int>(roots.size()) < branch)
        fail(errc::numeric, "band root enumeration found too few roots");
    return roots[static_cast<size_t>(branch - 1)];
}

std::pair<double, double> band_derivatives(double ell, double omega, double L1, double L2) {
    require_normalized(L1, L2);
    double Fw = char_F_omega(omega, L2);
    if (std::abs(Fw) < 1e-12) fail(errc::numeric, "band edge: dF/domega vanishes");
    double d1 = -char_F_ell(ell) / Fw;
    // second implicit derivative; F_{ell omega} vanishes identically
    double d2 = -(char_F_ellell(ell) + char_F_omegaomega(omega, L2) * d1 * d1) / Fw;
    return {d1, d2};
}

double solve_ell_for_speed(double c0, int branch, double L1, double L2) {
    require_normalized(L1, L2);
    if (c0 == 0.0) return 0.0; // omega is even in ell, so omega'(0) = 0

    const double sgn = c0 > 0.0 ? 1.0 : -1.0;
    const int n_scan = 200;
    const double ell_lo = sgn * 1e-3, ell_hi = sgn * 0.4995;

    // March the branch root along ell, tracking omega locally.
    double w = band_frequency(ell_lo, branch, L1, L2);
    auto speed_at = [&](double ell, double& w_io) {
        w_io = polish_omega(ell, w_io, L2);
        return band_derivatives(ell, w_io, L1, L2).first - c0;
    };
    double ell_a = ell_lo, f_a = speed_at(ell_a, w);
    double w_a = w;
    bool bracketed = false;
    double ell_b = 0, f_b = 0;
    for (int i = 1; i <= n_scan; ++i) {
        double ell = ell_lo + (ell_hi - ell_lo) * i / n_scan;
        double f;
        try {
            f = speed_at(ell, w);
        } catch (const error&) {
            continue;
        }
        if (f_a * f <= 0.0) {
            ell_b = ell;
            f_b = f;
            bracketed = true;
            break;
        }
        ell_a = ell;
        f_a = f;
        w_a = w;
    }
    if (!bracketed) fail(errc::domain, "speed out of range for this band");

    double wa = w_a;
    for (int it = 0; it < 80 && std::abs(ell_b - ell_a) > 1e-15; ++it) {
        double mid = 0.5 * (ell_a + ell_b);
        double wm = wa;
        double fm = speed_at(mid, wm);
        if (f_a * fm <= 0.0) {
            ell_b = mid;
            f_b = fm;
        } else {
            ell_a = mid;
            f_a = fm;
            wa = wm;
        }
    }
    (void)f_b;
    double ell = 0.5 * (ell_a + ell_b);
    double wloc = polish_omega(ell, wa, L2);
    for (int it = 0; it < 30; ++it) {
        auto [d1, d2] = band_derivatives(ell, wloc, L1, L2);
        if (std::abs(d2) < 1e-14) break;
        double step = (d1 - c0) / d2;
        ell -= step;
        wloc = polish_omega(ell, wloc, L2);
        if (std::abs(step) < 1e-15) break;
    }
    if (std::abs(band_derivatives(ell, wloc, L1, L2).first - c0) > 1e-10)
        fail(errc::numeric, "speed equation did not converge");
    return ell;
}

BlochMode bloch_eigenfunction(double ell, double omega, const GraphGrid& cell) {
    const double L1 = cell.spec.L1, L2 = cell.spec.L2;
    require_normalized(L1, L2);
    if (cell.spec.n_cells != 1) fail(errc::domain, "bloch_eigenfunction expects a one-cell grid");

    const cplx mu = std::exp(cplx(0.0, TWO_PI * ell));
    MonodromyMatrix mm = build_monodromy(omega, L1, L2);
    if (std::abs(mm.M.trace() - 2.0 * std::cos(TWO_PI * ell)) > 1e-8)
        fail(errc::domain, "(ell, omega) is not on a band: multiplier mismatch");

    // eigenvector of M for multiplier mu in the (value, derivative) basis
    cplx a, b;
    if (std::abs(mm.M(0, 1)) > std::abs(mm.M(1, 0))) {
        a = mm.M(0, 1);
        b = mu - mm.M(0, 0);
    } else {
        a = mu - mm.M(1, 1);
        b = mm.M(1, 0);
    }
    Eigen::Vector2cd v(a, b);
    if ((mm.M.cast<cplx>() * v - mu * v).norm() > 1e-8 * v.norm())
        fail(errc::domain, "multiplier is not an eigenvalue of M(omega)");

    double c1 = cos_sqrt(omega, L1), s1 = sinc_sqrt(omega, L1);
    cplx c = a * c1 + b * s1;
    cplx d = -0.5 * omega * s1 * a + 0.5 * c1 * b;

    BlochMode mode;
    mode.ell = ell;
    mode.omega = omega;
    mode.band.family = BandFamily::generic;
    mode.a = a;
    mode.b = b;
    mode.c = c;
    mode.d = d;

    mode.f.resize(cell.size());
    for (int i = 0; i < cell.size(); ++i) {
        double x = cell.axial(i);
        cplx w = (x <= L1) ? a * cos_sqrt(omega, x) + b * sinc_sqrt(omega, x)
                           : c * cos_sqrt(omega, x - L1) + d * sinc_sqrt(omega, x - L1);
        mode.f(i) = std::exp(cplx(0.0, -ell * x)) * w;
    }

    double m = mode.f.cwiseAbs().maxCoeff();
    if (m == 0.0) fail(errc::numeric, "degenerate Bloch eigenvector");
    cplx at_x0 = mode.f(cell.x0_node);
    if (std::abs(at_x0) < 1e-14 * m)
        fail(errc::numeric, "Bloch mode vanishes at the symmetry point; phase undefined");
    cplx scale = std::abs(at_x0) / (m * at_x0);
    mode.f *= scale;
    mode.a *= scale;
    mode.b *= scale;
    mode.c *= scale;
    mode.d *= scale;
    mode.sup_f = 1.0;

    auto [d1, d2] = band_derivatives(ell, omega, L1, L2);
    mode.omega_d1 = d1;
    mode.omega_d2 = d2;
    return mode;
}

double gamma_coefficient(const BlochMode& mode, const GraphGrid& cell) {
    double l4 = integrate(cell, mode.f, 4.0);
    double l2 = integrate(cell, mode.f, 2.0);
    if (l2 <= 0.0) fail(errc::numeric, "zero-mass Bloch mode");
    return l4 / l2;
}

double ladder_band(double ell, int k, LadderFamily family, bool plus_branch) {
    const double eps = 1e-12;
    switch (family) {
        case LadderFamily::symmetric: {
            double arg = 2.0 * std::cos(ell) - 1.0;
            if (arg < -1.0 - eps || arg > 1.0 + eps)
                fail(errc::domain, "symmetric family needs ell in [-pi/2, pi/2]");
            double r = std::acos(std::clamp(arg, -1.0, 1.0));
            double s = (plus_branch ? r : -r) + 2.0 * k * M_PI;
            return s * s;
        }
        case LadderFamily::antisymmetric: {
            double arg = 1.0 + 2.0 * std::cos(ell);
            if (arg < -1.0 - eps || arg > 1.0 + eps)
                fail(errc::domain, "antisymmetric family needs |ell| in [pi/2, pi]");
            double s = std::acos(std::clamp(arg, -1.0, 1.0)) + k * M_PI;
            return s * s;
        }
        case LadderFamily::lowest: {
            double arg = 1.0 + 2.0 * std::cos(ell);
            if (arg < 1.0 - eps) fail(errc::domain, "lowest band needs ell in [-pi/2, pi/2]");
            double t = std::acosh(std::max(arg, 1.0));
            return -t * t;
        }
        case LadderFamily::flat: {
            if (k < 0) fail(errc::domain, "flat ladder bands need k >= 0");
            double s = (2 * k + 1) * M_PI;
            return s * s;
        }
    }
    fail(errc::domain, "unknown ladder family");
}

namespace {

// Dense quasi-periodic cell eigenproblem.  Vertex values are eliminated
// through second-order one-sided (3-point) Kirchhoff balances so the O(h^2)
// truncation of the interior stencils survives at the vertices.
//
// Phase semantics: `ph0`/`ph1` multiply the stored vertex unknown to give
// the value this edge actually sees at that end (wrap factor e^{i theta}
// when the end sits one period to the right of the stored vertex).  In the
// vertex balance the same edge's interior values then enter with the
// inverse factor.  `flip` negates the edge's flux contribution at that end;
// the ladder band formulas hold under the convention in which the rung flux
// enters both rail balances with reversed sign, so the rung oracle uses it.
struct CellEdge {
    int n;
    double h;
    int v0, v1;
    int first;
    cplx ph0{1.0, 0.0}, ph1{1.0, 0.0};
    bool flip0 = false, flip1 = false;
};

std::vector<double> cell_eigs(int n_vert, const std::vector<CellEdge>& edges, int n_eigs) {
    int n_int = 0;
    for (auto& e : edges) n_int += e.n;

    Eigen::MatrixXcd vcoef = Eigen::MatrixXcd::Zero(n_vert, n_int);
    Eigen::VectorXd vdiag = Eigen::VectorXd::Zero(n_vert);
    for (auto& e : edges) {
        if (e.n < 2) fail(errc::domain, "cell oracle needs >= 2 interior nodes per edge");
        int i1 = e.first, i2 = e.first + 1;
        int j1 = e.first + e.n - 1, j2 = e.first + e.n - 2;
        double sg0 = e.flip0 ? -1.0 : 1.0, sg1 = e.flip1 ? -1.0 : 1.0;
        cplx inv0 = 1.0 / e.ph0, inv1 = 1.0 / e.ph1;
        vdiag(e.v0) += sg0 * 3.0 / (2.0 * e.h);
        vcoef(e.v0, i1) += sg0 * inv0 * 4.0 / (2.0 * e.h);
        vcoef(e.v0, i2) -= sg0 * inv0 / (2.0 * e.h);
        vdiag(e.v1) += sg1 * 3.0 / (2.0 * e.h);
        vcoef(e.v1, j1) += sg1 * inv1 * 4.0 / (2.0 * e.h);
        vcoef(e.v1, j2) -= sg1 * inv1 / (2.0 * e.h);
    }
    for (int v = 0; v < n_vert; ++v) {
        if (std::abs(vdiag(v)) < 1e-14) fail(errc::numeric, "singular vertex balance");
        vcoef.row(v) /= vdiag(v);
    }

    // interior rows of -(d^2/dx^2)
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n_int, n_int);
    for (auto& e : edges) {
        double ih2 = 1.0 / (e.h * e.h);
        for (int j = 0; j < e.n; ++j) {
            int row = e.first + j;
            A(row, row) += 2.0 * ih2;
            if (j == 0)
                A.row(row) -= ih2 * e.ph0 * vcoef.row(e.v0);
            else
                A(row, row - 1) -= ih2;
            if (j == e.n - 1)
                A.row(row) -= ih2 * e.ph1 * vcoef.row(e.v1);
            else
                A(row, row + 1) -= ih2;
        }
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) fail(errc::numeric, "cell eigensolver did not converge");
    std::vector<double> eigs;
    for (int i = 0; i < n_int; ++i) {
        cplx lam = es.eigenvalues()(i);
        if (std::abs(lam.imag()) < 1e-6 * (1.0 + std::abs(lam.real())))
            eigs.push_back(lam.real());
    }
    std::sort(eigs.begin(), eigs.end());
    if (static_cast<int>(eigs.size()) > n_eigs) eigs.resize(static_cast<size_t>(n_eigs));
    return eigs;
}

int oracle_count(int pts, double len, double mean) {
    return std::max<int>(5, static_cast<int>(std::lround(pts * len / mean)));
}

} // namespace

std::vector<double> fd_bloch_eigs_necklace(double L1, double L2, double ell, int n_eigs,
                                           int pts_per_edge) {
    if (n_eigs < 1) fail(errc::domain, "n_eigs must be >= 1");
    cplx wrap = std::exp(cplx(0.0, TWO_PI * ell));
    std::vector<CellEdge> edges;
    if (L2 == 0.0) {
        int n = std::max(pts_per_edge, 5);
        double h = L1 / (n + 1);
        edges.push_back({n, h, 0, 0, 0, cplx(1.0), wrap});
        return cell_eigs(1, edges, n_eigs);
    }
    double mean = (L1 + 2.0 * L2) / 3.0;
    int k_seg = oracle_count(pts_per_edge, L1, mean);
    int k_semi = oracle_count(pts_per_edge, L2, mean);
    double h_seg = L1 / (k_seg + 1), h_semi = L2 / (k_semi + 1);

    // vertices: 0 = cell-left (wrap target), 1 = segment/semicircle joint
    int first = 0;
    edges.push_back({k_seg, h_seg, 0, 1, first});
    first += k_seg;
    edges.push_back({k_semi, h_semi, 1, 0, first, cplx(1.0), wrap});
    first += k_semi;
    edges.push_back({k_semi, h_semi, 1, 0, first, cplx(1.0), wrap});
    return cell_eigs(2, edges, n_eigs);
}

std::vector<double> fd_bloch_eigs_ladder(double Ls, double Lr, double ell, int n_eigs,
                                         int pts_per_edge) {
    if (n_eigs < 1) fail(errc::domain, "n_eigs must be >= 1");
    cplx wrap = std::exp(cplx(0.0, ell * Ls));
    double mean = (2.0 * Ls + Lr) / 3.0;
    int k_rail = oracle_count(pts_per_edge, Ls, mean);
    int k_rung = oracle_count(pts_per_edge, Lr, mean);
    double h_rail = Ls / (k_rail + 1), h_rung = Lr / (k_rung + 1);

    // vertices: 0 = T, 1 = B; rails wrap onto their own left vertex
    std::vector<CellEdge> edges;
    int first = 0;
    edges.push_back({k_rail, h_rail, 0, 0, first, cplx(1.0), wrap});
    first += k_rail;
    edges.push_back({k_rail, h_rail, 1, 1, first, cplx(1.0), wrap});
    first += k_rail;
    edges.push_back({k_rung, h_rung, 0, 1, first, cplx(1.0), cplx(1.0), true, true});
    return cell_eigs(2, edges, n_eigs);
}

} // namespace graphnls
