#include <doctest.h>

#include <cmath>

#include "graphnls/diagnostics.hpp"

using namespace graphnls;

namespace {

GraphGrid necklace(double L1, double L2, int cells, int pts = 30,
                   Boundary b = Boundary::none) {
    MetricGraphSpec s;
    s.topology = Topology::necklace;
    s.L1 = L1;
    s.L2 = L2;
    s.n_cells = cells;
    s.pts_per_edge = pts;
    s.boundary = b;
    return build_necklace(s);
}

} // namespace

TEST_CASE("center of mass") {
    GraphGrid g = necklace(2.0 * M_PI, 0.0, 10, 40);
    double xc = g.axial(g.node_at(5, g.x0_pattern));
    Eigen::VectorXcd psi(g.size());
    for (int i = 0; i < g.size(); ++i) psi(i) = 1.0 / std::cosh(g.axial(i) - xc);
    double h = g.edges[0].h;
    CHECK(std::abs(center_of_mass(g, psi) - xc) <= h);

    // translating the field translates the center of mass
    double delta = 4.0 * 2.0 * M_PI; // whole cells, keeps the sampling pattern
    Eigen::VectorXcd shifted(g.size());
    for (int i = 0; i < g.size(); ++i) shifted(i) = 1.0 / std::cosh(g.axial(i) - xc - delta);
    CHECK(std::abs(center_of_mass(g, shifted) - (xc + delta)) <= h);

    CHECK_THROWS_AS(center_of_mass(g, Eigen::VectorXcd::Zero(g.size())), error);
}

TEST_CASE("theory field equals initial data at t = 0 and transports afterwards") {
    GraphGrid cell = necklace(M_PI, M_PI, 1);
    BifurcationData bif = bifurcation_for_speed(0.5, 1, cell);
    double eps = 0.05;
    CellBudget budget = cell_counts(eps, bif.kappa, bif.c0, 5.0);
    GraphGrid grid = necklace(M_PI, M_PI, budget.total, 30, Boundary::dirichlet_ends);

    StateField init = build_initial_data(grid, cell, bif, eps, budget.n0);
    StateField th0 = theory_field(0.0, grid, cell, bif, eps, budget.n0);
    CHECK((init.psi - th0.psi).cwiseAbs().maxCoeff() <= 1e-14);

    // |psi_th(t)| is the t-translation of |psi_th(0)| by c0 t.  On the fixed
    // grid the quadrature of (moving envelope) x (periodic |f|^2) beats at the
    // cell period, so exact mass equality holds at whole-cell shifts and a
    // quadrature-level bound in between.
    double t_cell = 2.0 * M_PI / bif.c0; // shift by exactly one cell
    StateField th_cell = theory_field(t_cell, grid, cell, bif, eps, budget.n0);
    double m0 = integrate(grid, th0.psi, 2.0);
    CHECK(std::abs(integrate(grid, th_cell.psi, 2.0) - m0) <= 1e-12 * m0);
    StateField th = theory_field(3.0, grid, cell, bif, eps, budget.n0);
    CHECK(std::abs(integrate(grid, th.psi, 2.0) - m0) <= 1e-3 * m0);
    double com_slope = (center_of_mass(grid, th.psi) - center_of_mass(grid, th0.psi)) / 3.0;
    CHECK(com_slope == doctest::Approx(bif.c0).epsilon(2e-3));
}

TEST_CASE("approximation error and the phase-optimized variant") {
    GraphGrid cell = necklace(M_PI, M_PI, 1);
    BifurcationData bif = bifurcation_for_speed(0.5, 1, cell);
    double eps = 0.05;
    CellBudget budget = cell_counts(eps, bif.kappa, bif.c0, 5.0);
    GraphGrid grid = necklace(M_PI, M_PI, budget.total, 30, Boundary::dirichlet_ends);
    StateField th = theory_field(1.0, grid, cell, bif, eps, budget.n0);

    ComparisonReport same = approximation_error(grid, th.psi, th.psi);
    CHECK(same.err_L2 <= 1e-14);
    CHECK(same.err_Linf <= 1e-14);
    CHECK(same.err_Linf_phase_opt <= 1e-14);

    Eigen::VectorXcd rotated = std::exp(cplx(0.0, 0.3)) * th.psi;
    ComparisonReport rot = approximation_error(grid, rotated, th.psi);
    CHECK(rot.err_Linf > 1e-3);
    CHECK(rot.err_Linf_phase_opt <= 1e-12);
    CHECK(rot.err_Linf_phase_opt <= rot.err_Linf);
}

TEST_CASE("tail amplitude") {
    GraphGrid g = necklace(2.0 * M_PI, 0.0, 12, 40);
    double xc = g.axial(g.node_at(6, g.x0_pattern));
    double a = 0.7;
    Eigen::VectorXcd psi(g.size());
    for (int i = 0; i < g.size(); ++i) psi(i) = a / std::cosh(a * (g.axial(i) - xc));
    double W = 8.0;
    double tail = tail_amplitude(g, psi, W);
    CHECK(tail <= a / std::cosh(a * W) + 1e-12);
    CHECK(tail > 0.0);
}

TEST_CASE("ground state value") {
    CHECK(ground_state_Q(0.0, 3.0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("variational scaling demonstration") {
    double L1 = M_PI;
    auto g = [L1](double x) {
        if (x <= 0.0 || x >= L1) return 0.0;
        double s = std::sin(M_PI * x / L1);
        return s * s;
    };
    std::vector<double> ns = {1, 2, 4, 8, 16, 32, 64};
    for (double p : {2.0, 3.0}) {
        VariationalDemoResult res = variational_demo(g, L1, p, 1.0, ns);
        CHECK(std::abs(res.slope - res.slope_theory) <= 0.01 * std::abs(res.slope_theory));
        // exact scaling identity: ratio(n) = n^{(1-p)/(2(p+1))} ratio(1)
        for (size_t i = 0; i < ns.size(); ++i) {
            double predicted = res.ratio[0] * std::pow(ns[i], res.slope_theory);
            CHECK(res.ratio[i] == doctest::Approx(predicted).epsilon(1e-6));
        }
        // F decreases strictly to 0
        for (size_t i = 1; i < res.F.size(); ++i) CHECK(res.F[i] < res.F[i - 1]);
    }
    CHECK_THROWS_AS(variational_demo(g, L1, 0.5, 1.0, ns), error);
}
