#include "graphnls/pulse.hpp"

#include <cmath>

namespace graphnls {

double PulseEnvelope::residual(double X) const {
    double sech = 1.0 / std::cosh(kappa * X);
    double A = amplitude * sech;
    double App = amplitude * kappa * kappa * (sech - 2.0 * sech * sech * sech);
    return 0.5 * omega_d2 * App - A + 2.0 * gamma * A * A * A;
}

PulseEnvelope sech_envelope(double omega_d2, double gamma) {
    if (!(omega_d2 > 0.0))
        fail(errc::domain, "no homoclinic envelope: omega'' must be positive");
    if (!(gamma > 0.0)) fail(errc::domain, "gamma must be positive");
    PulseEnvelope env;
    env.omega_d2 = omega_d2;
    env.gamma = gamma;
    env.kappa = std::sqrt(2.0 / omega_d2);
    env.amplitude = 1.0 / std::sqrt(gamma);
    return env;
}

CellBudget cell_counts(double eps, double kappa, double c0, double T) {
    if (!(eps > 0.0 && kappa > 0.0 && c0 > 0.0 && T > 0.0))
        fail(errc::domain, "cell_counts needs positive inputs");
    // tail below machine precision: eps * exp(-eps kappa |x|) <= 1e-16
    double n0 = -std::log(1e-16 / eps) / (2.0 * M_PI * eps * kappa);
    double n1 = c0 * T / (2.0 * M_PI);
    CellBudget b;
    b.n0 = static_cast<int>(std::ceil(n0));
    b.n1 = static_cast<int>(std::ceil(n1));
    b.total = 2 * b.n0 + b.n1;
    return b;
}

namespace {

// f value per pattern index, from the mode sampled on the one-cell grid.
Eigen::VectorXcd pattern_samples(const GraphGrid& cell, const BlochMode& mode) {
    Eigen::VectorXcd fpat(cell.nodes_per_cell);
    for (int i = 0; i < cell.size(); ++i) {
        int c = cell.cell_of[static_cast<size_t>(i)];
        int pat = cell.pattern_of[static_cast<size_t>(i)];
        if (c == 0 && pat >= 0) fpat(pat) = mode.f(i);
    }
    return fpat;
}

StateField modulating_pulse(double t, const GraphGrid& grid, const GraphGrid& cell,
                            const BifurcationData& bif, double eps, int center_cell,
                            bool check_tail) {
    if (grid.nodes_per_cell != cell.nodes_per_cell)
        fail(errc::domain, "grid and cell discretizations do not match");
    if (center_cell < 0 || center_cell >= grid.spec.n_cells)
        fail(errc::domain, "center cell outside the grid");
    PulseEnvelope env = sech_envelope(bif.omega_d2, bif.gamma);
    Eigen::VectorXcd fpat = pattern_samples(cell, bif.mode);
    const double x_c = grid.axial(grid.node_at(center_cell, grid.x0_pattern));
    const double drift = bif.c0 * t;
    const double freq = bif.sigma0 + eps * eps;
    const cplx rot = std::exp(cplx(0.0, freq * t));

    StateField field;
    field.t = t;
    field.psi.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double xi = grid.axial(i) - x_c - drift;
        cplx f = fpat(grid.pattern_of[static_cast<size_t>(i)]);
        field.psi(i) = eps * env(eps * xi) * f * std::exp(cplx(0.0, bif.ell0 * xi)) * rot;
    }
    if (check_tail) {
        double bound = 1e-12 * eps;
        double tail = std::max(std::abs(field.psi(0)),
                               std::abs(field.psi(grid.n_vertices - 1)));
        if (tail > bound)
            fail(errc::domain, "pulse tail exceeds 1e-12*eps at the boundary: increase n0");
    }
    for (int i = 0; i < grid.size(); ++i)
        if (grid.is_dirichlet(i)) field.psi(i) = 0.0;
    return field;
}

} // namespace

StateField build_initial_data(const GraphGrid& grid, const GraphGrid& cell,
                              const BifurcationData& bif, double eps, int center_cell) {
    return modulating_pulse(0.0, grid, cell, bif, eps, center_cell, /*check_tail=*/true);
}

StateField theory_field(double t, const GraphGrid& grid, const GraphGrid& cell,
                        const BifurcationData& bif, double eps, int center_cell) {
    return modulating_pulse(t, grid, cell, bif, eps, center_cell, /*check_tail=*/false);
}

ReversibilityReport reversibility_check(const GraphGrid& grid, const Eigen::VectorXcd& psi,
                                        int x0_node, double tol) {
    // x0 sits mid-segment, so its axial neighbors are the adjacent nodes.
    ReversibilityReport rep;
    rep.im_at_x0 = std::abs(psi(x0_node).imag());
    double h = 0.0;
    for (const Edge& e : grid.edges) {
        if (x0_node > e.first && x0_node < e.first + e.n_int - 1) { h = e.h; break; }
    }
    if (h == 0.0) fail(errc::domain, "symmetry node needs interior neighbors on its edge");
    cplx dpsi = (psi(x0_node + 1) - psi(x0_node - 1)) / (2.0 * h);
    rep.re_dpsi_at_x0 = std::abs(dpsi.real());
    rep.pass = rep.im_at_x0 <= tol && rep.re_dpsi_at_x0 <= tol;
    return rep;
}

cplx HomogeneousSoliton::profile(double xi) const {
    return std::exp(cplx(0.0, 0.5 * c * xi)) * (a / std::cosh(a * xi));
}

cplx HomogeneousSoliton::psi(double t, double x) const {
    return std::exp(cplx(0.0, sigma * t)) * profile(x - c * t);
}

cplx HomogeneousSoliton::residual(double xi) const {
    // u = e^{i c xi/2} g, g = a sech(a xi); derivatives taken analytically
    double sech = 1.0 / std::cosh(a * xi);
    double tanh = std::tanh(a * xi);
    double g = a * sech;
    double gp = -a * a * sech * tanh;
    double gpp = a * a * a * (sech - 2.0 * sech * sech * sech);
    cplx e = std::exp(cplx(0.0, 0.5 * c * xi));
    cplx u = e * g;
    cplx up = e * (cplx(0.0, 0.5 * c) * g + gp);
    cplx upp = e * (-0.25 * c * c * g + cplx(0.0, c) * gp + gpp);
    return upp - cplx(0.0, c) * up - sigma * u + 2.0 * std::norm(u) * u;
}

HomogeneousSoliton homogeneous_soliton(double sigma, double c) {
    double disc = sigma - 0.25 * c * c;
    if (!(disc > 0.0)) fail(errc::domain, "no soliton: requires sigma > c^2/4");
    return {sigma, c, std::sqrt(disc)};
}

StateField ladder_soliton(double sigma, double c, const GraphGrid& grid, double t) {
    if (grid.spec.topology != Topology::ladder)
        fail(errc::domain, "ladder_soliton requires a ladder grid");
    HomogeneousSoliton sol = homogeneous_soliton(sigma, c);
    StateField field;
    field.t = t;
    field.psi.resize(grid.size());
    // Rails carry the traveling profile; every rung node (including its two
    // vertices, which are rail nodes) holds the vertex value, constant along
    // the rung since rung axial coordinates equal the column position.
    for (int i = 0; i < grid.size(); ++i) field.psi(i) = sol.psi(t, grid.axial(i));
    for (int i = 0; i < grid.size(); ++i)
        if (grid.is_dirichlet(i)) field.psi(i) = 0.0;
    return field;
}

} // namespace graphnls
