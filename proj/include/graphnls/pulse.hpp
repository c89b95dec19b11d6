#ifndef GRAPHNLS_PULSE_HPP
#define GRAPHNLS_PULSE_HPP

#include <complex>
#include <functional>

#include "graphnls/spectrum.hpp"

namespace graphnls {

// Sech envelope solving (1/2) w'' A'' - A + 2 gamma A^3 = 0:
//   A(X) = gamma^{-1/2} sech(kappa X),  kappa = sqrt(2 / w'').
struct PulseEnvelope {
    double amplitude; // gamma^{-1/2}
    double kappa;
    double omega_d2;
    double gamma;
    double operator()(double X) const { return amplitude / std::cosh(kappa * X); }
    // residual of the normal-form equation at X (analytic second derivative)
    double residual(double X) const;
};

PulseEnvelope sech_envelope(double omega_d2, double gamma);

struct CellBudget {
    int n0;    // half-width in cells down to the 1e-16 tail
    int n1;    // cells of travel
    int total; // 2 n0 + n1
};

CellBudget cell_counts(double eps, double kappa, double c0, double T);

// Leading-order modulating-pulse initial data
//   psi(0,x) = eps A(eps (x - x_c)) f(l0, x mod cell) exp(i l0 (x - x_c)),
// with x_c the mid-segment symmetry point of cell `center_cell`.  f is
// sampled once on the bifurcation's cell grid and mapped periodically.
StateField build_initial_data(const GraphGrid& grid, const GraphGrid& cell,
                              const BifurcationData& bif, double eps, int center_cell);

// The same modulating pulse at time t (transport + carrier/frequency phases):
//   psi(t,x) = eps A(eps(x - x_c - c0 t)) f e^{i l0 (x - x_c - c0 t)} e^{i (sigma0 + eps^2) t}.
StateField theory_field(double t, const GraphGrid& grid, const GraphGrid& cell,
                        const BifurcationData& bif, double eps, int center_cell);

struct ReversibilityReport {
    double im_at_x0;       // |Im psi| at the symmetry node
    double re_dpsi_at_x0;  // |Re d_xi psi| at the symmetry node
    bool pass;
};

ReversibilityReport reversibility_check(const GraphGrid& grid, const Eigen::VectorXcd& psi,
                                        int x0_node, double tol);

// Exact traveling soliton of the line NLS (homogeneous case):
//   phi(xi) = e^{i c xi / 2} sqrt(sigma - c^2/4) sech(sqrt(sigma - c^2/4) xi),
//   psi(t, x) = e^{i sigma t} phi(x - c t).
struct HomogeneousSoliton {
    double sigma, c, a; // a = sqrt(sigma - c^2/4)
    std::complex<double> profile(double xi) const;
    std::complex<double> psi(double t, double x) const;
    // residual of u'' - i c u' - sigma u + 2 |u|^2 u at xi
    std::complex<double> residual(double xi) const;
};

HomogeneousSoliton homogeneous_soliton(double sigma, double c);

// Traveling wave on the ladder: both rails carry phi(x - c t), each rung is
// constant at the incident vertex value.
StateField ladder_soliton(double sigma, double c, const GraphGrid& grid, double t = 0.0);

} // namespace graphnls

#endif
