#ifndef GRAPHNLS_BANDS_HPP
#define GRAPHNLS_BANDS_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "graphnls/graph.hpp"

namespace graphnls {

// Floquet-Bloch bands of -d^2/dx^2 on the necklace with period L1+L2 = 2*pi.
// Generic (non-flat) bands solve the trace equation
//   F(l, w) = 9 cos(2 pi sqrt(w)) - cos(2 (pi - L2) sqrt(w)) - 8 cos(2 pi l) = 0.

enum class BandFamily { flat, generic };

struct BandId {
    BandFamily family = BandFamily::generic;
    int m = 1; // generic: ascending-in-omega index at fixed l; flat: mode number
};

struct MonodromyMatrix {
    double omega;
    Eigen::Matrix2d M;
};

// Bloch mode on one necklace cell.  w(x) is the quasi-periodic solution,
// f(l,x) = exp(-i l x) w(x) its periodic part.  Coefficients follow the
// transfer-matrix construction: w = a cos(s x) + b sin(s x) on the segment,
// w = c cos(s u) + d sin(s u) on both semicircles (symmetric pair), s = sqrt(w).
struct BlochMode {
    double ell = 0;
    double omega = 0;
    BandId band;
    std::complex<double> a, b, c, d;
    double omega_d1 = 0, omega_d2 = 0;
    Eigen::VectorXcd f;  // samples on the cell grid nodes
    double sup_f = 1.0;  // sup |f| after normalization (== 1)
};

double flat_band_frequency(int m, double L2);

MonodromyMatrix build_monodromy(double omega, double L1, double L2);
double trace_monodromy(double omega, double L1, double L2);

// Residual of the characteristic equation (zero on a band).
double char_F(double ell, double omega, double L2);
// Partial derivatives of F needed for implicit differentiation.
double char_F_omega(double omega, double L2);
double char_F_ell(double ell);
double char_F_ellell(double ell);
double char_F_omegaomega(double omega, double L2);

// branch >= 1 counts roots in ascending omega at fixed ell.  Requires
// L1 + L2 = 2*pi.
double band_frequency(double ell, int branch, double L1, double L2);

// (omega', omega'') at a band point by implicit differentiation.
std::pair<double, double> band_derivatives(double ell, double omega, double L1, double L2);

// Solves omega'(ell) = c0 on the given branch, ell in [0, 1/2).
double solve_ell_for_speed(double c0, int branch, double L1, double L2);

// Builds the Bloch eigenfunction at a generic band point, sampled on
// `cell` (a one-cell necklace grid), normalized to sup|f| = 1 with f
// real-positive at the symmetry node.
BlochMode bloch_eigenfunction(double ell, double omega, const GraphGrid& cell);

// gamma = ||f||_L4^4 / ||f||_L2^2 over the cell.
double gamma_coefficient(const BlochMode& mode, const GraphGrid& cell);

// Explicit ladder bands for Ls = Lr = 1 (wavenumber convention: Bloch phase
// per cell equals ell).
enum class LadderFamily { symmetric, antisymmetric, lowest, flat };
double ladder_band(double ell, int k, LadderFamily family, bool plus_branch = true);

// Finite-difference oracle: lowest n_eigs eigenvalues of the discrete
// quasi-periodic cell problem, O(h^2) accurate.  theta is the Bloch phase
// over one cell: 2*pi*ell for the necklace, ell*Ls for the ladder.
std::vector<double> fd_bloch_eigs_necklace(double L1, double L2, double ell, int n_eigs,
                                           int pts_per_edge);
std::vector<double> fd_bloch_eigs_ladder(double Ls, double Lr, double ell, int n_eigs,
                                         int pts_per_edge);

} // namespace graphnls

#endif
