#ifndef GRAPHNLS_SPECTRUM_HPP
#define GRAPHNLS_SPECTRUM_HPP

#include <complex>
#include <optional>
#include <vector>

#include "graphnls/bands.hpp"

namespace graphnls {

// Eigenvalues lambda of the linearized spatial dynamics.  Generic-band
// eigenvalues are roots of
//   G(lambda) = 9 cos(2 pi sqrt(wt)) - cos(2 (pi - L2) sqrt(wt)) - 8 cosh(2 pi lambda),
//   wt = -sigma - i c lambda,
// obtained from the band characteristic equation with omega = -sigma - i c lambda
// and cos(2 pi ell) = cosh(2 pi lambda).  Flat-band eigenvalues solve the
// linear equation sigma + i c lambda + pi^2 m^2 / L2^2 = 0.

struct SpectralParams {
    double sigma = 0.1625;
    double c = 0.5;
    double L1 = M_PI;
    double L2 = M_PI;
};

enum class RootClass { center, stable, unstable };

struct Root {
    std::complex<double> lambda;
    BandFamily family = BandFamily::generic;
    RootClass cls = RootClass::center;
    double residual = 0.0;
};

std::complex<double> char_residual(std::complex<double> lambda, const SpectralParams& p);
std::complex<double> char_residual_d(std::complex<double> lambda, const SpectralParams& p);

// Closed forms in the homogeneous case L2 = 0:
// lambda = i (c/2 - k) +- sqrt(sigma - c^2/4 + c k).
std::vector<Root> roots_homogeneous(double sigma, double c, int k_min, int k_max,
                                    double class_tol = 1e-9);

// Flat-band root (exact; the flat characteristic equation is linear).
Root flat_band_root(const SpectralParams& p, int m, double class_tol = 1e-9);

struct NewtonOptions {
    double tol = 1e-11;
    int max_iter = 50;
};

// Complex Newton on G with the analytic derivative.  Throws errc::numeric
// with the last iterate recorded in the message if it does not converge.
Root newton_root(std::complex<double> guess, const SpectralParams& p,
                 const NewtonOptions& opt = {});

std::optional<Root> try_newton_root(std::complex<double> guess, const SpectralParams& p,
                                    const NewtonOptions& opt = {});

// Rectangle scan: locate joint zero crossings of Re G and Im G, polish with
// Newton, deduplicate within 1e-8.
struct ScanRegion {
    double re_min, re_max, im_min, im_max;
    int nx = 200, ny = 200;
};
std::vector<Root> grid_scan(const ScanRegion& region, const SpectralParams& p);

struct RootPartition {
    std::vector<Root> center, stable, unstable;
};
RootPartition classify_roots(std::vector<Root> roots, double class_tol = 1e-9);
RootClass classify_one(std::complex<double> lambda, double class_tol = 1e-9);

// Parameter continuation of a root set, following the homogeneous-limit
// seeding strategy.  Schedules move either L1 (with L2 = 2 pi - L1) or sigma.
enum class ContParam { L1, sigma };

struct ContinuationSchedule {
    ContParam param = ContParam::L1;
    double from = 2.0 * M_PI;
    double to = M_PI;
    int n_steps = 2000;
};

struct CollisionEvent {
    double param_value;
    int path_a, path_b;
    std::complex<double> lambda;
};

struct ContinuationPath {
    int id;
    std::vector<double> param;
    std::vector<std::complex<double>> lambda;
};

struct ContinuationResult {
    std::vector<ContinuationPath> paths;
    std::vector<CollisionEvent> events;
};

struct ContinuationOptions {
    double collision_tol_scale = 1e-4; // collision_tol = scale * (1 + |lambda|)
    double perturb_factor = 10.0;      // perturb_eps = factor * collision_tol
    int max_halvings = 8;
    double jump_tol = 0.05; // scaled by (1 + |lambda|)
};

ContinuationResult continue_path(const std::vector<Root>& seeds,
                                 const ContinuationSchedule& schedule, SpectralParams params,
                                 const ContinuationOptions& opt = {});

// Bifurcation data (sigma0, c0, omega'', gamma, kappa) for a band point.
struct BifurcationData {
    int branch = 1;
    double ell0 = 0;
    double omega0 = 0;
    double sigma0 = 0;
    double c0 = 0;
    double omega_d2 = 0;
    double gamma = 1.0;
    double kappa = 1.0;
    BlochMode mode; // Bloch eigenfunction on `cell`
};

// cell: one-cell necklace grid matching (L1, L2).
BifurcationData bifurcation_point(int branch, double ell0, const GraphGrid& cell);
// Convenience: find ell0 from omega'(ell0) = c0 first.
BifurcationData bifurcation_for_speed(double c0, int branch, const GraphGrid& cell);

// Sech pulses exist off this bifurcation iff omega'' > 0 (gamma > 0 always).
bool has_homoclinic(const BifurcationData& bif);

// omega'' sign classification for a coalescence observed at lambda* = i ell*
// during a sigma-continuation at wave speed c.
double omega_d2_at_collision(std::complex<double> lambda_star, double sigma_star, double c,
                             double L1, double L2);

} // namespace graphnls

#endif
