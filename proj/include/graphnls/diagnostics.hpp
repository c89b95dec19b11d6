#ifndef GRAPHNLS_DIAGNOSTICS_HPP
#define GRAPHNLS_DIAGNOSTICS_HPP

#include <functional>
#include <vector>

#include "graphnls/pulse.hpp"

namespace graphnls {

// Measurement helpers comparing a simulated field against the leading-order
// modulating-pulse theory.

double center_of_mass(const GraphGrid& grid, const Eigen::VectorXcd& psi);

struct ComparisonReport {
    double t = 0;
    double err_L2 = 0;
    double err_Linf = 0;
    double err_Linf_phase_opt = 0; // after minimizing over one global phase
    double com = 0;
    double com_theory = 0;
    double tail_amp = 0;
    double W = 0; // core half-width used for the tail measurement
};

// Weighted L2 / sup-norm differences; the phase-optimized variant minimizes
// sup |psi - e^{i theta} psi_th| over theta (seeded by the closed-form L2
// minimizer theta = arg<psi_th, psi>, and never worse than theta = 0).
ComparisonReport approximation_error(const GraphGrid& grid, const Eigen::VectorXcd& psi,
                                     const Eigen::VectorXcd& psi_theory);

// sup |psi| over nodes with |x - com| > W.
double tail_amplitude(const GraphGrid& grid, const Eigen::VectorXcd& psi, double W);

// Scaling demonstration for the constrained variational problem: for a cell
// profile g supported in [0, L1] and g_n(x) = n^{1/(p+1)} g(n x), the ratio
// ||g_n||_{L2} / ||g_n||_{L(p+1)} decays like n^{(1-p)/(2(p+1))}, so the
// constrained infimum is zero and is not attained.
struct VariationalDemoResult {
    double p, sigma;
    std::vector<double> n;
    std::vector<double> ratio; // ||g_n||_2 / ||g_n||_{p+1}
    std::vector<double> F;     // ratio^2 * ||Q||_{p+1}^{p+1}
    double slope;              // fitted d log(ratio) / d log(n)
    double slope_theory;       // (1-p) / (2 (p+1))
    double Q_norm_pp1;         // ||Q||_{p+1}^{p+1}
};

VariationalDemoResult variational_demo(const std::function<double(double)>& g, double support,
                                       double p, double sigma, const std::vector<double>& n_list);

// Ground state Q of the scalar stationary NLS with power nonlinearity.
double ground_state_Q(double xi, double p, double sigma);

} // namespace graphnls

#endif
