#ifndef GRAPHNLS_EVOLVE_HPP
#define GRAPHNLS_EVOLVE_HPP

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>
#include <vector>

#include "graphnls/graph.hpp"

namespace graphnls {

// Strang splitting for i psi_t + psi_xx + 2 |psi|^2 psi = 0: exact nonlinear
// phase rotations around an unpaired Crank-Nicolson (Cayley) linear step.

enum class SplitVariant { symmetric_half, paper_literal };

struct SplitStepConfig {
    double dt = 0.01;
    double T = 100.0;
    SplitVariant variant = SplitVariant::symmetric_half;
    int snapshot_stride = 0;   // steps between stored snapshots; 0 = first/last only
    double linear_tol = 1e-12; // direct sparse LU: solver residual stays below this
};

struct DiagnosticsSample {
    double t, mass, energy;
};

struct EvolutionTrace {
    std::vector<StateField> snapshots;
    std::vector<DiagnosticsSample> diagnostics;
};

// psi_i <- exp(i tau |psi_i|^2) psi_i.  This is the exact flow of
// i psi_t + 2 |psi|^2 psi = 0 over time tau/2.
void nonlinear_phase_step(StateField& field, double tau);

// (I - i dt/2 L) psi+ = (I + i dt/2 L) psi-, L the assembled d^2/dx^2
// operator.  The factorization is computed once and reused across steps.
class CrankNicolsonStep {
  public:
    CrankNicolsonStep(const GraphGrid& grid, const SparseOperator& op, double dt);
    void apply(StateField& field) const;
    double dt() const { return dt_; }

  private:
    double dt_;
    Eigen::SparseMatrix<std::complex<double>> A_;       // I - i dt/2 L
    Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> B_; // I + i dt/2 L
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>>> lu_;
};

// Discrete quantities tracked along the run: mass = integral |psi|^2,
// energy = integral |psi_x|^2 - |psi|^4 (stiffness form).
double mass_of(const GraphGrid& grid, const Eigen::VectorXcd& psi);
double energy_of(const GraphGrid& grid, const SparseOperator& op, const Eigen::VectorXcd& psi);

EvolutionTrace evolve(const StateField& psi0, const GraphGrid& grid, const SparseOperator& op,
                      const SplitStepConfig& config);

} // namespace graphnls

#endif
