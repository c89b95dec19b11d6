#ifndef GRAPHNLS_IO_HPP
#define GRAPHNLS_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "graphnls/evolve.hpp"
#include "graphnls/spectrum.hpp"

namespace graphnls {

enum class Command { bands, spectrum, continuation, bifurcate, simulate, ladder, varidemo };

// Flat key=value configuration (TOML subset): one assignment per line in a
// config file, the same tokens on the command line, flags overriding the
// file.  Unknown keys are rejected.  Numeric values accept a "pi" suffix
// ("0.5pi" = pi/2).
struct RunConfig {
    Command command = Command::bands;

    // graph
    Topology topology = Topology::necklace;
    double L1 = M_PI, L2 = M_PI;
    double Ls = 1.0, Lr = 1.0;
    int n_cells = 0; // 0 = derived from the cell budget where applicable
    int pts_per_edge = 30;

    // band/branch selection
    int branch = 1;
    int n_branches = 4;
    int ell_samples = 201;
    int n_eigs = 6;

    // spectral parameters
    double sigma = 0.1625;
    double c = 0.5;
    int k_min = -6, k_max = 6;

    // continuation schedule
    ContParam continue_param = ContParam::L1;
    double param_from = 2.0 * M_PI;
    double param_to = M_PI;
    int n_steps = 2000;

    // scan window
    double scan_re_min = -1.0, scan_re_max = 1.0;
    double scan_im_min = -3.0, scan_im_max = 3.0;
    int scan_nx = 200, scan_ny = 200;

    // evolution
    double epsilon = 0.01;
    double delta_t = 0.01;
    double T = 100.0;
    SplitVariant variant = SplitVariant::symmetric_half;
    int snapshot_stride = 0; // 0 = initial/middle/final

    // variational demo
    double p = 3.0;
    std::vector<double> n_list = {1, 2, 4, 8, 16, 32, 64};

    std::string out_dir = ".";
    bool plot = false;
    unsigned seed = 0; // consumed by property tests only

    std::map<std::string, std::string> echo; // raw key=value pairs as parsed
};

// Parses command-line tokens (key=value, or --config=FILE to load a file
// first; later assignments override earlier ones).
RunConfig parse_config(const std::vector<std::string>& args);

// Executes the configured command, writing all artifacts (and manifest.json,
// which is written even when the run fails).
void run(const RunConfig& config);

// Deterministic float formatting used by every CSV/JSON writer: shortest
// form with 17 significant digits.
std::string fmt17(double v);

} // namespace graphnls

#endif
