#include <cstdio>
#include <string>
#include <vector>

#include "graphnls/io.hpp"

namespace {

constexpr const char* kUsage = R"(graphnls -- NLS dynamics on periodic metric graphs

usage: graphnls command=<cmd> [key=value ...] [--config=FILE]

commands:
  bands      necklace spectral bands (bands.csv)
  ladder     explicit ladder bands, Ls = Lr = 1 (ladder_bands.csv)
  spectrum   eigenvalues of the linearized spatial dynamics (spectrum.csv)
  continue   eigenvalue continuation in L1 or sigma (paths.csv, events.json)
  bifurcate  bifurcation constants (ell0, sigma0, omega'', gamma, kappa)
  simulate   split-step evolution of a traveling modulating pulse
  varidemo   scaling demonstration of the degenerate variational problem

Common keys (defaults): L1=pi L2=pi c=0.5 sigma=0.1625 epsilon=0.01
delta_t=0.01 T=100 pts_per_edge=30 variant=symmetric_half out_dir=. plot=0
Numbers accept a pi suffix: L1=1.5pi.  GRAPHNLS_OUT_DIR overrides out_dir.
)";

int exit_code_for(graphnls::errc kind) {
    switch (kind) {
        case graphnls::errc::config:
        case graphnls::errc::invalid_spec:
        case graphnls::errc::domain: return 2;
        case graphnls::errc::numeric: return 3;
        case graphnls::errc::io: return 4;
    }
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "-h" || args[0] == "--help" || args[0] == "help") {
        std::fputs(kUsage, stdout);
        return args.empty() ? 2 : 0;
    }
    try {
        graphnls::RunConfig cfg = graphnls::parse_config(args);
        graphnls::run(cfg);
    } catch (const graphnls::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
