#include "graphnls/io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graphnls/diagnostics.hpp"

namespace graphnls {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

double parse_number(const std::string& key, const std::string& raw) {
    std::string s = raw;
    double mult = 1.0;
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
        mult = M_PI;
        s = s.substr(0, s.size() - 2);
        if (s.empty()) s = "1";
    }
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v * mult;
    } catch (const std::exception&) {
        fail(errc::config, "key '" + key + "': cannot parse number '" + raw + "'");
    }
}

int parse_int(const std::string& key, const std::string& raw) {
    try {
        size_t used = 0;
        int v = std::stoi(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        fail(errc::config, "key '" + key + "': cannot parse integer '" + raw + "'");
    }
}

Command parse_command(const std::string& v) {
    if (v == "bands") return Command::bands;
    if (v == "spectrum") return Command::spectrum;
    if (v == "continue") return Command::continuation;
    if (v == "bifurcate") return Command::bifurcate;
    if (v == "simulate") return Command::simulate;
    if (v == "ladder") return Command::ladder;
    if (v == "varidemo") return Command::varidemo;
    fail(errc::config, "unknown command '" + v + "'");
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& val) {
    cfg.echo[key] = val;
    if (key == "command") cfg.command = parse_command(val);
    else if (key == "topology") {
        if (val == "necklace") cfg.topology = Topology::necklace;
        else if (val == "ladder") cfg.topology = Topology::ladder;
        else fail(errc::config, "key 'topology': expected necklace|ladder");
    }
    else if (key == "L1") cfg.L1 = parse_number(key, val);
    else if (key == "L2") cfg.L2 = parse_number(key, val);
    else if (key == "Ls") cfg.Ls = parse_number(key, val);
    else if (key == "Lr") cfg.Lr = parse_number(key, val);
    else if (key == "n_cells") cfg.n_cells = parse_int(key, val);
    else if (key == "pts_per_edge") cfg.pts_per_edge = parse_int(key, val);
    else if (key == "branch") cfg.branch = parse_int(key, val);
    else if (key == "n_branches") cfg.n_branches = parse_int(key, val);
    else if (key == "ell_samples") cfg.ell_samples = parse_int(key, val);
    else if (key == "n_eigs") cfg.n_eigs = parse_int(key, val);
    else if (key == "sigma") cfg.sigma = parse_number(key, val);
    else if (key == "c") cfg.c = parse_number(key, val);
    else if (key == "k_min") cfg.k_min = parse_int(key, val);
    else if (key == "k_max") cfg.k_max = parse_int(key, val);
    else if (key == "continue_param") {
        if (val == "L1") cfg.continue_param = ContParam::L1;
        else if (val == "sigma") cfg.continue_param = ContParam::sigma;
        else fail(errc::config, "key 'continue_param': expected L1|sigma");
    }
    else if (key == "param_from") cfg.param_from = parse_number(key, val);
    else if (key == "param_to") cfg.param_to = parse_number(key, val);
    else if (key == "n_steps") cfg.n_steps = parse_int(key, val);
    else if (key == "scan_re_min") cfg.scan_re_min = parse_number(key, val);
    else if (key == "scan_re_max") cfg.scan_re_max = parse_number(key, val);
    else if (key == "scan_im_min") cfg.scan_im_min = parse_number(key, val);
    else if (key == "scan_im_max") cfg.scan_im_max = parse_number(key, val);
    else if (key == "scan_nx") cfg.scan_nx = parse_int(key, val);
    else if (key == "scan_ny") cfg.scan_ny = parse_int(key, val);
    else if (key == "epsilon") cfg.epsilon = parse_number(key, val);
    else if (key == "delta_t") cfg.delta_t = parse_number(key, val);
    else if (key == "T") cfg.T = parse_number(key, val);
    else if (key == "variant") {
        if (val == "symmetric_half") cfg.variant = SplitVariant::symmetric_half;
        else if (val == "paper_literal") cfg.variant = SplitVariant::paper_literal;
        else fail(errc::config, "key 'variant': expected symmetric_half|paper_literal");
    }
    else if (key == "snapshot_stride") cfg.snapshot_stride = parse_int(key, val);
    else if (key == "p") cfg.p = parse_number(key, val);
    else if (key == "n_list") {
        cfg.n_list.clear();
        std::stringstream ss(val);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.n_list.push_back(parse_number(key, tok));
        if (cfg.n_list.empty()) fail(errc::config, "key 'n_list': empty list");
    }
    else if (key == "out_dir") cfg.out_dir = val;
    else if (key == "plot") cfg.plot = (val == "1" || val == "true");
    else if (key == "seed") cfg.seed = static_cast<unsigned>(parse_int(key, val));
    else fail(errc::config, "unknown key '" + key + "'");
}

void apply_line(RunConfig& cfg, std::string line) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) return;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(errc::config, "expected key=value, got '" + line + "'");
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
    val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
    if (key.empty()) fail(errc::config, "empty key in '" + line + "'");
    apply_kv(cfg, key, val);
}

void validate(const RunConfig& cfg) {
    bool necklace_math = cfg.command == Command::bands || cfg.command == Command::spectrum ||
                         cfg.command == Command::continuation ||
                         cfg.command == Command::bifurcate || cfg.command == Command::simulate;
    if (necklace_math && std::abs(cfg.L1 + cfg.L2 - 2.0 * M_PI) > 1e-9)
        fail(errc::config, "necklace band computations require L1 + L2 = 2*pi");
    if (cfg.L1 <= 0.0 || cfg.L2 < 0.0) fail(errc::config, "lengths must satisfy L1 > 0, L2 >= 0");
    if (cfg.pts_per_edge < 1) fail(errc::config, "pts_per_edge must be >= 1");
    if (cfg.command == Command::simulate) {
        if (!(cfg.epsilon > 0.0)) fail(errc::config, "epsilon must be positive");
        if (!(cfg.delta_t > 0.0)) fail(errc::config, "delta_t must be positive");
        if (!(cfg.T >= cfg.delta_t)) fail(errc::config, "T must cover at least one step");
        if (cfg.c == 0.0) fail(errc::config, "wave speed c must be nonzero");
    }
    if (cfg.command == Command::varidemo && !(cfg.p > 1.0))
        fail(errc::config, "varidemo requires p > 1");
}

} // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    for (const std::string& a : args) {
        if (a.rfind("--config=", 0) == 0) {
            std::ifstream in(a.substr(9));
            if (!in) fail(errc::io, "cannot open config file '" + a.substr(9) + "'");
            std::string line;
            while (std::getline(in, line)) apply_line(cfg, line);
        } else {
            std::string tok = a;
            if (tok.rfind("--", 0) == 0) tok = tok.substr(2);
            apply_line(cfg, tok);
        }
    }
    if (const char* env = std::getenv("GRAPHNLS_OUT_DIR")) cfg.out_dir = env;
    validate(cfg);
    return cfg;
}

namespace {

// ---- writers ------------------------------------------------------------

class CsvFile {
  public:
    CsvFile(const fs::path& path, const std::string& header) {
        out_.open(path);
        if (!out_) fail(errc::io, "cannot open " + path.string());
        out_ << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail(errc::io, "cannot open " + path.string());
    out << j.dump(2) << "\n";
}

const char* family_name(BandFamily f) { return f == BandFamily::flat ? "flat" : "generic"; }

const char* class_name(RootClass c) {
    switch (c) {
        case RootClass::center: return "center";
        case RootClass::stable: return "stable";
        case RootClass::unstable: return "unstable";
    }
    return "?";
}

// ---- minimal SVG line/scatter plots --------------------------------------

struct SvgPlot {
    double x0, x1, y0, y1; // data window
    int W = 640, H = 480;
    std::ostringstream body;

    double px(double x) const { return 60 + (x - x0) / (x1 - x0) * (W - 80); }
    double py(double y) const { return H - 40 - (y - y0) / (y1 - y0) * (H - 70); }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color) {
        body << "<polyline fill='none' stroke='" << color << "' stroke-width='1' points='";
        for (size_t i = 0; i < xs.size(); ++i)
            body << px(xs[i]) << "," << py(ys[i]) << " ";
        body << "'/>\n";
    }
    void scatter(const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::string& color, double r = 2.5) {
        for (size_t i = 0; i < xs.size(); ++i)
            body << "<circle cx='" << px(xs[i]) << "' cy='" << py(ys[i]) << "' r='" << r
                 << "' fill='" << color << "'/>\n";
    }
    void save(const fs::path& path, const std::string& title) {
        std::ofstream out(path);
        if (!out) fail(errc::io, "cannot open " + path.string());
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
            << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
        out << "<text x='20' y='20' font-size='14'>" << title << "</text>\n";
        // frame + corner labels
        out << "<rect x='60' y='30' width='" << W - 80 << "' height='" << H - 70
            << "' fill='none' stroke='black'/>\n";
        out << "<text x='55' y='" << H - 22 << "' font-size='10' text-anchor='end'>" << x0
            << "</text>\n";
        out << "<text x='" << W - 20 << "' y='" << H - 22 << "' font-size='10' text-anchor='end'>"
            << x1 << "</text>\n";
        out << "<text x='55' y='" << H - 40 << "' font-size='10' text-anchor='end'>" << y0
            << "</text>\n";
        out << "<text x='55' y='38' font-size='10' text-anchor='end'>" << y1 << "</text>\n";
        out << body.str() << "</svg>\n";
    }
};

// ---- command pipelines ----------------------------------------------------

json g_manifest_extra;

void run_bands(const RunConfig& cfg, const fs::path& dir) {
    CsvFile csv(dir / "bands.csv", "ell,branch,family,omega");
    std::vector<std::vector<double>> curves(static_cast<size_t>(cfg.n_branches));
    std::vector<double> ells;
    for (int i = 0; i < cfg.ell_samples; ++i) {
        double ell = -0.5 + static_cast<double>(i) / (cfg.ell_samples - 1);
        ells.push_back(ell);
        for (int b = 1; b <= cfg.n_branches; ++b) {
            double w = band_frequency(ell, b, cfg.L1, cfg.L2);
            curves[static_cast<size_t>(b - 1)].push_back(w);
            csv.row({fmt17(ell), std::to_string(b), "generic", fmt17(w)});
        }
    }
    if (cfg.L2 > 0.0) {
        for (int m = 1; m <= cfg.n_branches; ++m) {
            double w = flat_band_frequency(m, cfg.L2);
            for (double ell : ells) csv.row({fmt17(ell), std::to_string(m), "flat", fmt17(w)});
        }
    }
    if (cfg.plot) {
        double wmax = 0;
        for (auto& c : curves) for (double w : c) wmax = std::max(wmax, w);
        SvgPlot plot{-0.5, 0.5, 0.0, wmax * 1.05};
        const char* colors[] = {"steelblue", "darkorange", "seagreen", "crimson", "purple", "gray"};
        for (size_t b = 0; b < curves.size(); ++b)
            plot.polyline(ells, curves[b], colors[b % 6]);
        plot.save(dir / "bands.svg", "necklace spectral bands omega_m(ell)");
    }
}

void run_ladder(const RunConfig& cfg, const fs::path& dir) {
    CsvFile csv(dir / "ladder_bands.csv", "ell,k,family,omega");
    auto sweep = [&](LadderFamily fam, const char* name, int k, bool plus, double lo, double hi) {
        std::vector<double> xs, ys;
        for (int i = 0; i <= 200; ++i) {
            double ell = lo + (hi - lo) * i / 200.0;
            try {
                double w = ladder_band(ell, k, fam, plus);
                csv.row({fmt17(ell), std::to_string(k), name, fmt17(w)});
                xs.push_back(ell);
                ys.push_back(w);
            } catch (const error&) {
                // outside the family domain
            }
        }
        return std::pair(xs, ys);
    };
    SvgPlot plot{-M_PI, M_PI, -4.0, 45.0};
    for (int k = 0; k <= 2; ++k) {
        auto sp = sweep(LadderFamily::symmetric, "symmetric", k, true, -M_PI_2, M_PI_2);
        auto sm = sweep(LadderFamily::symmetric, "symmetric", k, false, -M_PI_2, M_PI_2);
        auto a1 = sweep(LadderFamily::antisymmetric, "antisymmetric", k, true, M_PI_2, M_PI);
        auto a2 = sweep(LadderFamily::antisymmetric, "antisymmetric", k, true, -M_PI, -M_PI_2);
        if (cfg.plot) {
            plot.polyline(sp.first, sp.second, "steelblue");
            plot.polyline(sm.first, sm.second, "steelblue");
            plot.polyline(a1.first, a1.second, "darkorange");
            plot.polyline(a2.first, a2.second, "darkorange");
        }
    }
    auto low = sweep(LadderFamily::lowest, "lowest", 0, true, -M_PI_2, M_PI_2);
    for (int k = 0; k <= 1; ++k) {
        double w = ladder_band(0.0, k, LadderFamily::flat);
        for (int i = 0; i <= 200; ++i)
            csv.row({fmt17(-M_PI + 2.0 * M_PI * i / 200.0), std::to_string(k), "flat", fmt17(w)});
        if (cfg.plot)
            plot.polyline({-M_PI, M_PI}, {w, w}, "seagreen");
    }
    if (cfg.plot) {
        plot.polyline(low.first, low.second, "darkorange");
        plot.save(dir / "ladder_bands.svg", "ladder spectral bands (Ls = Lr = 1)");
    }
}

void write_spectrum_csv(const fs::path& path, const std::vector<Root>& roots) {
    CsvFile csv(path, "re_lambda,im_lambda,family,class,residual");
    for (const Root& r : roots)
        csv.row({fmt17(r.lambda.real()), fmt17(r.lambda.imag()), family_name(r.family),
                 class_name(r.cls), fmt17(r.residual)});
}

void run_spectrum(const RunConfig& cfg, const fs::path& dir) {
    SpectralParams p{cfg.sigma, cfg.c, cfg.L1, cfg.L2};
    ScanRegion region{cfg.scan_re_min, cfg.scan_re_max, cfg.scan_im_min, cfg.scan_im_max,
                      cfg.scan_nx, cfg.scan_ny};
    std::vector<Root> roots = grid_scan(region, p);
    if (cfg.L2 > 0.0 && cfg.c != 0.0) {
        for (int m = 1; m <= 8; ++m) {
            Root fr = flat_band_root(p, m);
            if (fr.lambda.imag() >= region.im_min && fr.lambda.imag() <= region.im_max)
                roots.push_back(fr);
        }
    }
    write_spectrum_csv(dir / "spectrum.csv", roots);
    if (cfg.plot) {
        SvgPlot plot{region.re_min, region.re_max, region.im_min, region.im_max};
        std::vector<double> xs, ys;
        for (auto& r : roots) {
            xs.push_back(r.lambda.real());
            ys.push_back(r.lambda.imag());
        }
        plot.scatter(xs, ys, "steelblue");
        plot.save(dir / "spectrum.svg", "eigenvalues of the linearized spatial dynamics");
    }
}

void run_continue(const RunConfig& cfg, const fs::path& dir) {
    SpectralParams p{cfg.sigma, cfg.c, cfg.L1, cfg.L2};
    ContinuationSchedule sched{cfg.continue_param, cfg.param_from, cfg.param_to, cfg.n_steps};
    std::vector<Root> seeds;
    if (cfg.continue_param == ContParam::L1) {
        p.L1 = cfg.param_from;
        p.L2 = 2.0 * M_PI - cfg.param_from;
        seeds = roots_homogeneous(cfg.sigma, cfg.c, cfg.k_min, cfg.k_max);
    } else {
        p.sigma = cfg.param_from;
        ScanRegion region{cfg.scan_re_min, cfg.scan_re_max, cfg.scan_im_min, cfg.scan_im_max,
                          cfg.scan_nx, cfg.scan_ny};
        seeds = grid_scan(region, p);
    }
    if (seeds.empty()) fail(errc::numeric, "no seeds found for the continuation");
    ContinuationResult res = continue_path(seeds, sched, p);

    CsvFile csv(dir / "paths.csv", "path_id,param_value,re_lambda,im_lambda");
    for (const auto& path : res.paths)
        for (size_t i = 0; i < path.param.size(); ++i)
            csv.row({std::to_string(path.id), fmt17(path.param[i]),
                     fmt17(path.lambda[i].real()), fmt17(path.lambda[i].imag())});
    json events = json::array();
    for (const auto& e : res.events)
        events.push_back({{"param", e.param_value},
                          {"path_a", e.path_a},
                          {"path_b", e.path_b},
                          {"re", e.lambda.real()},
                          {"im", e.lambda.imag()}});
    write_json(dir / "events.json", events);
    g_manifest_extra["n_events"] = res.events.size();

    if (cfg.plot) {
        double plo = std::min(sched.from, sched.to), phi = std::max(sched.from, sched.to);
        double rmax = 1e-12;
        for (auto& path : res.paths)
            for (auto& l : path.lambda) rmax = std::max(rmax, std::abs(l.real()));
        SvgPlot pr{plo, phi, -rmax * 1.1, rmax * 1.1};
        double imax = 0;
        for (auto& path : res.paths)
            for (auto& l : path.lambda) imax = std::max(imax, std::abs(l.imag()));
        SvgPlot pi{plo, phi, -imax * 1.1, imax * 1.1};
        const char* colors[] = {"steelblue", "darkorange", "seagreen", "crimson", "purple",
                                "teal", "olive", "maroon"};
        for (auto& path : res.paths) {
            std::vector<double> re, im;
            for (auto& l : path.lambda) {
                re.push_back(l.real());
                im.push_back(l.imag());
            }
            pr.polyline(path.param, re, colors[path.id % 8]);
            pi.polyline(path.param, im, colors[path.id % 8]);
        }
        pr.save(dir / "paths_re.svg", "Re(lambda) along the continuation");
        pi.save(dir / "paths_im.svg", "Im(lambda) along the continuation");
    }
}

GraphGrid one_cell(const RunConfig& cfg) {
    MetricGraphSpec spec;
    spec.topology = Topology::necklace;
    spec.L1 = cfg.L1;
    spec.L2 = cfg.L2;
    spec.n_cells = 1;
    spec.pts_per_edge = cfg.pts_per_edge;
    return build_necklace(spec);
}

void run_bifurcate(const RunConfig& cfg, const fs::path& dir) {
    GraphGrid cell = one_cell(cfg);
    BifurcationData bif = bifurcation_for_speed(cfg.c, cfg.branch, cell);
    std::printf("ell0=%s sigma0=%s c0=%s omega_d2=%s gamma=%s kappa=%s homoclinic=%d\n",
                fmt17(bif.ell0).c_str(), fmt17(bif.sigma0).c_str(), fmt17(bif.c0).c_str(),
                fmt17(bif.omega_d2).c_str(), fmt17(bif.gamma).c_str(), fmt17(bif.kappa).c_str(),
                has_homoclinic(bif) ? 1 : 0);
    g_manifest_extra["bifurcation"] = {
        {"ell0", bif.ell0},        {"sigma0", bif.sigma0}, {"c0", bif.c0},
        {"omega_d2", bif.omega_d2}, {"gamma", bif.gamma},   {"kappa", bif.kappa},
        {"homoclinic", has_homoclinic(bif)}};
    (void)dir;
}

void write_snapshot(const fs::path& path, const GraphGrid& grid, const StateField& field) {
    json j;
    j["t"] = field.t;
    json edges = json::array();
    for (const Edge& e : grid.edges) {
        json vals = json::array();
        for (int node : grid.edge_chain(e)) {
            vals.push_back({field.psi(node).real(), field.psi(node).imag()});
        }
        edges.push_back({{"kind", static_cast<int>(e.kind)},
                         {"cell", e.cell},
                         {"length", e.length},
                         {"values", vals}});
    }
    j["edges"] = edges;
    write_json(path, j);
}

void run_simulate(const RunConfig& cfg, const fs::path& dir) {
    GraphGrid cell = one_cell(cfg);
    BifurcationData bif = bifurcation_for_speed(cfg.c, cfg.branch, cell);
    if (!has_homoclinic(bif))
        fail(errc::numeric, "no traveling pulse at this bifurcation (omega'' <= 0)");

    CellBudget budget = cell_counts(cfg.epsilon, bif.kappa, bif.c0, cfg.T);
    MetricGraphSpec spec = cell.spec;
    spec.n_cells = cfg.n_cells > 0 ? cfg.n_cells : budget.total;
    spec.boundary = Boundary::dirichlet_ends;
    GraphGrid grid = build_necklace(spec);
    SparseOperator op = assemble_laplacian(grid);

    StateField psi0 = build_initial_data(grid, cell, bif, cfg.epsilon, budget.n0);
    double com0 = center_of_mass(grid, psi0.psi);

    SplitStepConfig sscfg;
    sscfg.dt = cfg.delta_t;
    sscfg.T = cfg.T;
    sscfg.variant = cfg.variant;
    long n_steps = static_cast<long>(std::ceil(cfg.T / cfg.delta_t - 1e-12));
    sscfg.snapshot_stride =
        cfg.snapshot_stride > 0 ? cfg.snapshot_stride : static_cast<int>((n_steps + 1) / 2);
    EvolutionTrace trace = evolve(psi0, grid, op, sscfg);

    {
        CsvFile csv(dir / "trace.csv", "t,mass,energy");
        for (const auto& d : trace.diagnostics)
            csv.row({fmt17(d.t), fmt17(d.mass), fmt17(d.energy)});
    }

    double W = 10.0 / (cfg.epsilon * bif.kappa);
    std::vector<double> ts, coms, comsth, e2, einf;
    {
        CsvFile csv(dir / "diagnostics.csv",
                    "t,mass,energy,com,com_theory,err_L2,err_Linf,err_Linf_phase_opt,tail_amp");
        int snap_index = 0;
        for (const StateField& snap : trace.snapshots) {
            StateField th = theory_field(snap.t, grid, cell, bif, cfg.epsilon, budget.n0);
            ComparisonReport rep = approximation_error(grid, snap.psi, th.psi);
            rep.t = snap.t;
            rep.com = center_of_mass(grid, snap.psi);
            rep.com_theory = com0 + bif.c0 * snap.t;
            rep.W = W;
            rep.tail_amp = tail_amplitude(grid, snap.psi, W);
            csv.row({fmt17(rep.t), fmt17(mass_of(grid, snap.psi)),
                     fmt17(energy_of(grid, op, snap.psi)), fmt17(rep.com),
                     fmt17(rep.com_theory), fmt17(rep.err_L2), fmt17(rep.err_Linf),
                     fmt17(rep.err_Linf_phase_opt), fmt17(rep.tail_amp)});
            ts.push_back(rep.t);
            coms.push_back(rep.com);
            comsth.push_back(rep.com_theory);
            e2.push_back(rep.err_L2);
            einf.push_back(rep.err_Linf);
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%03d.json", snap_index++);
            write_snapshot(dir / name, grid, snap);
        }
    }
    g_manifest_extra["grid"] = json::parse(grid.describe_json());
    g_manifest_extra["budget"] = {{"n0", budget.n0}, {"n1", budget.n1}, {"total", budget.total}};

    if (cfg.plot) {
        // amplitude profiles of the snapshots
        double xmax = grid.axial(grid.size() - 1);
        double amax = 0;
        for (auto& s : trace.snapshots) amax = std::max(amax, s.psi.cwiseAbs().maxCoeff());
        SvgPlot prof{0, xmax, 0, amax * 1.1};
        const char* colors[] = {"steelblue", "darkorange", "seagreen", "crimson"};
        int ci = 0;
        for (auto& s : trace.snapshots) {
            std::vector<double> xs, ys;
            for (int i = 0; i < grid.size(); ++i) {
                if (!grid.edges.empty() && grid.pattern_of[static_cast<size_t>(i)] >= 0) {
                    xs.push_back(grid.axial(i));
                    ys.push_back(std::abs(s.psi(i)));
                }
            }
            prof.scatter(xs, ys, colors[ci++ % 4], 1.0);
        }
        prof.save(dir / "snapshots.svg", "|psi| snapshots along the necklace");

        SvgPlot pcom{0, cfg.T, *std::min_element(coms.begin(), coms.end()) - 1,
                     *std::max_element(coms.begin(), coms.end()) + 1};
        pcom.polyline(ts, coms, "steelblue");
        pcom.polyline(ts, comsth, "crimson");
        pcom.save(dir / "com.svg", "center of mass: measured vs c0 t");
        double emax = std::max(*std::max_element(e2.begin(), e2.end()),
                               *std::max_element(einf.begin(), einf.end()));
        SvgPlot perr{0, cfg.T, 0, emax * 1.1 + 1e-12};
        perr.polyline(ts, e2, "steelblue");
        perr.polyline(ts, einf, "darkorange");
        perr.save(dir / "errors.svg", "L2 and sup-norm deviation from the leading order");
    }
}

void run_varidemo(const RunConfig& cfg, const fs::path& dir) {
    double L1 = cfg.L1;
    auto g = [L1](double x) {
        if (x <= 0.0 || x >= L1) return 0.0;
        double s = std::sin(M_PI * x / L1);
        return s * s;
    };
    VariationalDemoResult res = variational_demo(g, L1, cfg.p, cfg.sigma > 0 ? cfg.sigma : 1.0,
                                                 cfg.n_list);
    CsvFile csv(dir / "varidemo.csv", "n,ratio,F");
    for (size_t i = 0; i < res.n.size(); ++i)
        csv.row({fmt17(res.n[i]), fmt17(res.ratio[i]), fmt17(res.F[i])});
    std::printf("fitted slope=%s theory=%s\n", fmt17(res.slope).c_str(),
                fmt17(res.slope_theory).c_str());
    g_manifest_extra["varidemo"] = {{"slope", res.slope}, {"slope_theory", res.slope_theory}};
    if (cfg.plot) {
        std::vector<double> lx, ly;
        for (size_t i = 0; i < res.n.size(); ++i) {
            lx.push_back(std::log10(res.n[i]));
            ly.push_back(std::log10(res.ratio[i]));
        }
        SvgPlot plot{lx.front(), lx.back(), ly.back() * 1.1, ly.front() + 0.1};
        plot.polyline(lx, ly, "steelblue");
        plot.scatter(lx, ly, "crimson");
        plot.save(dir / "varidemo.svg", "log10 ratio vs log10 n");
    }
}

} // namespace

void run(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(errc::io, "cannot create output directory " + dir.string());

    g_manifest_extra = json::object();
    auto t_start = std::chrono::steady_clock::now();
    json manifest;
    manifest["config"] = cfg.echo;
    manifest["versions"] = {{"graphnls", "1.0.0"},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)}};
    auto finish = [&](const char* status, const error* err) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();
        manifest["wall_time_ms"] = ms;
        manifest["status"] = status;
        if (err) {
            manifest["error"] = {{"kind", static_cast<int>(err->kind())},
                                 {"message", err->what()}};
        }
        for (auto& [k, v] : g_manifest_extra.items()) manifest[k] = v;
        write_json(dir / "manifest.json", manifest);
    };

    try {
        switch (cfg.command) {
            case Command::bands: run_bands(cfg, dir); break;
            case Command::spectrum: run_spectrum(cfg, dir); break;
            case Command::continuation: run_continue(cfg, dir); break;
            case Command::bifurcate: run_bifurcate(cfg, dir); break;
            case Command::simulate: run_simulate(cfg, dir); break;
            case Command::ladder: run_ladder(cfg, dir); break;
            case Command::varidemo: run_varidemo(cfg, dir); break;
        }
    } catch (const error& e) {
        finish("error", &e);
        throw;
    } catch (const std::exception& e) {
        error wrapped(errc::numeric, e.what());
        finish("error", &wrapped);
        throw;
    }
    finish("ok", nullptr);
}

} // namespace graphnls
