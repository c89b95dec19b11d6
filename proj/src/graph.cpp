#include "graphnls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace graphnls {

namespace {

// Interior node count for an edge: round(pts * len / mean_len), at least 5.
int interior_count(int pts, double len, double mean_len) {
    int n = static_cast<int>(std::lround(pts * len / mean_len));
    return std::max(n, 5);
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) fail(errc::invalid_spec, std::string(name) + " must be positive");
}

struct Builder {
    GraphGrid g;
    std::vector<double> axial, weight;
    int next_node = 0;

    int add_vertex(double ax) {
        axial.push_back(ax);
        weight.push_back(0.0);
        return next_node++;
    }

    // Adds the edge plus its interior nodes; updates weights and incidence.
    int add_edge(EdgeKind kind, int cell, int v0, int v1, double len, int n_int,
                 double ax0, double ax1, bool axial_constant = false) {
        Edge e;
        e.kind = kind;
        e.cell = cell;
        e.length = len;
        e.n_int = n_int;
        e.h = len / (n_int + 1);
        e.v0 = v0;
        e.v1 = v1;
        e.first = next_node;
        e.ax0 = ax0;
        e.ax1 = ax1;
        for (int j = 1; j <= n_int; ++j) {
            double s = static_cast<double>(j) / (n_int + 1);
            axial.push_back(axial_constant ? ax0 : ax0 + s * (ax1 - ax0));
            weight.push_back(e.h);
            next_node++;
        }
        weight[static_cast<size_t>(v0)] += 0.5 * e.h;
        weight[static_cast<size_t>(v1)] += 0.5 * e.h;
        int id = static_cast<int>(g.edges.size());
        g.incidence[static_cast<size_t>(v0)].push_back({id, 0});
        g.incidence[static_cast<size_t>(v1)].push_back({id, 1});
        g.edges.push_back(e);
        g.total_length += len;
        return id;
    }

    void finish() {
        g.axial = Eigen::Map<Eigen::VectorXd>(axial.data(), static_cast<long>(axial.size()));
        g.weight = Eigen::Map<Eigen::VectorXd>(weight.data(), static_cast<long>(weight.size()));
        g.dirichlet.assign(axial.size(), 0);
    }
};

} // namespace

int GraphGrid::node_at(int cell, int pattern) const {
    if (nodes_per_cell <= 0) fail(errc::domain, "grid has no cell pattern");
    if (pattern == 0 && cell == spec.n_cells) {
        // right end of the last cell
        return n_vertices - 1;
    }
    for (int i = 0; i < size(); ++i)
        if (cell_of[static_cast<size_t>(i)] == cell && pattern_of[static_cast<size_t>(i)] == pattern)
            return i;
    fail(errc::domain, "no node at requested (cell, pattern)");
}

std::vector<int> GraphGrid::edge_chain(const Edge& e) const {
    std::vector<int> chain;
    chain.reserve(static_cast<size_t>(e.n_int) + 2);
    chain.push_back(e.v0);
    for (int j = 0; j < e.n_int; ++j) chain.push_back(e.first + j);
    chain.push_back(e.v1);
    return chain;
}

GraphGrid build_necklace(const MetricGraphSpec& spec) {
    if (spec.topology != Topology::necklace)
        fail(errc::invalid_spec, "build_necklace requires necklace topology");
    check_positive(spec.L1, "L1");
    if (spec.L2 < 0.0) fail(errc::invalid_spec, "L2 must be nonnegative");
    if (spec.n_cells < 1) fail(errc::invalid_spec, "n_cells must be >= 1");
    if (spec.pts_per_edge < 1) fail(errc::invalid_spec, "pts_per_edge must be >= 1");

    const bool homogeneous = (spec.L2 == 0.0);
    const int n = spec.n_cells;
    const double mean_len = homogeneous ? spec.L1 : (spec.L1 + 2.0 * spec.L2) / 3.0;

    int k_seg = interior_count(spec.pts_per_edge, spec.L1, mean_len);
    if (k_seg % 2 == 0) ++k_seg; // keep a node exactly at the mid-segment symmetry point
    const int k_semi = homogeneous ? 0 : interior_count(spec.pts_per_edge, spec.L2, mean_len);

    Builder b;
    const double P = spec.L1 + spec.L2;
    if (homogeneous) {
        b.g.n_vertices = n + 1;
        b.g.incidence.resize(static_cast<size_t>(n + 1));
        for (int i = 0; i <= n; ++i) b.add_vertex(i * P);
        for (int i = 0; i < n; ++i)
            b.add_edge(EdgeKind::segment, i, i, i + 1, spec.L1, k_seg, i * P, i * P + spec.L1);
    } else {
        // vertices: A_i = 2i (cell left), B_i = 2i+1 (segment/semicircle joint)
        b.g.n_vertices = 2 * n + 1;
        b.g.incidence.resize(static_cast<size_t>(2 * n + 1));
        for (int i = 0; i < n; ++i) {
            b.add_vertex(i * P);
            b.add_vertex(i * P + spec.L1);
        }
        b.add_vertex(n * P);
        for (int i = 0; i < n; ++i) {
            int A = 2 * i, B = 2 * i + 1, A1 = (i + 1 == n) ? 2 * n : 2 * (i + 1);
            b.add_edge(EdgeKind::segment, i, A, B, spec.L1, k_seg, i * P, i * P + spec.L1);
            b.add_edge(EdgeKind::semi_plus, i, B, A1, spec.L2, k_semi, i * P + spec.L1, (i + 1) * P);
            b.add_edge(EdgeKind::semi_minus, i, B, A1, spec.L2, k_semi, i * P + spec.L1, (i + 1) * P);
        }
    }
    b.finish();
    GraphGrid g = std::move(b.g);
    g.spec = spec;
    g.cell_period = P;

    // Repeating cell pattern: 0 = left vertex, 1..k_seg = segment interiors,
    // then joint vertex and semicircle interiors.
    g.nodes_per_cell = homogeneous ? 1 + k_seg : 2 + k_seg + 2 * k_semi;
    g.cell_of.assign(static_cast<size_t>(g.size()), -1);
    g.pattern_of.assign(static_cast<size_t>(g.size()), -1);
    auto set_cp = [&](int node, int cell, int pat) {
        g.cell_of[static_cast<size_t>(node)] = cell;
        g.pattern_of[static_cast<size_t>(node)] = pat;
    };
    for (const Edge& e : g.edges) {
        int base_seg = 1;
        if (e.kind == EdgeKind::segment) {
            set_cp(e.v0, e.cell, 0);
            for (int j = 0; j < e.n_int; ++j) set_cp(e.first + j, e.cell, base_seg + j);
            if (!homogeneous) set_cp(e.v1, e.cell, 1 + k_seg);
        } else {
            int base = 2 + k_seg + (e.kind == EdgeKind::semi_minus ? k_semi : 0);
            for (int j = 0; j < e.n_int; ++j) set_cp(e.first + j, e.cell, base + j);
        }
    }
    set_cp(g.n_vertices - 1, n, 0); // right end = pattern 0 of the one-past-last cell
    g.x0_pattern = 1 + (k_seg - 1) / 2;
    g.x0_node = g.node_at(0, g.x0_pattern);

    if (spec.boundary == Boundary::dirichlet_ends) {
        g.dirichlet[0] = 1;
        g.dirichlet[static_cast<size_t>(g.n_vertices - 1)] = 1;
    }
    return g;
}

GraphGrid build_ladder(const MetricGraphSpec& spec) {
    if (spec.topology != Topology::ladder)
        fail(errc::invalid_spec, "build_ladder requires ladder topology");
    check_positive(spec.Ls, "Ls");
    check_positive(spec.Lr, "Lr");
    if (spec.n_cells < 1) fail(errc::invalid_spec, "n_cells must be >= 1");
    if (spec.pts_per_edge < 1) fail(errc::invalid_spec, "pts_per_edge must be >= 1");

    const int n = spec.n_cells;
    // 2n rail sections + (n+1) rungs
    const double mean_len = (2.0 * n * spec.Ls + (n + 1) * spec.Lr) / (3.0 * n + 1);
    const int k_rail = interior_count(spec.pts_per_edge, spec.Ls, mean_len);
    const int k_rung = interior_count(spec.pts_per_edge, spec.Lr, mean_len);

    Builder b;
    b.g.n_vertices = 2 * (n + 1);
    b.g.incidence.resize(static_cast<size_t>(2 * (n + 1)));
    for (int i = 0; i <= n; ++i) { // T_i = 2i, B_i = 2i+1, both at axial i*Ls
        b.add_vertex(i * spec.Ls);
        b.add_vertex(i * spec.Ls);
    }
    for (int i = 0; i <= n; ++i)
        b.add_edge(EdgeKind::rung, i, 2 * i, 2 * i + 1, spec.Lr, k_rung, i * spec.Ls, i * spec.Ls,
                   /*axial_constant=*/true);
    for (int i = 0; i < n; ++i) {
        b.add_edge(EdgeKind::rail_top, i, 2 * i, 2 * (i + 1), spec.Ls, k_rail, i * spec.Ls,
                   (i + 1) * spec.Ls);
        b.add_edge(EdgeKind::rail_bottom, i, 2 * i + 1, 2 * (i + 1) + 1, spec.Ls, k_rail,
                   i * spec.Ls, (i + 1) * spec.Ls);
    }
    b.finish();
    GraphGrid g = std::move(b.g);
    g.spec = spec;
    g.cell_period = spec.Ls;
    g.cell_of.assign(static_cast<size_t>(g.size()), -1);
    g.pattern_of.assign(static_cast<size_t>(g.size()), -1);

    if (spec.boundary == Boundary::dirichlet_ends) {
        g.dirichlet[0] = 1;
        g.dirichlet[1] = 1;
        g.dirichlet[static_cast<size_t>(2 * n)] = 1;
        g.dirichlet[static_cast<size_t>(2 * n + 1)] = 1;
    }
    return g;
}

SparseOperator assemble_laplacian(const GraphGrid& grid) {
    const int N = grid.size();
    if (N == 0) fail(errc::invalid_spec, "empty grid");

    // Stiffness assembly: K[a,a] += 1/h, K[a,b] -= 1/h per node pair along
    // each edge.  L = -W^{-1} K gives central differences at interiors and
    // the Kirchhoff flux balance (ghost elimination) at vertices.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(4 * N));
    for (const Edge& e : grid.edges) {
        const double c = 1.0 / e.h;
        auto chain = grid.edge_chain(e);
        for (size_t j = 0; j + 1 < chain.size(); ++j) {
            int a = chain[j], bnode = chain[j + 1];
            trip.emplace_back(a, a, c);
            trip.emplace_back(bnode, bnode, c);
            trip.emplace_back(a, bnode, -c);
            trip.emplace_back(bnode, a, -c);
        }
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> K(N, N);
    K.setFromTriplets(trip.begin(), trip.end());

    SparseOperator op;
    op.mat = std::move(K);
    for (int i = 0; i < N; ++i) {
        double scale = grid.is_dirichlet(i) ? 0.0 : -1.0 / grid.weight(i);
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(op.mat, i); it; ++it)
            it.valueRef() *= scale;
    }
    op.mat.prune(0.0);
    op.mat.makeCompressed();
    return op;
}

double integrate(const GraphGrid& grid, const Eigen::VectorXcd& psi, double p) {
    if (p < 1.0) fail(errc::domain, "integrate requires p >= 1");
    if (psi.size() != grid.size()) fail(errc::domain, "field size does not match grid");
    double acc = 0.0;
    if (p == 2.0) {
        for (int i = 0; i < psi.size(); ++i) acc += grid.weight(i) * std::norm(psi(i));
    } else if (p == 4.0) {
        for (int i = 0; i < psi.size(); ++i) {
            double m2 = std::norm(psi(i));
            acc += grid.weight(i) * m2 * m2;
        }
    } else {
        for (int i = 0; i < psi.size(); ++i) acc += grid.weight(i) * std::pow(std::abs(psi(i)), p);
    }
    return acc;
}

std::complex<double> inner(const GraphGrid& grid, const Eigen::VectorXcd& a,
                           const Eigen::VectorXcd& b) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < a.size(); ++i) acc += grid.weight(i) * std::conj(a(i)) * b(i);
    return acc;
}

std::string GraphGrid::describe_json() const {
    std::ostringstream os;
    os << "{\"topology\":\"" << (spec.topology == Topology::necklace ? "necklace" : "ladder")
       << "\"";
    if (spec.topology == Topology::necklace)
        os << ",\"L1\":" << spec.L1 << ",\"L2\":" << spec.L2;
    else
        os << ",\"Ls\":" << spec.Ls << ",\"Lr\":" << spec.Lr;
    os << ",\"n_cells\":" << spec.n_cells << ",\"N\":" << size() << ",\"edges\":[";
    for (size_t i = 0; i < edges.size(); ++i) {
        if (i) os << ",";
        os << edges[i].n_int;
    }
    os << "]}";
    return os.str();
}

} // namespace graphnls
