#ifndef GRAPHNLS_GRAPH_HPP
#define GRAPHNLS_GRAPH_HPP

#include <Eigen/Dense>
#include <complex>
#include <Eigen/SparseCore>
#include <string>
#include <utility>
#include <vector>

#include "graphnls/errors.hpp"

namespace graphnls {

using cplx = std::complex<double>;

enum class Topology { necklace, ladder };
enum class Boundary { none, dirichlet_ends };

struct MetricGraphSpec {
    Topology topology = Topology::necklace;
    double L1 = M_PI;  // necklace segment length
    double L2 = M_PI;  // necklace semicircle length (0 = homogeneous line)
    double Ls = 1.0;   // ladder rail section length
    double Lr = 1.0;   // ladder rung length
    int n_cells = 1;
    int pts_per_edge = 30; // average interior nodes per edge
    Boundary boundary = Boundary::none;
};

enum class EdgeKind { segment, semi_plus, semi_minus, rail_top, rail_bottom, rung };

struct Edge {
    EdgeKind kind;
    int cell;       // cell (necklace) or column/section index (ladder)
    double length;
    double h;       // node spacing
    int n_int;      // interior node count
    int v0, v1;     // endpoint node ids (vertex nodes)
    int first;      // node id of the interior node adjacent to v0; block is contiguous
    double ax0, ax1; // axial coordinates of the endpoints
};

// Discretized periodic metric graph.  Vertex nodes come first (ids
// [0, n_vertices)), then the per-edge interior blocks.  Values at vertices
// are shared by all incident edges, which makes continuity structural.
struct GraphGrid {
    MetricGraphSpec spec;
    std::vector<Edge> edges;
    int n_vertices = 0;
    Eigen::VectorXd axial;   // axial coordinate per node
    Eigen::VectorXd weight;  // trapezoid quadrature weight per node (length units)
    std::vector<std::vector<std::pair<int, int>>> incidence; // vertex id -> (edge, end)
    std::vector<char> dirichlet;  // per-node flag
    double cell_period = 0;  // axial period (necklace: L1+L2, ladder: Ls)
    double total_length = 0;

    // Necklace cell pattern: node -> (cell index, index within the repeating
    // cell pattern).  Pattern 0 is the left vertex of the cell.
    std::vector<int> cell_of, pattern_of;
    int nodes_per_cell = 0;
    int x0_pattern = -1;  // pattern index of the mid-segment symmetry point
    int x0_node = -1;     // that node in cell 0

    int size() const { return static_cast<int>(axial.size()); }
    bool is_dirichlet(int i) const { return dirichlet[static_cast<size_t>(i)] != 0; }
    // Node id for (cell, pattern) on a necklace grid.
    int node_at(int cell, int pattern) const;
    // Ordered node chain along an edge: v0, interiors..., v1.
    std::vector<int> edge_chain(const Edge& e) const;
    std::string describe_json() const;
};

// Sparse discrete operator paired with the grid it acts on.  Row i of `mat`
// approximates (d^2/dx^2 psi)(x_i); at non-Dirichlet vertices the row encodes
// the Neumann-Kirchhoff flux balance by ghost elimination, at Dirichlet nodes
// the row is zero.  W*mat is symmetric, so mat is self-adjoint in the
// weight inner product.
struct SparseOperator {
    Eigen::SparseMatrix<double, Eigen::RowMajor> mat;
};

struct StateField {
    Eigen::VectorXcd psi;
    double t = 0.0;
};

GraphGrid build_necklace(const MetricGraphSpec& spec);
GraphGrid build_ladder(const MetricGraphSpec& spec);
SparseOperator assemble_laplacian(const GraphGrid& grid);

// Sum_i w_i |psi_i|^p.  p >= 1.
double integrate(const GraphGrid& grid, const Eigen::VectorXcd& psi, double p);

// Weighted inner product sum_i w_i conj(a_i) b_i.
std::complex<double> inner(const GraphGrid& grid, const Eigen::VectorXcd& a,
                           const Eigen::VectorXcd& b);

} // namespace graphnls

#endif
