#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "graphnls/metric_graph.hpp"

namespace graphnls {

/// Uniform-per-edge nodal mesh on a metric graph. Vertex nodes are shared
/// across incident edges, so continuity of a nodal function is structural.
/// Half-lines are cut at graph.truncation_length; the cut end gets its own
/// node, flagged as a truncation tip.
class Mesh {
public:
    struct EdgeMesh {
        double h = 0.0;               // spacing, length / intervals
        int intervals = 0;            // >= 1 (>= 2 for loops)
        std::vector<int> nodes;       // global node ids, endpoint-to-endpoint
    };

    Mesh(const MetricGraph& g, double target_h);

    const MetricGraph& graph() const { return *graph_; }
    int num_nodes() const { return num_nodes_; }
    const std::vector<EdgeMesh>& edge_meshes() const { return edges_; }
    const EdgeMesh& edge_mesh(int e) const { return edges_.at(e); }

    /// Global node id of a graph vertex.
    int vertex_node(int v) const { return vertex_node_.at(v); }
    /// Nodes at truncated half-line tips, in edge order.
    const std::vector<int>& truncation_tips() const { return tips_; }
    /// Graph-vertex index of a node, or -1 for interior/tip nodes.
    int node_vertex(int n) const { return node_vertex_.at(n); }

    /// Trapezoid quadrature weight per node (sum of h/2 over adjacent intervals).
    const Eigen::VectorXd& quadrature_weights() const { return weights_; }

    /// Arclength of every node of edge e from its `a` endpoint.
    double node_arclength(int e, int k) const { return edges_[e].h * k; }

    /// Shortest-path distance from the point at arclength s on edge e
    /// (measured from the edge's `a` endpoint) to every mesh node.
    Eigen::VectorXd distance_from_point(int e, double s) const;

private:
    std::shared_ptr<const MetricGraph> graph_;
    std::vector<EdgeMesh> edges_;
    std::vector<int> vertex_node_;
    std::vector<int> node_vertex_;
    std::vector<int> tips_;
    Eigen::VectorXd weights_;
    int num_nodes_ = 0;
};

/// Real-valued function sampled at mesh nodes (piecewise linear on edges,
/// single-valued at vertices).
class GraphFunction {
public:
    GraphFunction() = default;
    GraphFunction(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd values);
    explicit GraphFunction(std::shared_ptr<const Mesh> mesh);  // zero function

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }

    bool empty() const { return values_.size() == 0; }

private:
    std::shared_ptr<const Mesh> mesh_;
    Eigen::VectorXd values_;
};

struct Norms {
    double lq = 0.0;        // trapezoid L^q norm
    double l2 = 0.0;        // trapezoid L^2 norm
    double linf = 0.0;
    double h1_semi = 0.0;   // first-difference H^1 seminorm
};

/// Trapezoid L^q / L^2 / L^inf norms and the H^1 seminorm. Throws
/// std::invalid_argument for q < 1.
Norms norms(const GraphFunction& u, double q);

double l2_norm_sq(const GraphFunction& u);
double lp_integral(const GraphFunction& u, double p);   // trapezoid of |u|^p
double h1_semi_sq(const GraphFunction& u);

/// Rescale u so that its squared L^2 norm equals mu (exactly in quadrature).
/// Throws std::invalid_argument on a zero input function.
GraphFunction project_mass(const GraphFunction& u, double mu);

struct GnReport {
    double lp_ratio = 0.0;        // ||u||_p^p / (||u||_2^{p/2+1} ||u'||_2^{p/2-1})
    double lp_slack = 0.0;        // K * rhs - ||u||_p^p
    double linf_slack = 0.0;      // sqrt(2) ||u||_2^{1/2} ||u'||_2^{1/2} - ||u||_inf
    bool degenerate = false;      // zero derivative: interpolation bound is vacuous
};

/// Evaluate both graph Gagliardo-Nirenberg inequalities for a candidate K.
GnReport gn_check(const GraphFunction& u, double p, double K);

/// Maximize the L^p GN ratio over a deterministic trial family (tents,
/// Gaussians, sech-profile bumps with seeded random centers/widths). The
/// returned maximum is a certified lower bound for the optimal constant.
double empirical_gn_constant(const MetricGraph& g, double p, int samples, unsigned long seed,
                             double target_h = 0.05);

struct ConcavityReport {
    std::vector<bool> concave_edge;        // second differences <= tol throughout
    std::vector<double> max_second_diff;   // per edge, undivided second difference
    bool all_concave = false;
};

/// Per-edge concavity from interior second differences; tolerance
/// 1e-10 * max|u| absorbs rounding.
ConcavityReport concavity_report(const GraphFunction& u);

/// Write the function dump format: edge_id,arclength,value rows.
std::string dump_function_csv(const GraphFunction& u);

}  // namespace graphnls
