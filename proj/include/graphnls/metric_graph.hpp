#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphnls {

/// Error thrown by graph construction and parsing on invalid input.
struct graph_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EdgeKind { Finite, HalfLine };

struct Edge {
    int a = -1;              // first endpoint (vertex index)
    int b = -1;              // second endpoint; for half-lines b == -1 (free end)
    double length = 0.0;     // finite edges only; half-lines use the graph truncation
    EdgeKind kind = EdgeKind::Finite;

    bool is_halfline() const { return kind == EdgeKind::HalfLine; }
    bool is_loop() const { return kind == EdgeKind::Finite && a == b; }
};

/// One cell cut of a periodic (chain/ladder) graph: the oriented derivative
/// samples that cross it. `edge` is crossed at arclength `s` measured from
/// endpoint `a`; `forward` means the fixed cell orientation agrees with the
/// a->b parametrization.
struct CellCut {
    struct Crossing {
        int edge;
        double s;
        bool forward;
    };
    std::vector<Crossing> crossings;
};

/// A noncompact-capable metric graph: vertices, finite edges with lengths,
/// half-line edges stored symbolically and truncated only at mesh time.
/// Immutable once built (treat as read-only after construction/validation).
class MetricGraph {
public:
    std::vector<std::string> vertex_names;
    std::vector<Edge> edges;
    double truncation_length = 40.0;     // applied per half-line at discretization
    std::optional<double> default_p;     // optional "p <real>" from graph files
    std::vector<CellCut> cell_cuts;      // populated by periodic catalog graphs

    int num_vertices() const { return static_cast<int>(vertex_names.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }

    /// Incident (edge index) lists; loops appear twice at their vertex.
    const std::vector<std::vector<int>>& incidence() const { return incidence_; }
    int degree(int v) const { return static_cast<int>(incidence_.at(v).size()); }

    bool has_halfline() const;
    /// Sum of finite edge lengths; +infinity when any half-line is present.
    double total_length() const;
    /// Edge length as meshed: finite length, or truncation_length for half-lines.
    double meshed_length(int e) const;

    /// Validates invariants (endpoint references, positive lengths,
    /// connectedness, nonempty edge set) and builds incidence lists.
    /// Throws graph_error with a short reason on violation.
    void finalize();

    int vertex_index(const std::string& name) const;

private:
    std::vector<std::vector<int>> incidence_;
};

/// Parse the line-oriented graph description format:
///   # comment
///   p <real>
///   vertex <id>
///   edge <id> <id> <length>
///   halfline <id>
MetricGraph parse_graph(std::istream& in);
MetricGraph parse_graph(const std::string& text);
MetricGraph load_graph(const std::string& path);

/// Serialize in the same format; parse(serialize(g)) reproduces g.
std::string serialize_graph(const MetricGraph& g);

/// Named constructor parameters for catalog graphs; unspecified keys take
/// the documented defaults.
using CatalogParams = std::map<std::string, double>;

/// Catalog of example graphs:
///   segment           (length = 1)
///   star_halflines    (arms = 3)
///   tadpole           (head = 6): one loop plus one half-line tail
///   periodic_chain    (cells = 5, cell_length = 1), with cut metadata
///   periodic_ladder   (cells = 5, cell_length = 1), two rails + rungs
///   bethe_tree        (degree = 3, depth = 4, length = 1), finite truncation
///   doubling_tree     (depth = 5): level-n edge has length 2^(n-1)
MetricGraph catalog(const std::string& name, const CatalogParams& params = {});

/// Names accepted by catalog(), in a fixed order.
const std::vector<std::string>& catalog_names();

}  // namespace graphnls
