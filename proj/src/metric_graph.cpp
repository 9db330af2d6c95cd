#include "graphnls/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace graphnls {

bool MetricGraph::has_halfline() const {
    return std::any_of(edges.begin(), edges.end(),
                       [](const Edge& e) { return e.is_halfline(); });
}

double MetricGraph::total_length() const {
    if (has_halfline()) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const Edge& e : edges) sum += e.length;
    return sum;
}

double MetricGraph::meshed_length(int e) const {
    const Edge& ed = edges.at(e);
    return ed.is_halfline() ? truncation_length : ed.length;
}

int MetricGraph::vertex_index(const std::string& name) const {
    for (int i = 0; i < num_vertices(); ++i)
        if (vertex_names[i] == name) return i;
    return -1;
}

namespace {

// Union-find over vertex indices.
struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

void MetricGraph::finalize() {
    const int nv = num_vertices();
    if (edges.empty()) throw graph_error("empty edge set");
    if (truncation_length <= 0.0) throw graph_error("nonpositive truncation length");

    for (const Edge& e : edges) {
        if (e.a < 0 || e.a >= nv || (e.kind == EdgeKind::Finite && (e.b < 0 || e.b >= nv)))
            throw graph_error("dangling vertex reference");
        if (e.kind == EdgeKind::HalfLine && e.b != -1)
            throw graph_error("half-line must have exactly one graph vertex");
        if (e.kind == EdgeKind::Finite && !(e.length > 0.0))
            throw graph_error("nonpositive edge length");
    }

    incidence_.assign(nv, {});
    for (int i = 0; i < num_edges(); ++i) {
        const Edge& e = edges[i];
        incidence_[e.a].push_back(i);
        if (e.kind == EdgeKind::Finite) incidence_[e.b].push_back(i);  // loops: twice
    }

    DisjointSet ds(nv);
    for (const Edge& e : edges)
        if (e.kind == EdgeKind::Finite) ds.unite(e.a, e.b);
    const int root = ds.find(0);
    for (int v = 1; v < nv; ++v)
        if (ds.find(v) != root) throw graph_error("disconnected graph");
}

namespace {

int get_or_add_vertex(MetricGraph& g, std::map<std::string, int>& ids, const std::string& name,
                      bool declare) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    if (!declare) throw graph_error("dangling vertex reference: " + name);
    const int idx = g.num_vertices();
    g.vertex_names.push_back(name);
    ids.emplace(name, idx);
    return idx;
}

}  // namespace

MetricGraph parse_graph(std::istream& in) {
    MetricGraph g;
    std::map<std::string, int> ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "vertex") {
            std::string name;
            if (!(ls >> name)) throw graph_error("vertex line missing id");
            get_or_add_vertex(g, ids, name, true);
        } else if (tok == "edge") {
            std::string a, b;
            double len = 0.0;
            if (!(ls >> a >> b >> len)) throw graph_error("malformed edge line " + std::to_string(lineno));
            Edge e;
            e.a = get_or_add_vertex(g, ids, a, false);
            e.b = get_or_add_vertex(g, ids, b, false);
            e.length = len;
            e.kind = EdgeKind::Finite;
            g.edges.push_back(e);
        } else if (tok == "halfline") {
            std::string a;
            if (!(ls >> a)) throw graph_error("halfline line missing id");
            Edge e;
            e.a = get_or_add_vertex(g, ids, a, false);
            e.kind = EdgeKind::HalfLine;
            g.edges.push_back(e);
        } else if (tok == "p") {
            double p = 0.0;
            if (!(ls >> p)) throw graph_error("malformed p line");
            g.default_p = p;
        } else if (tok == "truncation") {
            double t = 0.0;
            if (!(ls >> t)) throw graph_error("malformed truncation line");
            g.truncation_length = t;
        } else {
            throw graph_error("unknown directive '" + tok + "' at line " + std::to_string(lineno));
        }
    }
    g.finalize();
    return g;
}

MetricGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

MetricGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw graph_error("cannot open graph file: " + path);
    return parse_graph(in);
}

std::string serialize_graph(const MetricGraph& g) {
    std::ostringstream out;
    out.precision(17);
    if (g.default_p) out << "p " << *g.default_p << "\n";
    out << "truncation " << g.truncation_length << "\n";
    for (const std::string& v : g.vertex_names) out << "vertex " << v << "\n";
    for (const Edge& e : g.edges) {
        if (e.is_halfline())
            out << "halfline " << g.vertex_names[e.a] << "\n";
        else
            out << "edge " << g.vertex_names[e.a] << " " << g.vertex_names[e.b] << " " << e.length
                << "\n";
    }
    return out.str();
}

namespace {

double param(const CatalogParams& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

int iparam(const CatalogParams& p, const std::string& key, int dflt) {
    return static_cast<int>(std::lround(param(p, key, dflt)));
}

MetricGraph make_segment(double length) {
    MetricGraph g;
    g.vertex_names = {"a", "b"};
    g.edges.push_back({0, 1, length, EdgeKind::Finite});
    return g;
}

MetricGraph make_star(int arms) {
    if (arms < 2) throw graph_error("star_halflines needs arms >= 2");
    MetricGraph g;
    g.vertex_names = {"o"};
    for (int i = 0; i < arms; ++i) g.edges.push_back({0, -1, 0.0, EdgeKind::HalfLine});
    return g;
}

MetricGraph make_tadpole(double head) {
    MetricGraph g;
    g.vertex_names = {"j"};
    g.edges.push_back({0, 0, head, EdgeKind::Finite});  // loop
    g.edges.push_back({0, -1, 0.0, EdgeKind::HalfLine});
    return g;
}

MetricGraph make_chain(int cells, double cell_length) {
    if (cells < 1) throw graph_error("periodic_chain needs cells >= 1");
    MetricGraph g;
    for (int k = 0; k <= cells; ++k) g.vertex_names.push_back("v" + std::to_string(k));
    for (int k = 0; k < cells; ++k) g.edges.push_back({k, k + 1, cell_length, EdgeKind::Finite});
    // Cut k sits at vertex v_{k+1}, crossed by edge k at its far end, oriented
    // along increasing cell index.
    for (int k = 0; k < cells - 1; ++k) {
        CellCut cut;
        cut.crossings.push_back({k, cell_length, true});
        g.cell_cuts.push_back(cut);
    }
    return g;
}

MetricGraph make_ladder(int cells, double cell_length) {
    if (cells < 1) throw graph_error("periodic_ladder needs cells >= 1");
    MetricGraph g;
    const int n = cells + 1;
    for (int k = 0; k < n; ++k) g.vertex_names.push_back("t" + std::to_string(k));
    for (int k = 0; k < n; ++k) g.vertex_names.push_back("b" + std::to_string(k));
    auto top = [&](int k) { return k; };
    auto bot = [&](int k) { return n + k; };
    std::vector<int> top_rail, bot_rail;
    for (int k = 0; k < cells; ++k) {
        top_rail.push_back(g.num_edges());
        g.edges.push_back({top(k), top(k + 1), cell_length, EdgeKind::Finite});
        bot_rail.push_back(g.num_edges());
        g.edges.push_back({bot(k), bot(k + 1), cell_length, EdgeKind::Finite});
    }
    for (int k = 0; k < n; ++k) g.edges.push_back({top(k), bot(k), cell_length, EdgeKind::Finite});
    for (int k = 0; k < cells - 1; ++k) {
        CellCut cut;
        cut.crossings.push_back({top_rail[k], cell_length, true});
        cut.crossings.push_back({bot_rail[k], cell_length, true});
        g.cell_cuts.push_back(cut);
    }
    return g;
}

MetricGraph make_bethe(int degree, int depth, double length) {
    if (degree < 3) throw graph_error("bethe_tree needs degree >= 3");
    if (depth < 0) throw graph_error("bethe_tree needs depth >= 0");
    MetricGraph g;
    g.vertex_names.push_back("r");
    // Root has degree 1; every interior vertex has the constant degree, i.e.
    // degree-1 children below its single parent edge.
    std::vector<int> frontier = {0};
    int counter = 0;
    for (int level = 0; level <= depth; ++level) {
        std::vector<int> next;
        for (int v : frontier) {
            const int children = (level == 0) ? 1 : degree - 1;
            for (int c = 0; c < children; ++c) {
                const int w = g.num_vertices();
                g.vertex_names.push_back("n" + std::to_string(++counter));
                g.edges.push_back({v, w, length, EdgeKind::Finite});
                next.push_back(w);
            }
        }
        frontier = std::move(next);
    }
    return g;
}

MetricGraph make_doubling(int depth) {
    if (depth < 1) throw graph_error("doubling_tree needs depth >= 1");
    MetricGraph g;
    g.vertex_names.push_back("r");
    for (int n = 1; n <= depth; ++n) {
        g.vertex_names.push_back("v" + std::to_string(n));
        g.edges.push_back({n - 1, n, std::pow(2.0, n - 1), EdgeKind::Finite});
    }
    return g;
}

}  // namespace

MetricGraph catalog(const std::string& name, const CatalogParams& params) {
    MetricGraph g;
    if (name == "segment") {
        g = make_segment(param(params, "length", 1.0));
    } else if (name == "star_halflines") {
        g = make_star(iparam(params, "arms", 3));
    } else if (name == "tadpole") {
        g = make_tadpole(param(params, "head", 6.0));
    } else if (name == "periodic_chain") {
        g = make_chain(iparam(params, "cells", 5), param(params, "cell_length", 1.0));
    } else if (name == "periodic_ladder") {
        g = make_ladder(iparam(params, "cells", 5), param(params, "cell_length", 1.0));
    } else if (name == "bethe_tree") {
        g = make_bethe(iparam(params, "degree", 3), iparam(params, "depth", 4),
                       param(params, "length", 1.0));
    } else if (name == "doubling_tree") {
        g = make_doubling(iparam(params, "depth", 5));
    } else {
        throw graph_error("unknown catalog graph: " + name);
    }
    if (auto it = params.find("truncation"); it != params.end()) g.truncation_length = it->second;
    g.finalize();
    return g;
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {
        "segment",        "star_halflines", "tadpole",      "periodic_chain",
        "periodic_ladder", "bethe_tree",    "doubling_tree"};
    return names;
}

}  // namespace graphnls
