#pragma once

#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "ladder/percolation.hpp"
#include "ladder/window.hpp"

namespace ladder {

/// Normalizing constant of the lazy biased kernel, e^l + 1 + e^{-l}.
inline double partition_z(double lambda) {
    return std::exp(lambda) + 1.0 + std::exp(-lambda);
}

/// Finite resistor network on ladder vertices. Conductances are strictly
/// positive; parallel edges are allowed.
struct ResistorGraph {
    struct Edge {
        int a = 0;
        int b = 0;
        double c = 1.0;
    };

    std::vector<Vertex> verts;
    std::vector<Edge> edges;

    int index_of(Vertex v) const {
        const auto it = index_.find(key(v));
        return it == index_.end() ? -1 : it->second;
    }
    int add_vertex(Vertex v);
    void add_edge(Vertex a, Vertex b, double c);

private:
    static long long key(Vertex v) { return 2LL * v.x + v.y; }
    std::unordered_map<long long, int> index_;
};

/// Open edges of w with both endpoints in columns [x_lo, x_hi], carrying
/// the lambda-tilted conductance c(<v,w>) = e^{lambda (x(v)+x(w) - 2 x_ref)}.
/// The gauge x_ref only rescales all conductances; choose it near the
/// terminals to keep the numbers sane.
ResistorGraph tilted_subgraph(const WindowConfig& w, int x_lo, int x_hi, double lambda,
                              int x_ref);

/// Effective resistance between a and b, by direct elimination with
/// partial pivoting on the grounded Laplacian. Throws ConnectivityError
/// if the terminals are not connected.
double effective_resistance(const ResistorGraph& g, Vertex a, Vertex b);

/// Harmonic potential of the unit current flow a -> b on the component of
/// a: phi(a) = 0, phi(b) = R_eff(a<->b), harmonic elsewhere.
struct BlockVoltages {
    std::vector<Vertex> verts;
    std::vector<double> phi;
};

BlockVoltages harmonic_voltages(const ResistorGraph& g, Vertex a, Vertex b);

/// Effective conductance of a cycle between its endpoint bottom vertices.
double cycle_conductance(const Cycle& c);

/// Exact quenched hitting probability P^v(T_u < T_w) for the lambda-biased
/// walk, with u < v < w pre-regeneration points of the environment.
/// Computed from effective resistances of the lambda-tilted network on
/// [u,w); v being a bottleneck puts the two sides in series.
double hitting_probability_exact(const WindowConfig& w, double lambda, int xu, int xv, int xw);

constexpr int kInfiniteR = std::numeric_limits<int>::max();

struct HittingBounds {
    double lower = 0.0;
    double upper = 1.0;
};

/// Closed-form bracket for P^v(T_u < T_w) at pre-regeneration spacings
/// x(v)-x(u) = L*floor(1/lambda), x(w)-x(v) = R*floor(1/lambda). Pass
/// kInfiniteR for R to get the T_u < infinity bracket; for L = 1 that
/// upper bound is 4/10.
HittingBounds hitting_probability_bounds(int L, int R, double lambda);

/// Whether lambda is inside the configured small-bias regime of the bracket.
inline bool in_bracket_regime(double lambda, double lambda0 = 0.2) {
    return lambda > 0.0 && lambda <= lambda0;
}

/// Uniform lower bound (1 - e^{-lambda}) / (e^lambda + 1 + e^{-lambda})
/// for the escape probability from a backbone vertex.
inline double escape_probability_lower_bound(double lambda) {
    return (1.0 - std::exp(-lambda)) / partition_z(lambda);
}

/// Finite-window escape probability: chance that the walk started at v
/// reaches the truncation boundary on the right before returning to v.
/// The boundary sits `truncation_cols` columns right of v (default
/// ceil(5/lambda)); the window must extend at least that far. Requires v
/// on the backbone.
double escape_probability_exact(const WindowConfig& w, const ClusterDecomposition& d,
                                double lambda, Vertex v, int truncation_cols = 0);

/// Return probability r_i of the reflected biased segment chain on
/// {0,...,m}: probability that the walk started at i returns to i before
/// hitting 0. Interior i uses the classical ruin formula and does not
/// depend on m; i = m is the reflected case.
double ruin_probability_r(int i, int m, double lambda);

/// Independent route: first-step linear system over states 0..m, solved
/// densely.
double ruin_probability_first_step_oracle(int i, int m, double lambda);

/// Dense linear solve A x = b (row-major A), partial pivoting. Shared by
/// the network routines; exposed for the first-step oracles.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n);

}  // namespace ladder
