#include "ladder/electrical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ladder {

int ResistorGraph::add_vertex(Vertex v) {
    const auto it = index_.find(key(v));
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(verts.size());
    verts.push_back(v);
    index_.emplace(key(v), id);
    return id;
}

void ResistorGraph::add_edge(Vertex a, Vertex b, double c) {
    if (c <= 0.0) throw ParameterError("ResistorGraph: conductance must be positive");
    edges.push_back({add_vertex(a), add_vertex(b), c});
}

ResistorGraph tilted_subgraph(const WindowConfig& w, int x_lo, int x_hi, double lambda,
                              int x_ref) {
    if (x_lo < w.x_min() || x_hi > w.x_max() || x_lo >= x_hi)
        throw ParameterError("tilted_subgraph: bad column range");
    ResistorGraph g;
    const auto tilt = [&](int xa, int xb) {
        return std::exp(lambda * static_cast<double>(xa + xb - 2 * x_ref));
    };
    for (int x = x_lo; x <= x_hi; ++x) {
        if (w.vertical(x)) g.add_edge({x, 0}, {x, 1}, tilt(x, x));
        if (x < x_hi) {
            if (w.h_bottom(x)) g.add_edge({x, 0}, {x + 1, 0}, tilt(x, x + 1));
            if (w.h_top(x)) g.add_edge({x, 1}, {x + 1, 1}, tilt(x, x + 1));
        }
    }
    return g;
}

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n) {
    if (static_cast<int>(b.size()) != n || static_cast<std::size_t>(n) * n != a.size())
        throw ParameterError("solve_dense: shape mismatch");
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    auto A = [&](int r, int c) -> double& {
        return a[static_cast<std::size_t>(r) * n + c];
    };
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::fabs(A(col, col));
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(A(r, col)) > best) {
                best = std::fabs(A(r, col));
                piv = r;
            }
        }
        if (best == 0.0) throw ConnectivityError("solve_dense: singular system");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A(piv, c), A(col, c));
            std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
        }
        const double d = A(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = A(r, col) / d;
            if (f == 0.0) continue;
            A(r, col) = 0.0;
            for (int c = col + 1; c < n; ++c) A(r, c) -= f * A(col, c);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) s -= A(r, c) * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s / A(r, r);
    }
    return x;
}

namespace {

// Connected component of `from` as local ids; comp[i] = -1 off-component.
std::vector<int> component_ids(const ResistorGraph& g, int from, int* n_comp) {
    std::vector<std::vector<int>> adj(g.verts.size());
    for (const auto& e : g.edges) {
        adj[static_cast<std::size_t>(e.a)].push_back(e.b);
        adj[static_cast<std::size_t>(e.b)].push_back(e.a);
    }
    std::vector<int> comp(g.verts.size(), -1);
    std::vector<int> stack{from};
    comp[static_cast<std::size_t>(from)] = 0;
    int next = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : adj[static_cast<std::size_t>(v)]) {
            if (comp[static_cast<std::size_t>(u)] < 0) {
                comp[static_cast<std::size_t>(u)] = next++;
                stack.push_back(u);
            }
        }
    }
    *n_comp = next;
    return comp;
}

// Voltages for unit current a -> grounded set, on the component of a.
// Returns per-graph-vertex voltages (0 on ground, quiet NaN off component).
std::vector<double> grounded_solve(const ResistorGraph& g, int a,
                                   const std::vector<int>& grounded) {
    int n_comp = 0;
    const std::vector<int> comp = component_ids(g, a, &n_comp);
    std::vector<uint8_t> is_ground(g.verts.size(), 0);
    bool ground_reached = false;
    for (int gv : grounded) {
        is_ground[static_cast<std::size_t>(gv)] = 1;
        if (comp[static_cast<std::size_t>(gv)] >= 0) ground_reached = true;
    }
    if (!ground_reached)
        throw ConnectivityError("effective_resistance: terminals not connected");
    if (is_ground[static_cast<std::size_t>(a)])
        throw ParameterError("effective_resistance: source coincides with ground");

    // Rows for non-ground component vertices.
    std::vector<int> row(g.verts.size(), -1);
    std::vector<int> row_to_vert;
    for (std::size_t i = 0; i < g.verts.size(); ++i) {
        if (comp[i] >= 0 && !is_ground[i]) {
            row[i] = static_cast<int>(row_to_vert.size());
            row_to_vert.push_back(static_cast<int>(i));
        }
    }
    const int n = static_cast<int>(row_to_vert.size());
    std::vector<double> lap(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& e : g.edges) {
        const int ra = row[static_cast<std::size_t>(e.a)];
        const int rb = row[static_cast<std::size_t>(e.b)];
        if (comp[static_cast<std::size_t>(e.a)] < 0) continue;
        if (ra >= 0) lap[static_cast<std::size_t>(ra) * n + ra] += e.c;
        if (rb >= 0) lap[static_cast<std::size_t>(rb) * n + rb] += e.c;
        if (ra >= 0 && rb >= 0) {
            lap[static_cast<std::size_t>(ra) * n + rb] -= e.c;
            lap[static_cast<std::size_t>(rb) * n + ra] -= e.c;
        }
    }
    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    rhs[static_cast<std::size_t>(row[static_cast<std::size_t>(a)])] = 1.0;
    const std::vector<double> x = solve_dense(std::move(lap), std::move(rhs), n);

    std::vector<double> volts(g.verts.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < g.verts.size(); ++i) {
        if (comp[i] < 0) continue;
        volts[i] = is_ground[i] ? 0.0 : x[static_cast<std::size_t>(row[i])];
    }
    return volts;
}

}  // namespace

double effective_resistance(const ResistorGraph& g, Vertex a, Vertex b) {
    const int ia = g.index_of(a);
    const int ib = g.index_of(b);
    if (ia < 0 || ib < 0) throw ParameterError("effective_resistance: vertex not in graph");
    if (ia == ib) throw ParameterError("effective_resistance: identical terminals");
    const std::vector<double> v = grounded_solve(g, ia, {ib});
    return v[static_cast<std::size_t>(ia)];
}

BlockVoltages harmonic_voltages(const ResistorGraph& g, Vertex a, Vertex b) {
    const int ia = g.index_of(a);
    const int ib = g.index_of(b);
    if (ia < 0 || ib < 0) throw ParameterError("harmonic_voltages: vertex not in graph");
    const std::vector<double> v = grounded_solve(g, ia, {ib});
    BlockVoltages out;
    const double va = v[static_cast<std::size_t>(ia)];
    for (std::size_t i = 0; i < g.verts.size(); ++i) {
        if (std::isnan(v[i])) continue;
        out.verts.push_back(g.verts[i]);
        out.phi.push_back(va - v[i]);
    }
    return out;
}

double cycle_conductance(const Cycle& c) {
    if (c.length < 1) throw ParameterError("cycle_conductance: empty cycle");
    ResistorGraph g;
    g.add_vertex({0, 0});
    g.add_vertex({c.length, 0});
    for (int k = 0; k < c.length; ++k) {
        if (c.vert[static_cast<std::size_t>(k)]) g.add_edge({k, 0}, {k, 1}, 1.0);
        if (c.hb[static_cast<std::size_t>(k)]) g.add_edge({k, 0}, {k + 1, 0}, 1.0);
        if (c.ht[static_cast<std::size_t>(k)]) g.add_edge({k, 1}, {k + 1, 1}, 1.0);
    }
    return 1.0 / effective_resistance(g, {0, 0}, {c.length, 0});
}

double hitting_probability_exact(const WindowConfig& w, double lambda, int xu, int xv, int xw) {
    if (!(xu < xv && xv < xw))
        throw ParameterError("hitting_probability_exact: need x(u) < x(v) < x(w)");
    const auto pts = find_preregeneration_points(w);
    const auto is_pre = [&](int x) {
        return std::binary_search(pts.begin(), pts.end(), x);
    };
    if (!is_pre(xu) || !is_pre(xv) || !is_pre(xw))
        throw ParameterError("hitting_probability_exact: terminals must be pre-regeneration points");

    // v cuts [u,w) in two; dangling branches carry no current, so each side
    // can be solved on its own column range. One common gauge keeps the
    // resistances comparable.
    const ResistorGraph left = tilted_subgraph(w, xu, xv, lambda, xv);
    const ResistorGraph right = tilted_subgraph(w, xv, xw, lambda, xv);
    const double r_left = effective_resistance(left, {xu, 0}, {xv, 0});
    const double r_right = effective_resistance(right, {xv, 0}, {xw, 0});
    return r_right / (r_left + r_right);
}

HittingBounds hitting_probability_bounds(int L, int R, double lambda) {
    if (L < 1 || (R < 1 && R != kInfiniteR))
        throw ParameterError("hitting_probability_bounds: L, R must be positive");
    (void)lambda;  // the bracket itself is lambda-free inside the small-bias regime
    HittingBounds b;
    if (R == kInfiniteR) {
        b.lower = 1.0 / (6.0 * std::exp(2.0 * L) - 5.0);
        b.upper = 5.0 / (4.0 + std::exp(static_cast<double>(L)));
        if (L == 1) b.upper = 0.4;
        return b;
    }
    const double er = 1.0 - std::exp(-static_cast<double>(R));
    const double e2r = 1.0 - std::exp(-2.0 * static_cast<double>(R));
    b.lower = er / (er + 6.0 * (std::exp(2.0 * L) - 1.0));
    b.upper = e2r / (e2r + 0.2 * (std::exp(static_cast<double>(L)) - 1.0));
    return b;
}

double escape_probability_exact(const WindowConfig& w, const ClusterDecomposition& d,
                                double lambda, Vertex v, int truncation_cols) {
    if (lambda < 0.0) throw ParameterError("escape_probability_exact: lambda must be >= 0");
    if (!w.in_window(v)) throw ParameterError("escape_probability_exact: vertex outside window");
    if (!d.backbone_mask[w.vindex(v)])
        throw ParameterError("escape_probability_exact: vertex not on the backbone");
    int trunc = truncation_cols;
    if (trunc <= 0) {
        if (lambda == 0.0)
            trunc = w.x_max() - v.x;
        else
            trunc = static_cast<int>(std::ceil(5.0 / lambda));
    }
    if (w.x_max() - v.x < trunc) {
        std::ostringstream msg;
        msg << "escape_probability_exact: window extends only " << (w.x_max() - v.x)
            << " columns right of v, need " << trunc;
        throw ParameterError(msg.str());
    }
    // Ground only the right boundary; everything to the left stays in the
    // network so leftward detours are priced exactly.
    const int x_hi = v.x + trunc;
    const int x_lo = w.x_min();
    const ResistorGraph g = tilted_subgraph(w, x_lo, x_hi, lambda, v.x);
    const int iv = g.index_of(v);
    if (iv < 0) throw ParameterError("escape_probability_exact: vertex isolated");
    std::vector<int> ground;
    for (int y = 0; y < 2; ++y) {
        const int id = g.index_of({x_hi, y});
        if (id >= 0) ground.push_back(id);
    }
    if (ground.empty()) throw ConnectivityError("escape_probability_exact: empty boundary");
    const std::vector<double> volts = grounded_solve(g, iv, ground);
    const double r_eff = volts[static_cast<std::size_t>(iv)];
    // Gauge x_ref = x(v) makes pi(v) = e^{2 lambda x(v)} Z(lambda) equal Z.
    return (1.0 / r_eff) / partition_z(lambda);
}

double ruin_probability_r(int i, int m, double lambda) {
    if (m < 2 || i < 1 || i > m) throw ParameterError("ruin_probability_r: need 1 <= i <= m, m >= 2");
    if (lambda < 0.0) throw ParameterError("ruin_probability_r: lambda must be >= 0");
    const double q = std::exp(lambda) / (std::exp(lambda) + std::exp(-lambda));
    // P_{j-1}(hit j before 0) from the classical ruin problem, in the
    // cancellation-free ratio form (1 - e^{-2l(j-1)}) / (1 - e^{-2lj}).
    const auto hit_before_zero = [&](int j) {
        if (lambda == 0.0) return static_cast<double>(j - 1) / static_cast<double>(j);
        return std::expm1(-2.0 * lambda * (j - 1)) / std::expm1(-2.0 * lambda * j);
    };
    if (i == m) return hit_before_zero(m);
    return q + (1.0 - q) * hit_before_zero(i);
}

double ruin_probability_first_step_oracle(int i, int m, double lambda) {
    if (m < 2 || i < 1 || i > m)
        throw ParameterError("ruin_probability_first_step_oracle: bad indices");
    const double q = std::exp(lambda) / (std::exp(lambda) + std::exp(-lambda));
    const int n = m + 1;
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    auto A = [&](int r, int c) -> double& {
        return a[static_cast<std::size_t>(r) * n + c];
    };
    // u_j = P_j(hit i before 0) on the reflected segment.
    A(0, 0) = 1.0;  // u_0 = 0
    for (int j = 1; j <= m; ++j) {
        if (j == i) {
            A(j, j) = 1.0;
            b[static_cast<std::size_t>(j)] = 1.0;
        } else if (j == m) {
            A(j, j) = 1.0;
            A(j, j - 1) = -1.0;  // forced reflection
        } else {
            A(j, j) = 1.0;
            A(j, j + 1) = -q;
            A(j, j - 1) = -(1.0 - q);
        }
    }
    std::vector<double> u = solve_dense(a, b, n);
    // One step of iterative refinement: the certain-absorption block has an
    // exponentially growing homogeneous mode at large lambda*m, which costs
    // a few digits in a single pass.
    {
        std::vector<double> resid(static_cast<std::size_t>(n), 0.0);
        for (int r = 0; r < n; ++r) {
            long double s = b[static_cast<std::size_t>(r)];
            for (int c = 0; c < n; ++c)
                s -= static_cast<long double>(A(r, c)) * u[static_cast<std::size_t>(c)];
            resid[static_cast<std::size_t>(r)] = static_cast<double>(s);
        }
        const std::vector<double> du = solve_dense(a, resid, n);
        for (int r = 0; r < n; ++r) u[static_cast<std::size_t>(r)] += du[static_cast<std::size_t>(r)];
    }
    if (i == m) return u[static_cast<std::size_t>(m - 1)];
    return q * u[static_cast<std::size_t>(i + 1)] + (1.0 - q) * u[static_cast<std::size_t>(i - 1)];
}

}  // namespace ladder
