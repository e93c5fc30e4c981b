#include "ladder/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ladder/electrical.hpp"

namespace ladder {

WindowConfig sample_window_unconditioned(double p, int x_min, int x_max, RngStream& rng) {
    if (p < 0.0 || p > 1.0) throw ParameterError("sample_window_unconditioned: p outside [0,1]");
    if (x_min >= x_max) throw ParameterError("sample_window_unconditioned: empty window");
    WindowConfig w(x_min, x_max, p, false);
    for (int x = x_min; x <= x_max; ++x) {
        w.set_vertical(x, rng.bernoulli(p));
        if (x < x_max) {
            w.set_h_bottom(x, rng.bernoulli(p));
            w.set_h_top(x, rng.bernoulli(p));
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Conditioned sampler
// ---------------------------------------------------------------------------

namespace {

// Tiny fixed-size union-find over {old0, old1, new0, new1}.
struct Quad {
    int parent[4];
    Quad() { parent[0] = 0; parent[1] = 1; parent[2] = 2; parent[3] = 3; }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

ConditionedSampler::State ConditionedSampler::transition(State s, unsigned bits) {
    if (s == kDead) return kDead;
    const bool hb = bits & 1u;
    const bool ht = bits & 2u;
    const bool vt = bits & 4u;
    const bool b0 = (s == kBothLinked || s == kBothUnlinked || s == kBottomOnly);
    const bool b1 = (s == kBothLinked || s == kBothUnlinked || s == kTopOnly);
    const bool link = (s == kBothLinked);

    Quad q;  // 0: old bottom, 1: old top, 2: new bottom, 3: new top
    if (link) q.join(0, 1);
    if (hb) q.join(0, 2);
    if (ht) q.join(1, 3);
    if (vt) q.join(2, 3);

    const bool nb0 = (b0 && q.find(2) == q.find(0)) || (b1 && q.find(2) == q.find(1));
    const bool nb1 = (b0 && q.find(3) == q.find(0)) || (b1 && q.find(3) == q.find(1));
    const bool nlink = q.find(2) == q.find(3);
    if (!nb0 && !nb1) return kDead;
    if (nb0 && nb1) return nlink ? kBothLinked : kBothUnlinked;
    return nb0 ? kBottomOnly : kTopOnly;
}

ConditionedSampler::ConditionedSampler(double p, int x_min, int x_max)
    : p_(p), x_min_(x_min), x_max_(x_max) {
    if (p <= 0.0 || p > 1.0)
        throw ParameterError("ConditionedSampler: p must be in (0,1]");
    if (x_min >= x_max) throw ParameterError("ConditionedSampler: empty window");

    const int w = x_max - x_min + 1;
    backward_.assign(static_cast<std::size_t>(w), {0.0, 0.0, 0.0, 0.0});
    // All live states at the last frontier already contain a vertex that
    // reaches the left boundary, so the crossing event holds.
    backward_.back() = {1.0, 1.0, 1.0, 1.0};

    double prior[8];
    for (unsigned bits = 0; bits < 8; ++bits) {
        const int k = __builtin_popcount(bits);
        prior[bits] = std::pow(p, k) * std::pow(1.0 - p, 3 - k);
    }

    for (int i = w - 2; i >= 0; --i) {
        std::array<double, 4> z = {0.0, 0.0, 0.0, 0.0};
        for (int s = 0; s < 4; ++s) {
            double acc = 0.0;
            for (unsigned bits = 0; bits < 8; ++bits) {
                const State t = transition(static_cast<State>(s), bits);
                if (t != kDead) acc += prior[bits] * backward_[i + 1][t];
            }
            z[s] = acc;
        }
        const double m = std::max(std::max(z[0], z[1]), std::max(z[2], z[3]));
        if (m <= 0.0)
            throw ConnectivityError("ConditionedSampler: crossing has probability zero");
        for (double& v : z) v /= m;
        backward_[i] = z;
    }
}

WindowConfig ConditionedSampler::draw(RngStream& rng) const {
    WindowConfig w(x_min_, x_max_, p_, true);

    // Vertical at the left boundary: both boundary vertices trivially reach
    // the boundary; the bit only decides whether they are linked.
    const double w1 = p_ * backward_[0][kBothLinked];
    const double w0 = (1.0 - p_) * backward_[0][kBothUnlinked];
    State s;
    if (rng.uniform() * (w0 + w1) < w1) {
        w.set_vertical(x_min_, true);
        s = kBothLinked;
    } else {
        w.set_vertical(x_min_, false);
        s = kBothUnlinked;
    }

    double prior[8];
    for (unsigned bits = 0; bits < 8; ++bits) {
        const int k = __builtin_popcount(bits);
        prior[bits] = std::pow(p_, k) * std::pow(1.0 - p_, 3 - k);
    }

    for (int x = x_min_; x < x_max_; ++x) {
        const std::size_t i = static_cast<std::size_t>(x - x_min_);
        double weight[8];
        State next[8];
        double total = 0.0;
        for (unsigned bits = 0; bits < 8; ++bits) {
            const State t = transition(s, bits);
            next[bits] = t;
            weight[bits] = t == kDead ? 0.0 : prior[bits] * backward_[i + 1][t];
            total += weight[bits];
        }
        double u = rng.uniform() * total;
        unsigned chosen = 7;
        for (unsigned bits = 0; bits < 8; ++bits) {
            if (u < weight[bits]) {
                chosen = bits;
                break;
            }
            u -= weight[bits];
        }
        w.set_h_bottom(x, chosen & 1u);
        w.set_h_top(x, chosen & 2u);
        w.set_vertical(x + 1, chosen & 4u);
        s = next[chosen];
    }
    return w;
}

WindowConfig sample_window_conditioned(double p, int n1, int n2, RngStream& rng) {
    if (n1 < 1 || n2 < 1) throw ParameterError("sample_window_conditioned: N1, N2 must be >= 1");
    return ConditionedSampler(p, -n1, n2).draw(rng);
}

// ---------------------------------------------------------------------------
// Enumeration oracle
// ---------------------------------------------------------------------------

uint32_t EnumeratedDistribution::encode(const WindowConfig& w) {
    uint32_t key = 0;
    int bit = 0;
    for (int x = w.x_min(); x <= w.x_max(); ++x, ++bit)
        if (w.vertical(x)) key |= 1u << bit;
    for (int x = w.x_min(); x < w.x_max(); ++x, ++bit)
        if (w.h_bottom(x)) key |= 1u << bit;
    for (int x = w.x_min(); x < w.x_max(); ++x, ++bit)
        if (w.h_top(x)) key |= 1u << bit;
    return key;
}

WindowConfig EnumeratedDistribution::materialize(int i) const {
    const uint32_t key = keys.at(static_cast<std::size_t>(i));
    WindowConfig w(x_min, x_max, p, true);
    int bit = 0;
    for (int x = x_min; x <= x_max; ++x, ++bit) w.set_vertical(x, key & (1u << bit));
    for (int x = x_min; x < x_max; ++x, ++bit) w.set_h_bottom(x, key & (1u << bit));
    for (int x = x_min; x < x_max; ++x, ++bit) w.set_h_top(x, key & (1u << bit));
    return w;
}

int EnumeratedDistribution::index_of(const WindowConfig& w) const {
    const auto it = index.find(encode(w));
    return it == index.end() ? -1 : it->second;
}

EnumeratedDistribution enumerate_conditioned_distribution(double p, int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw ParameterError("enumerate_conditioned_distribution: bad window");
    if (p <= 0.0 || p >= 1.0)
        throw ParameterError("enumerate_conditioned_distribution: p must be in (0,1)");
    EnumeratedDistribution out;
    out.x_min = -n1;
    out.x_max = n2;
    out.p = p;
    const int w = n1 + n2 + 1;
    out.n_edges = w + 2 * (w - 1);
    if (out.n_edges > 24) {
        std::ostringstream msg;
        msg << "enumerate_conditioned_distribution: " << out.n_edges
            << " edges exceed the 24-edge feasibility guard";
        throw FeasibilityError(msg.str());
    }

    WindowConfig cfg(out.x_min, out.x_max, p, true);
    const uint32_t total = 1u << out.n_edges;
    double z = 0.0;
    std::vector<double> marg(static_cast<std::size_t>(out.n_edges), 0.0);
    for (uint32_t key = 0; key < total; ++key) {
        int bit = 0;
        for (int x = out.x_min; x <= out.x_max; ++x, ++bit) cfg.set_vertical(x, key & (1u << bit));
        for (int x = out.x_min; x < out.x_max; ++x, ++bit) cfg.set_h_bottom(x, key & (1u << bit));
        for (int x = out.x_min; x < out.x_max; ++x, ++bit) cfg.set_h_top(x, key & (1u << bit));
        if (!crossing_exists(cfg)) continue;
        const int open = __builtin_popcount(key);
        const double prob =
            std::pow(p, open) * std::pow(1.0 - p, out.n_edges - open);
        out.keys.push_back(key);
        out.probs.push_back(prob);
        z += prob;
        for (int b = 0; b < out.n_edges; ++b)
            if (key & (1u << b)) marg[static_cast<std::size_t>(b)] += prob;
    }
    out.z_crossing = z;
    for (double& q : out.probs) q /= z;
    for (double& m : marg) m /= z;
    out.edge_marginals = std::move(marg);
    out.index.reserve(out.keys.size() * 2);
    for (std::size_t i = 0; i < out.keys.size(); ++i)
        out.index.emplace(out.keys[i], static_cast<int>(i));
    return out;
}

// ---------------------------------------------------------------------------
// Pre-regeneration points, cycles, communication classes
// ---------------------------------------------------------------------------

std::vector<int> find_preregeneration_points(const WindowConfig& w) {
    const auto cluster = crossing_cluster_mask(w);
    std::vector<int> out;
    for (int x = w.x_min() + 1; x < w.x_max(); ++x) {
        if (w.vertical(x)) continue;
        if (w.h_top(x - 1) || w.h_top(x)) continue;
        if (!cluster[w.vindex({x, 0})]) continue;
        out.push_back(x);
    }
    return out;
}

std::vector<Cycle> extract_cycles(const WindowConfig& w, int margin) {
    if (margin < 0) throw ParameterError("extract_cycles: negative margin");
    const auto pts = find_preregeneration_points(w);
    std::vector<Cycle> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const int a = pts[i];
        const int b = pts[i + 1];
        if (a - w.x_min() < margin || w.x_max() - b < margin) continue;
        Cycle c;
        c.length = b - a;
        c.vert.resize(static_cast<std::size_t>(c.length));
        c.hb.resize(static_cast<std::size_t>(c.length));
        c.ht.resize(static_cast<std::size_t>(c.length));
        for (int k = 0; k < c.length; ++k) {
            c.vert[static_cast<std::size_t>(k)] = w.vertical(a + k) ? 1 : 0;
            c.hb[static_cast<std::size_t>(k)] = w.h_bottom(a + k) ? 1 : 0;
            c.ht[static_cast<std::size_t>(k)] = w.h_top(a + k) ? 1 : 0;
        }
        c.conductance = cycle_conductance(c);
        out.push_back(std::move(c));
    }
    return out;
}

ClusterDecomposition classify_communication(const WindowConfig& w) {
    ClusterDecomposition d;
    d.prereg_xs = find_preregeneration_points(w);
    d.cluster_mask = crossing_cluster_mask(w);

    const int n = w.n_columns();
    d.backbone_mask.assign(w.n_vertices(), 0);
    d.backwards_mask.assign(w.n_vertices(), 0);

    // Forwards: right-to-left sweep. reach[r] tells whether (x,r) reaches
    // the right boundary inside columns >= x; link tells whether (x,0) and
    // (x,1) are connected inside columns >= x.
    {
        bool r0 = true, r1 = true;
        bool link = w.vertical(w.x_max());
        d.backbone_mask[w.vindex({w.x_max(), 0})] = 1;
        d.backbone_mask[w.vindex({w.x_max(), 1})] = 1;
        for (int x = w.x_max() - 1; x >= w.x_min(); --x) {
            const bool hb = w.h_bottom(x);
            const bool ht = w.h_top(x);
            const bool nl = w.vertical(x) || (hb && ht && link);
            const bool n0 = (hb && r0) || (nl && ht && r1);
            const bool n1 = (ht && r1) || (nl && hb && r0);
            r0 = n0;
            r1 = n1;
            link = nl;
            d.backbone_mask[w.vindex({x, 0})] = r0 ? 1 : 0;
            d.backbone_mask[w.vindex({x, 1})] = r1 ? 1 : 0;
        }
    }

    // Backwards: mirror sweep toward the left boundary.
    {
        bool r0 = true, r1 = true;
        bool link = w.vertical(w.x_min());
        d.backwards_mask[w.vindex({w.x_min(), 0})] = 1;
        d.backwards_mask[w.vindex({w.x_min(), 1})] = 1;
        for (int x = w.x_min() + 1; x <= w.x_max(); ++x) {
            const bool hb = w.h_bottom(x - 1);
            const bool ht = w.h_top(x - 1);
            const bool nl = w.vertical(x) || (hb && ht && link);
            const bool n0 = (hb && r0) || (nl && ht && r1);
            const bool n1 = (ht && r1) || (nl && hb && r0);
            r0 = n0;
            r1 = n1;
            link = nl;
            d.backwards_mask[w.vindex({x, 0})] = r0 ? 1 : 0;
            d.backwards_mask[w.vindex({x, 1})] = r1 ? 1 : 0;
        }
    }

    d.t_states.reserve(static_cast<std::size_t>(n));
    for (int x = w.x_min(); x <= w.x_max(); ++x) {
        std::string s(2, '0');
        s[0] = d.backwards_mask[w.vindex({x, 0})] ? '1' : '0';
        s[1] = d.backwards_mask[w.vindex({x, 1})] ? '1' : '0';
        d.t_states.push_back(std::move(s));
    }

    // Traps: crossing-cluster vertices that are not forwards-communicating,
    // grouped into open-edge components; the length is the x-extent.
    std::vector<uint8_t> seen(w.n_vertices(), 0);
    for (int x = w.x_min(); x <= w.x_max(); ++x) {
        for (int y = 0; y < 2; ++y) {
            const Vertex v{x, y};
            const std::size_t vi = w.vindex(v);
            if (seen[vi] || !d.cluster_mask[vi] || d.backbone_mask[vi]) continue;
            TrapInfo t;
            t.min_x = t.max_x = x;
            std::vector<Vertex> stack{v};
            seen[vi] = 1;
            while (!stack.empty()) {
                const Vertex u = stack.back();
                stack.pop_back();
                ++t.n_vertices;
                t.min_x = std::min(t.min_x, u.x);
                t.max_x = std::max(t.max_x, u.x);
                for (const Vertex& nb : w.open_neighbors(u)) {
                    const std::size_t ni = w.vindex(nb);
                    if (seen[ni] || !d.cluster_mask[ni] || d.backbone_mask[ni]) continue;
                    seen[ni] = 1;
                    stack.push_back(nb);
                }
            }
            d.traps.push_back(t);
            d.trap_lengths.push_back(t.length());
        }
    }
    return d;
}

ClusterDecomposition decompose(const WindowConfig& w, int margin) {
    ClusterDecomposition d = classify_communication(w);
    d.cycles = extract_cycles(w, margin);
    return d;
}

CycleEnv assemble_cycles(const std::vector<Cycle>& cycles, std::size_t designated, double p) {
    if (cycles.empty()) throw ParameterError("assemble_cycles: empty cycle list");
    if (designated >= cycles.size())
        throw ParameterError("assemble_cycles: designated index out of range");
    int left = 0;
    for (std::size_t i = 0; i < designated; ++i) left += cycles[i].length;
    int total = 0;
    for (const Cycle& c : cycles) total += c.length;

    CycleEnv env{WindowConfig(-left, total - left, p, true), {}};
    int x = -left;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const Cycle& c = cycles[i];
        for (int k = 0; k < c.length; ++k) {
            env.window.set_vertical(x + k, c.vert[static_cast<std::size_t>(k)] != 0);
            env.window.set_h_bottom(x + k, c.hb[static_cast<std::size_t>(k)] != 0);
            env.window.set_h_top(x + k, c.ht[static_cast<std::size_t>(k)] != 0);
        }
        x += c.length;
        if (i + 1 < cycles.size()) env.joints.push_back(x);
    }
    env.window.set_vertical(env.window.x_max(), false);
    return env;
}

CycleEnv build_cycle_stationary_env(const std::vector<Cycle>& pool, std::size_t n_cycles,
                                    RngStream& rng, std::size_t designated) {
    if (pool.empty()) throw ParameterError("build_cycle_stationary_env: empty pool");
    if (n_cycles == 0) throw ParameterError("build_cycle_stationary_env: n_cycles must be >= 1");
    std::vector<Cycle> picks;
    picks.reserve(n_cycles);
    for (std::size_t i = 0; i < n_cycles; ++i)
        picks.push_back(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
    return assemble_cycles(picks, designated, 0.0);
}

}  // namespace ladder
