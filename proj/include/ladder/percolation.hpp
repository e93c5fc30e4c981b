#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "ladder/rng.hpp"
#include "ladder/window.hpp"

namespace ladder {

class FeasibilityError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Independent Bernoulli(p) draw for every edge of the window.
WindowConfig sample_window_unconditioned(double p, int x_min, int x_max, RngStream& rng);

/// Exact sampler for the crossing-conditioned law on a window.
///
/// Columns are processed left to right. The per-column state is the
/// connectivity pattern of the two frontier vertices: which of them reach
/// the left boundary column through explored edges, and whether they are
/// linked to each other. Backward acceptance probabilities are tabulated
/// once per (p, window) by dynamic programming; each draw then tilts the
/// Bernoulli prior of the three per-column edge bits by the backward table.
class ConditionedSampler {
public:
    ConditionedSampler(double p, int x_min, int x_max);

    WindowConfig draw(RngStream& rng) const;

    double p() const { return p_; }
    int x_min() const { return x_min_; }
    int x_max() const { return x_max_; }

    // Frontier states: both reach the boundary and are linked / unlinked,
    // or only one row reaches it.
    enum State : int { kBothLinked = 0, kBothUnlinked = 1, kBottomOnly = 2, kTopOnly = 3, kDead = 4 };

    /// State transition when revealing (h_bottom, h_top, vertical at x+1);
    /// bits packed as hb | ht<<1 | vt<<2. Exposed for tests.
    static State transition(State s, unsigned bits);

private:
    double p_;
    int x_min_, x_max_;
    // backward[i][s]: relative probability that the crossing event still
    // succeeds from frontier column x_min + i in state s (normalized per
    // column to avoid underflow on long windows).
    std::vector<std::array<double, 4>> backward_;
};

WindowConfig sample_window_conditioned(double p, int n1, int n2, RngStream& rng);

/// Brute-force oracle: the exact conditioned distribution on a small window.
struct EnumeratedDistribution {
    int x_min = 0;
    int x_max = 0;
    double p = 0.0;
    int n_edges = 0;
    double z_crossing = 0.0;             // mu_p(crossing event)
    std::vector<uint32_t> keys;          // crossing configurations
    std::vector<double> probs;           // conditional probabilities, sum 1
    std::vector<double> edge_marginals;  // P(edge open | crossing) per edge slot
    std::unordered_map<uint32_t, int> index;

    WindowConfig materialize(int i) const;
    static uint32_t encode(const WindowConfig& w);
    int index_of(const WindowConfig& w) const;
};

/// Exhaustive enumeration; windows above 24 edges are refused.
EnumeratedDistribution enumerate_conditioned_distribution(double p, int n1, int n2);

/// Interior x-coordinates whose top vertex (x,1) is isolated and whose
/// bottom vertex lies on the crossing cluster. Boundary columns are
/// excluded: their isolation cannot be determined inside the window.
std::vector<int> find_preregeneration_points(const WindowConfig& w);

/// Block between consecutive pre-regeneration points a < b, stored
/// relative to a: vert[i] is the vertical at a+i, hb[i]/ht[i] the
/// horizontals (a+i, a+i+1), for i in [0, L).
struct Cycle {
    int length = 0;
    std::vector<uint8_t> vert, hb, ht;
    double conductance = 0.0;
};

/// Cycles between consecutive pre-regeneration points that keep a margin
/// of `margin` columns to both window boundaries. Fewer than two eligible
/// points yield an empty list.
std::vector<Cycle> extract_cycles(const WindowConfig& w, int margin);

struct TrapInfo {
    int min_x = 0;
    int max_x = 0;
    int n_vertices = 0;
    int length() const { return max_x - min_x + 1; }
};

struct ClusterDecomposition {
    std::vector<int> prereg_xs;
    std::vector<Cycle> cycles;
    std::vector<uint8_t> cluster_mask;    // crossing cluster, by vindex
    std::vector<uint8_t> backbone_mask;   // forwards-communicating within window
    std::vector<uint8_t> backwards_mask;  // backwards-communicating within window
    std::vector<TrapInfo> traps;          // cluster components that are not forwards-communicating
    std::vector<int> trap_lengths;
    std::vector<std::string> t_states;    // per column, "<bottom bit><top bit>" from backwards_mask
};

/// Forwards/backwards communication classes, traps and the per-column
/// T-state string. Does not fill `cycles`; see decompose().
ClusterDecomposition classify_communication(const WindowConfig& w);

/// classify_communication plus margin-filtered cycles.
ClusterDecomposition decompose(const WindowConfig& w, int margin);

/// Concatenation of independent cycles; the designated cycle's left
/// endpoint sits at the origin. Joints between cycles are exactly the
/// interior pre-regeneration points of the result.
struct CycleEnv {
    WindowConfig window;
    std::vector<int> joints;
};

CycleEnv assemble_cycles(const std::vector<Cycle>& cycles, std::size_t designated, double p);

/// n_cycles i.i.d. picks (with replacement) from a harvested pool.
CycleEnv build_cycle_stationary_env(const std::vector<Cycle>& pool, std::size_t n_cycles,
                                    RngStream& rng, std::size_t designated = 0);

}  // namespace ladder
