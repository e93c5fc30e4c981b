#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ladder/electrical.hpp"
#include "ladder/rng.hpp"
#include "ladder/window.hpp"

namespace ladder {

/// Thrown when a simulated walk reaches a window boundary column; carries
/// the step at which it happened so the caller can grow the window.
class BoundaryExit : public std::runtime_error {
public:
    BoundaryExit(int64_t step, int x)
        : std::runtime_error("walk reached window boundary"), step(step), x(x) {}
    int64_t step;
    int x;
};

/// One row of the lazy biased kernel: open-edge moves weighted by
/// e^{lambda dx} / (e^lambda + 1 + e^{-lambda}), closed edges contributing
/// self-loop mass.
struct TransitionRow {
    Vertex target[4];
    double prob[4];
    int n = 0;

    double sum() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += prob[i];
        return s;
    }
};

TransitionRow transition_row(const WindowConfig& w, double lambda, Vertex v);

/// Derivative of log p_{omega,lambda}(v,to) at lambda = 0. For a move this
/// is x(to) - x(v); for the self-loop it is the mean displacement over the
/// closed incident edges. Requires to in N_omega(v).
double nu(const WindowConfig& w, Vertex v, Vertex to);

/// p''_{omega,0}(v,to) / p_{omega,0}(v,to): dx^2 - 2/3 for a move with
/// displacement dx, and the closed-edge mean of dx^2 minus 2/3 for the
/// self-loop.
double second_derivative_ratio(const WindowConfig& w, Vertex v, Vertex to);

struct Trajectory {
    double lambda = 0.0;
    uint64_t seed = 0;
    uint64_t stream = 0;
    std::vector<Vertex> pos;  // Y_0 .. Y_n
    double m_n = 0.0;         // sum of nu along the path
    double a_n = 0.0;         // (1/2) sum (nu^2 - p''/p)
    double log_weight = 0.0;  // sum log(p_lambda / p_0) along the path

    int64_t n_steps() const { return static_cast<int64_t>(pos.size()) - 1; }
    int64_t x_n() const { return pos.back().x; }
};

/// Simulate n_steps of the lazy biased walk from `start`. Deterministic in
/// the stream. Throws BoundaryExit if the walk reaches a boundary column.
Trajectory simulate(const WindowConfig& w, double lambda, Vertex start, int64_t n_steps,
                    RngStream& rng);

struct GirsanovComponents {
    double m = 0.0;
    double a = 0.0;
    double r = 0.0;           // log_weight - lambda m + lambda^2 a
    double log_weight = 0.0;  // sum log(p_lambda/p_0)
};

/// Recompute M_n, A_n and the Girsanov log-weight toward bias `lambda`
/// from a stored position sequence.
GirsanovComponents girsanov_components(const WindowConfig& w, const std::vector<Vertex>& pos,
                                       double lambda);

/// Max over the sampled vertices of |sum_w nu(v,w) p_0(v,w)|.
double martingale_residual(const WindowConfig& w, const std::vector<Vertex>& vertices);

/// Exhaustive-path check of the Girsanov identity on a small environment:
/// sum over lambda=0 paths of P_0(path) e^{log weight} 1{Y_n = v} against
/// P_lambda(Y_n = v) from kernel powers. Returns the max absolute gap over
/// endpoints v. Requires start at distance > n_steps from both boundaries.
double girsanov_enumeration_gap(const WindowConfig& w, Vertex start, int n_steps, double lambda);

}  // namespace ladder
