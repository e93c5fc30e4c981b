#include "ladder/walk.hpp"

#include <cmath>
#include <map>

namespace ladder {

namespace {

struct Incident {
    // Displacements: left -1, right +1, vertical 0.
    bool open_left = false, open_right = false, open_vert = false;
    int n_closed = 0;
    int closed_dx_sum = 0;   // sum of dx over closed edges
    int closed_dx2_sum = 0;  // sum of dx^2 over closed edges
};

Incident incident_edges(const WindowConfig& w, Vertex v) {
    if (!w.interior(v))
        throw ParameterError("walk: vertex outside the usable window interior");
    Incident e;
    e.open_left = v.y == 0 ? w.h_bottom(v.x - 1) : w.h_top(v.x - 1);
    e.open_right = v.y == 0 ? w.h_bottom(v.x) : w.h_top(v.x);
    e.open_vert = w.vertical(v.x);
    if (!e.open_left) {
        ++e.n_closed;
        e.closed_dx_sum -= 1;
        e.closed_dx2_sum += 1;
    }
    if (!e.open_right) {
        ++e.n_closed;
        e.closed_dx_sum += 1;
        e.closed_dx2_sum += 1;
    }
    if (!e.open_vert) ++e.n_closed;
    return e;
}

}  // namespace

TransitionRow transition_row(const WindowConfig& w, double lambda, Vertex v) {
    const Incident e = incident_edges(w, v);
    const double z = partition_z(lambda);
    const double wl = std::exp(-lambda) / z;
    const double wr = std::exp(lambda) / z;
    const double wv = 1.0 / z;

    TransitionRow row;
    double moved = 0.0;
    if (e.open_left) {
        row.target[row.n] = {v.x - 1, v.y};
        row.prob[row.n++] = wl;
        moved += wl;
    }
    if (e.open_right) {
        row.target[row.n] = {v.x + 1, v.y};
        row.prob[row.n++] = wr;
        moved += wr;
    }
    if (e.open_vert) {
        row.target[row.n] = {v.x, 1 - v.y};
        row.prob[row.n++] = wv;
        moved += wv;
    }
    if (e.n_closed > 0) {
        row.target[row.n] = v;
        row.prob[row.n++] = 1.0 - moved;
    }
    return row;
}

double nu(const WindowConfig& w, Vertex v, Vertex to) {
    const Incident e = incident_edges(w, v);
    if (to == v) {
        if (e.n_closed == 0) throw ParameterError("nu: no self-loop at a fully open vertex");
        return static_cast<double>(e.closed_dx_sum) / static_cast<double>(e.n_closed);
    }
    if (!w.edge_open(v, to)) throw ParameterError("nu: target not reachable in one step");
    return static_cast<double>(to.x - v.x);
}

double second_derivative_ratio(const WindowConfig& w, Vertex v, Vertex to) {
    const Incident e = incident_edges(w, v);
    if (to == v) {
        if (e.n_closed == 0)
            throw ParameterError("second_derivative_ratio: no self-loop at a fully open vertex");
        return static_cast<double>(e.closed_dx2_sum) / static_cast<double>(e.n_closed) - 2.0 / 3.0;
    }
    if (!w.edge_open(v, to))
        throw ParameterError("second_derivative_ratio: target not reachable in one step");
    const double dx = static_cast<double>(to.x - v.x);
    return dx * dx - 2.0 / 3.0;
}

Trajectory simulate(const WindowConfig& w, double lambda, Vertex start, int64_t n_steps,
                    RngStream& rng) {
    if (!w.interior(start)) throw ParameterError("simulate: start outside window interior");
    if (n_steps < 0) throw ParameterError("simulate: negative step count");

    Trajectory t;
    t.lambda = lambda;
    t.seed = rng.seed();
    t.stream = rng.stream();
    t.pos.reserve(static_cast<std::size_t>(n_steps) + 1);
    t.pos.push_back(start);

    const double z = partition_z(lambda);
    const double wl = std::exp(-lambda) / z;
    const double wr = std::exp(lambda) / z;
    const double wv = 1.0 / z;
    const double log_z_ratio = std::log(z / 3.0);

    Vertex v = start;
    for (int64_t k = 0; k < n_steps; ++k) {
        const Incident e = incident_edges(w, v);
        const double pl = e.open_left ? wl : 0.0;
        const double pr = e.open_right ? wr : 0.0;
        const double pv = e.open_vert ? wv : 0.0;

        const double u = rng.uniform();
        int dx = 0;
        bool moved = true;
        Vertex next = v;
        if (u < pl) {
            next = {v.x - 1, v.y};
            dx = -1;
        } else if (u < pl + pr) {
            next = {v.x + 1, v.y};
            dx = 1;
        } else if (u < pl + pr + pv) {
            next = {v.x, 1 - v.y};
        } else {
            moved = false;
        }

        if (moved) {
            const double nu_step = static_cast<double>(dx);
            t.m_n += nu_step;
            t.a_n += 0.5 * (nu_step * nu_step - (dx * dx - 2.0 / 3.0));
            if (lambda != 0.0) t.log_weight += lambda * dx - log_z_ratio;
        } else {
            const double m = static_cast<double>(e.n_closed);
            const double nu_step = static_cast<double>(e.closed_dx_sum) / m;
            const double d2 = static_cast<double>(e.closed_dx2_sum) / m - 2.0 / 3.0;
            t.m_n += nu_step;
            t.a_n += 0.5 * (nu_step * nu_step - d2);
            if (lambda != 0.0) {
                double s = 0.0;
                if (!e.open_left) s += std::exp(-lambda);
                if (!e.open_right) s += std::exp(lambda);
                if (!e.open_vert) s += 1.0;
                t.log_weight += std::log(s / m) - log_z_ratio;
            }
        }

        v = next;
        t.pos.push_back(v);
        if (v.x <= w.x_min() || v.x >= w.x_max()) throw BoundaryExit(k + 1, v.x);
    }
    return t;
}

GirsanovComponents girsanov_components(const WindowConfig& w, const std::vector<Vertex>& pos,
                                       double lambda) {
    GirsanovComponents g;
    const double log_z_ratio = std::log(partition_z(lambda) / 3.0);
    for (std::size_t k = 1; k < pos.size(); ++k) {
        const Vertex from = pos[k - 1];
        const Vertex to = pos[k];
        const double nu_step = nu(w, from, to);
        const double d2 = second_derivative_ratio(w, from, to);
        g.m += nu_step;
        g.a += 0.5 * (nu_step * nu_step - d2);
        if (to != from) {
            g.log_weight += lambda * (to.x - from.x) - log_z_ratio;
        } else {
            const Incident e = incident_edges(w, from);
            double s = 0.0;
            if (!e.open_left) s += std::exp(-lambda);
            if (!e.open_right) s += std::exp(lambda);
            if (!e.open_vert) s += 1.0;
            g.log_weight += std::log(s / e.n_closed) - log_z_ratio;
        }
    }
    g.r = g.log_weight - lambda * g.m + lambda * lambda * g.a;
    return g;
}

double martingale_residual(const WindowConfig& w, const std::vector<Vertex>& vertices) {
    double worst = 0.0;
    for (const Vertex& v : vertices) {
        const TransitionRow row = transition_row(w, 0.0, v);
        double s = 0.0;
        for (int i = 0; i < row.n; ++i) s += row.prob[i] * nu(w, v, row.target[i]);
        worst = std::max(worst, std::fabs(s));
    }
    return worst;
}

namespace {

void enumerate_paths(const WindowConfig& w, Vertex v, int depth, double p0, double logw,
                     double lambda, std::map<Vertex, double>& out) {
    if (depth == 0) {
        out[v] += p0 * std::exp(logw);
        return;
    }
    const TransitionRow row0 = transition_row(w, 0.0, v);
    const TransitionRow rowl = transition_row(w, lambda, v);
    for (int i = 0; i < row0.n; ++i) {
        // Rows at different lambda enumerate the same outcomes in the same order.
        enumerate_paths(w, row0.target[i], depth - 1, p0 * row0.prob[i],
                        logw + std::log(rowl.prob[i] / row0.prob[i]), lambda, out);
    }
}

}  // namespace

double girsanov_enumeration_gap(const WindowConfig& w, Vertex start, int n_steps, double lambda) {
    if (start.x - n_steps <= w.x_min() || start.x + n_steps >= w.x_max())
        throw ParameterError("girsanov_enumeration_gap: window too small for the horizon");

    std::map<Vertex, double> weighted;
    enumerate_paths(w, start, n_steps, 1.0, 0.0, lambda, weighted);

    // Independent route: forward kernel powers at bias lambda.
    std::map<Vertex, double> dist;
    dist[start] = 1.0;
    for (int k = 0; k < n_steps; ++k) {
        std::map<Vertex, double> next;
        for (const auto& [v, p] : dist) {
            const TransitionRow row = transition_row(w, lambda, v);
            for (int i = 0; i < row.n; ++i) next[row.target[i]] += p * row.prob[i];
        }
        dist = std::move(next);
    }

    double worst = 0.0;
    for (const auto& [v, p] : dist)
        worst = std::max(worst, std::fabs(p - (weighted.count(v) ? weighted.at(v) : 0.0)));
    for (const auto& [v, p] : weighted)
        worst = std::max(worst, std::fabs(p - (dist.count(v) ? dist.at(v) : 0.0)));
    return worst;
}

}  // namespace ladder
