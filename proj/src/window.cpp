#include "ladder/window.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace ladder {

std::size_t WindowConfig::n_open_edges() const {
    std::size_t n = 0;
    for (auto b : vert_) n += b;
    for (auto b : hb_) n += b;
    for (auto b : ht_) n += b;
    return n;
}

bool WindowConfig::edge_open(Vertex a, Vertex b) const {
    if (!in_window(a) || !in_window(b)) return false;
    if (a.x == b.x && a.y != b.y) return vertical(a.x);
    if (a.y == b.y && std::abs(a.x - b.x) == 1) {
        const int x = std::min(a.x, b.x);
        return a.y == 0 ? h_bottom(x) : h_top(x);
    }
    return false;
}

std::vector<Vertex> WindowConfig::open_neighbors(Vertex v) const {
    std::vector<Vertex> out;
    out.reserve(3);
    if (v.x > x_min_ && (v.y == 0 ? h_bottom(v.x - 1) : h_top(v.x - 1)))
        out.push_back({v.x - 1, v.y});
    if (v.x < x_max_ && (v.y == 0 ? h_bottom(v.x) : h_top(v.x)))
        out.push_back({v.x + 1, v.y});
    if (vertical(v.x)) out.push_back({v.x, 1 - v.y});
    return out;
}

void WindowConfig::write(std::ostream& os) const {
    os << "ladder-window v1 " << x_min_ << ' ' << x_max_ << ' ' << p_ << ' '
       << (conditioned_ ? 1 : 0) << '\n';
    for (int x = x_min_; x <= x_max_; ++x) {
        const int hb = x < x_max_ ? (h_bottom(x) ? 1 : 0) : 0;
        const int ht = x < x_max_ ? (h_top(x) ? 1 : 0) : 0;
        os << x << ' ' << (vertical(x) ? 1 : 0) << ' ' << hb << ' ' << ht << '\n';
    }
}

WindowConfig WindowConfig::read(std::istream& is) {
    std::string magic, version;
    int x_min = 0, x_max = 0, cond = 0;
    double p = 0.0;
    is >> magic >> version >> x_min >> x_max >> p >> cond;
    if (!is || magic != "ladder-window" || version != "v1")
        throw ParameterError("WindowConfig::read: bad header");
    WindowConfig w(x_min, x_max, p, cond != 0);
    for (int x = x_min; x <= x_max; ++x) {
        int xr = 0, v = 0, hb = 0, ht = 0;
        is >> xr >> v >> hb >> ht;
        if (!is || xr != x) {
            std::ostringstream msg;
            msg << "WindowConfig::read: bad column line for x=" << x;
            throw ParameterError(msg.str());
        }
        w.set_vertical(x, v != 0);
        if (x < x_max) {
            w.set_h_bottom(x, hb != 0);
            w.set_h_top(x, ht != 0);
        }
    }
    return w;
}

std::vector<uint8_t> connected_mask(const WindowConfig& w, const std::vector<Vertex>& seeds) {
    std::vector<uint8_t> mask(w.n_vertices(), 0);
    std::vector<Vertex> stack;
    for (const Vertex& s : seeds) {
        if (!w.in_window(s) || mask[w.vindex(s)]) continue;
        mask[w.vindex(s)] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            for (const Vertex& u : w.open_neighbors(v)) {
                if (!mask[w.vindex(u)]) {
                    mask[w.vindex(u)] = 1;
                    stack.push_back(u);
                }
            }
        }
    }
    return mask;
}

bool crossing_exists(const WindowConfig& w) {
    const auto mask = connected_mask(w, {{w.x_min(), 0}, {w.x_min(), 1}});
    return mask[w.vindex({w.x_max(), 0})] || mask[w.vindex({w.x_max(), 1})];
}

std::vector<uint8_t> crossing_cluster_mask(const WindowConfig& w) {
    const auto left = connected_mask(w, {{w.x_min(), 0}, {w.x_min(), 1}});
    const auto right = connected_mask(w, {{w.x_max(), 0}, {w.x_max(), 1}});
    std::vector<uint8_t> both(w.n_vertices(), 0);
    for (std::size_t i = 0; i < both.size(); ++i) both[i] = left[i] && right[i];
    return both;
}

WindowConfig shift_window(const WindowConfig& w, Vertex u) {
    const bool flip = u.y == 1;
    WindowConfig out(w.x_min() - u.x, w.x_max() - u.x, w.p(), w.conditioned());
    for (int x = w.x_min(); x <= w.x_max(); ++x) {
        out.set_vertical(x - u.x, w.vertical(x));
        if (x < w.x_max()) {
            out.set_h_bottom(x - u.x, flip ? w.h_top(x) : w.h_bottom(x));
            out.set_h_top(x - u.x, flip ? w.h_bottom(x) : w.h_top(x));
        }
    }
    return out;
}

}  // namespace ladder
