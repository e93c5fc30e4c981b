#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace ladder {

/// Vertex of the ladder graph Z x {0,1}. Row 0 is the bottom row.
struct Vertex {
    int x = 0;
    int y = 0;

    friend bool operator==(const Vertex& a, const Vertex& b) {
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator!=(const Vertex& a, const Vertex& b) { return !(a == b); }
    friend bool operator<(const Vertex& a, const Vertex& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }
};

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConnectivityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bit-exact edge configuration of a finite ladder segment.
///
/// Columns run over x in [x_min, x_max]. Per column x there is a vertical
/// edge <(x,0),(x,1)>; per column x < x_max there are horizontal edges
/// <(x,r),(x+1,r)> for rows r = 0 (bottom) and 1 (top).
class WindowConfig {
public:
    WindowConfig(int x_min, int x_max, double p, bool conditioned = false)
        : x_min_(x_min), x_max_(x_max), p_(p), conditioned_(conditioned) {
        if (x_min_ >= x_max_) throw ParameterError("WindowConfig: x_min must be < x_max");
        vert_.assign(static_cast<std::size_t>(n_columns()), 0);
        hb_.assign(static_cast<std::size_t>(n_columns() - 1), 0);
        ht_.assign(static_cast<std::size_t>(n_columns() - 1), 0);
    }

    int x_min() const { return x_min_; }
    int x_max() const { return x_max_; }
    int n_columns() const { return x_max_ - x_min_ + 1; }
    double p() const { return p_; }
    bool conditioned() const { return conditioned_; }
    void set_conditioned(bool c) { conditioned_ = c; }

    bool in_window(int x) const { return x >= x_min_ && x <= x_max_; }
    bool in_window(Vertex v) const { return in_window(v.x) && (v.y == 0 || v.y == 1); }
    /// Interior columns have every incident edge inside the window.
    bool interior(int x) const { return x > x_min_ && x < x_max_; }
    bool interior(Vertex v) const { return interior(v.x); }

    bool vertical(int x) const { return vert_[col(x)] != 0; }
    bool h_bottom(int x) const { return hb_[colh(x)] != 0; }
    bool h_top(int x) const { return ht_[colh(x)] != 0; }
    void set_vertical(int x, bool b) { vert_[col(x)] = b ? 1 : 0; }
    void set_h_bottom(int x, bool b) { hb_[colh(x)] = b ? 1 : 0; }
    void set_h_top(int x, bool b) { ht_[colh(x)] = b ? 1 : 0; }

    std::size_t n_edges() const { return vert_.size() + hb_.size() + ht_.size(); }
    std::size_t n_open_edges() const;

    /// True iff a and b are ladder neighbors joined by an open edge.
    bool edge_open(Vertex a, Vertex b) const;

    /// Open-edge neighbors of v (0 to 3 of them).
    std::vector<Vertex> open_neighbors(Vertex v) const;

    /// Index of v into per-vertex arrays of size 2*n_columns().
    std::size_t vindex(Vertex v) const {
        return 2 * static_cast<std::size_t>(v.x - x_min_) + static_cast<std::size_t>(v.y);
    }
    std::size_t n_vertices() const { return 2 * static_cast<std::size_t>(n_columns()); }

    /// Text serialization: header "ladder-window v1 x_min x_max p conditioned",
    /// then one line per column "x v hb ht" (hb, ht are 0 on the last column).
    void write(std::ostream& os) const;
    static WindowConfig read(std::istream& is);

private:
    std::size_t col(int x) const {
        if (!in_window(x)) throw ParameterError("WindowConfig: column out of window");
        return static_cast<std::size_t>(x - x_min_);
    }
    std::size_t colh(int x) const {
        if (x < x_min_ || x >= x_max_) throw ParameterError("WindowConfig: horizontal out of window");
        return static_cast<std::size_t>(x - x_min_);
    }

    int x_min_;
    int x_max_;
    double p_;
    bool conditioned_;
    std::vector<uint8_t> vert_, hb_, ht_;
};

/// True iff an open path connects column x_min to column x_max.
bool crossing_exists(const WindowConfig& w);

/// Per-vertex mask (indexed by WindowConfig::vindex) of vertices reachable
/// from any seed through open edges.
std::vector<uint8_t> connected_mask(const WindowConfig& w, const std::vector<Vertex>& seeds);

/// Vertices connected to both boundary columns: the in-window realization
/// of the bi-infinite cluster.
std::vector<uint8_t> crossing_cluster_mask(const WindowConfig& w);

/// Translate the window so that u becomes the origin; if u is on the top
/// row the rows are swapped as well (the group operation on Z x Z_2).
WindowConfig shift_window(const WindowConfig& w, Vertex u);

}  // namespace ladder
