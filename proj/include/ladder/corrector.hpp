#pragma once

#include <stdexcept>
#include <vector>

#include "ladder/percolation.hpp"
#include "ladder/window.hpp"

namespace ladder {

/// Raised when a potential table cannot be built because the window does
/// not hold enough margin-interior pre-regeneration points around the
/// requested origin. Callers typically resample a wider window.
class MarginViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KappaEstimate {
    double kappa = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

/// Ratio-of-means estimator kappa = mean(L) / mean(1/C) with the
/// delta-method standard error. The sample must exclude the origin cycle.
KappaEstimate estimate_kappa(const std::vector<Cycle>& cycles);

/// Per-vertex phi, psi, chi over the covered span between the first and
/// last margin-interior pre-regeneration anchor.
///
/// phi is the unit-current harmonic potential: it follows the cumulative
/// 1/C_k sums at the anchors and solves the block Dirichlet problem in
/// between, which reproduces the hitting-probability form
/// phi(v) - phi(a) = P^v(T_b < T_a) / C of the block potential.
/// psi(v) = kappa (phi(v) - phi(origin)) and chi(v) = x(v) - psi(v).
class PotentialTable {
public:
    double kappa() const { return kappa_; }
    Vertex origin() const { return origin_; }
    const std::vector<int>& anchors() const { return anchors_; }
    int x_lo() const { return anchors_.front(); }
    int x_hi() const { return anchors_.back(); }

    bool has(Vertex v) const {
        return v.x >= x_lo() && v.x <= x_hi() && (v.y == 0 || v.y == 1) &&
               defined_[idx(v)] != 0;
    }
    /// Covered vertices whose whole open neighborhood is covered too.
    bool interior(Vertex v) const { return has(v) && v.x > x_lo() && v.x < x_hi(); }

    double phi(Vertex v) const;
    double psi(Vertex v) const { return kappa_ * (phi(v) - phi_origin_); }
    double chi(Vertex v) const { return static_cast<double>(v.x) - psi(v); }

    /// All covered vertices, left to right.
    std::vector<Vertex> covered_vertices() const;

private:
    friend PotentialTable build_potentials(const WindowConfig& w, double kappa, Vertex origin,
                                           int margin);
    std::size_t idx(Vertex v) const {
        return 2 * static_cast<std::size_t>(v.x - anchors_.front()) +
               static_cast<std::size_t>(v.y);
    }

    double kappa_ = 1.0;
    Vertex origin_{0, 0};
    double phi_origin_ = 0.0;
    std::vector<int> anchors_;
    std::vector<double> phi_;
    std::vector<uint8_t> defined_;
};

PotentialTable build_potentials(const WindowConfig& w, double kappa, Vertex origin = {0, 0},
                                int margin = 10);

/// Max harmonicity residual |E^v[psi(Y_1)] - psi(v)| over interior covered
/// vertices of the table.
double harmonicity_residual(const WindowConfig& w, const PotentialTable& t);

struct CocycleReport {
    double max_deviation = 0.0;
    std::size_t n_checked = 0;
};

/// Checks psi(omega, u+v) = psi(omega, u) + psi(theta^u omega, v) over all
/// test vertices v covered by both the original and the shifted table.
/// Exact (1e-9 scale) for y(u) = 0; informational for y(u) = 1.
CocycleReport cocycle_check(const WindowConfig& w, double kappa, Vertex u, int margin = 10);

struct GrowthReport {
    double exponent = 0.0;  // log-log slope of mean |chi(R_n)| against n
    double exponent_se = 0.0;
    double eta_mean = 0.0;  // held-out centering check for L - kappa / C
    double eta_se = 0.0;
    std::size_t n_max = 0;
    std::size_t n_replicates = 0;
};

/// Sublinearity diagnostic: chi at the n-th pre-regeneration point is the
/// partial sum of eta_k = L_k - kappa / C_k; the report regresses
/// log mean |chi(R_n)| on log n across replicate cycle sequences.
GrowthReport corrector_growth_diagnostic(const std::vector<std::vector<Cycle>>& replicates,
                                         double kappa);

}  // namespace ladder
