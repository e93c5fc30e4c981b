#include "ladder/corrector.hpp"

#include <algorithm>
#include <cmath>

#include "ladder/electrical.hpp"
#include "ladder/stats.hpp"
#include "ladder/walk.hpp"

namespace ladder {

KappaEstimate estimate_kappa(const std::vector<Cycle>& cycles) {
    if (cycles.empty()) throw ParameterError("estimate_kappa: empty cycle sample");
    KappaEstimate est;
    est.n = cycles.size();
    const double n = static_cast<double>(cycles.size());
    double ml = 0.0, mr = 0.0;  // means of L and 1/C
    for (const Cycle& c : cycles) {
        ml += static_cast<double>(c.length);
        mr += 1.0 / c.conductance;
    }
    ml /= n;
    mr /= n;
    est.kappa = ml / mr;
    if (cycles.size() < 2) return est;
    double sll = 0.0, srr = 0.0, slr = 0.0;
    for (const Cycle& c : cycles) {
        const double dl = static_cast<double>(c.length) - ml;
        const double dr = 1.0 / c.conductance - mr;
        sll += dl * dl;
        srr += dr * dr;
        slr += dl * dr;
    }
    sll /= n - 1.0;
    srr /= n - 1.0;
    slr /= n - 1.0;
    const double var =
        (sll - 2.0 * est.kappa * slr + est.kappa * est.kappa * srr) / (n * mr * mr);
    est.se = std::sqrt(std::max(0.0, var));
    return est;
}

double PotentialTable::phi(Vertex v) const {
    if (!has(v)) throw ParameterError("PotentialTable: vertex not covered");
    return phi_[idx(v)];
}

std::vector<Vertex> PotentialTable::covered_vertices() const {
    std::vector<Vertex> out;
    for (int x = x_lo(); x <= x_hi(); ++x)
        for (int y = 0; y < 2; ++y)
            if (has({x, y})) out.push_back({x, y});
    return out;
}

PotentialTable build_potentials(const WindowConfig& w, double kappa, Vertex origin, int margin) {
    if (kappa <= 0.0) throw ParameterError("build_potentials: kappa must be positive");
    const std::vector<int> pts = find_preregeneration_points(w);
    std::vector<int> anchors;
    for (int x : pts)
        if (x - w.x_min() >= margin && w.x_max() - x >= margin) anchors.push_back(x);
    if (anchors.size() < 2)
        throw MarginViolation("build_potentials: fewer than two margin-interior anchors");
    if (origin.x < anchors.front() || origin.x > anchors.back())
        throw MarginViolation("build_potentials: origin not flanked by anchors");

    PotentialTable t;
    t.kappa_ = kappa;
    t.origin_ = origin;
    t.anchors_ = anchors;
    const std::size_t span = 2 * static_cast<std::size_t>(anchors.back() - anchors.front() + 1);
    t.phi_.assign(span, 0.0);
    t.defined_.assign(span, 0);

    double cum = 0.0;  // phi value at the current left anchor
    for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
        const int a = anchors[k];
        const int b = anchors[k + 1];
        const ResistorGraph g = tilted_subgraph(w, a, b, 0.0, a);
        const BlockVoltages bv = harmonic_voltages(g, {a, 0}, {b, 0});
        double r_block = 0.0;
        for (std::size_t i = 0; i < bv.verts.size(); ++i) {
            t.phi_[t.idx(bv.verts[i])] = cum + bv.phi[i];
            t.defined_[t.idx(bv.verts[i])] = 1;
            if (bv.verts[i] == Vertex{b, 0}) r_block = bv.phi[i];
        }
        cum += r_block;
    }

    if (!t.defined_[t.idx(origin)])
        throw ParameterError("build_potentials: origin not on the cluster");
    t.phi_origin_ = t.phi_[t.idx(origin)];
    return t;
}

double harmonicity_residual(const WindowConfig& w, const PotentialTable& t) {
    double worst = 0.0;
    for (const Vertex& v : t.covered_vertices()) {
        if (!t.interior(v)) continue;
        const TransitionRow row = transition_row(w, 0.0, v);
        double ev = 0.0;
        for (int i = 0; i < row.n; ++i) ev += row.prob[i] * t.psi(row.target[i]);
        worst = std::max(worst, std::fabs(ev - t.psi(v)));
    }
    return worst;
}

CocycleReport cocycle_check(const WindowConfig& w, double kappa, Vertex u, int margin) {
    const PotentialTable base = build_potentials(w, kappa, {0, 0}, margin);
    if (!base.has(u)) throw ParameterError("cocycle_check: u not covered by the base table");

    const WindowConfig shifted = shift_window(w, u);
    const PotentialTable moved = build_potentials(shifted, kappa, {0, 0}, margin);

    CocycleReport rep;
    const double psi_u = base.psi(u);
    for (const Vertex& v : moved.covered_vertices()) {
        const Vertex uv{u.x + v.x, (u.y + v.y) % 2};
        if (!base.has(uv)) continue;
        const double dev = std::fabs(base.psi(uv) - psi_u - moved.psi(v));
        rep.max_deviation = std::max(rep.max_deviation, dev);
        ++rep.n_checked;
    }
    if (rep.n_checked == 0)
        throw MarginViolation("cocycle_check: no overlap between base and shifted tables");
    return rep;
}

GrowthReport corrector_growth_diagnostic(const std::vector<std::vector<Cycle>>& replicates,
                                         double kappa) {
    if (replicates.empty()) throw ParameterError("corrector_growth_diagnostic: no replicates");
    std::size_t n_max = replicates.front().size();
    for (const auto& r : replicates) n_max = std::min(n_max, r.size());
    if (n_max < 8) throw ParameterError("corrector_growth_diagnostic: replicates too short");

    GrowthReport rep;
    rep.n_max = n_max;
    rep.n_replicates = replicates.size();

    // mean |chi(R_n)| over replicates at each n
    std::vector<double> mean_abs(n_max, 0.0);
    std::vector<double> etas;
    for (const auto& cycles : replicates) {
        double chi = 0.0;
        for (std::size_t k = 0; k < n_max; ++k) {
            const double eta =
                static_cast<double>(cycles[k].length) - kappa / cycles[k].conductance;
            etas.push_back(eta);
            chi += eta;
            mean_abs[k] += std::fabs(chi);
        }
    }
    for (double& v : mean_abs) v /= static_cast<double>(replicates.size());

    // Log-log regression over a log-spaced n grid, skipping the first few
    // points where |chi| is dominated by a single cycle.
    std::vector<double> xs, ys;
    for (std::size_t k = 3; k < n_max; k = std::max(k + 1, k + k / 8)) {
        if (mean_abs[k] <= 0.0) continue;
        xs.push_back(std::log(static_cast<double>(k + 1)));
        ys.push_back(std::log(mean_abs[k]));
    }
    if (xs.size() >= 3) {
        const LinearFit fit = linear_fit(xs, ys);
        rep.exponent = fit.slope;
        rep.exponent_se = fit.slope_se;
    }  // else chi vanishes identically and the exponent stays 0

    const MeanSE eta_stats = mean_se(etas);
    rep.eta_mean = eta_stats.mean;
    rep.eta_se = eta_stats.se;
    return rep;
}

}  // namespace ladder
