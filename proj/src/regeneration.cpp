#include "ladder/regeneration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ladder/stats.hpp"

namespace ladder {

std::vector<int> lambda_prereg_points(const std::vector<int>& prereg_xs, double lambda) {
    if (lambda <= 0.0) throw ParameterError("lambda_prereg_points: lambda must be positive");
    const int k = static_cast<int>(std::floor(1.0 / lambda));
    std::vector<int> out;
    if (prereg_xs.empty()) return out;
    // Index 0 sits at the first pre-regeneration point with x >= 0.
    std::size_t idx0 = prereg_xs.size();
    for (std::size_t i = 0; i < prereg_xs.size(); ++i) {
        if (prereg_xs[i] >= 0) {
            idx0 = i;
            break;
        }
    }
    if (idx0 == prereg_xs.size()) return out;
    for (std::size_t i = idx0 % static_cast<std::size_t>(k); i < prereg_xs.size();
         i += static_cast<std::size_t>(k))
        out.push_back(prereg_xs[i]);
    return out;
}

std::vector<std::pair<int64_t, int>> RegenRecord::gaps() const {
    std::vector<std::pair<int64_t, int>> out;
    const std::size_t n = usable();
    for (std::size_t i = 0; i + 1 < n; ++i)
        out.emplace_back(taus[i + 1] - taus[i], rhos[i + 1] - rhos[i]);
    return out;
}

RegenRecord detect_regenerations(const Trajectory& traj, const WindowConfig& w, double lambda,
                                 const std::vector<int>& lambda_points) {
    RegenRecord rec;
    rec.lambda = lambda;
    const std::size_t len = traj.pos.size();
    if (len < 2) return rec;

    std::vector<uint8_t> is_point(static_cast<std::size_t>(w.n_columns()), 0);
    for (int x : lambda_points) {
        if (x >= w.x_min() && x <= w.x_max())
            is_point[static_cast<std::size_t>(x - w.x_min())] = 1;
    }
    const auto at_point = [&](Vertex v) {
        return v.y == 0 && is_point[static_cast<std::size_t>(v.x - w.x_min())] != 0;
    };

    // Suffix minimum of X over visits to lambda-pre-regeneration vertices.
    std::vector<int> suffix_min(len + 1, std::numeric_limits<int>::max());
    for (std::size_t k = len; k-- > 0;) {
        suffix_min[k] = suffix_min[k + 1];
        if (at_point(traj.pos[k])) suffix_min[k] = std::min(suffix_min[k], traj.pos[k].x);
    }

    std::vector<int64_t> first_visit(w.n_vertices(), -1);
    for (std::size_t k = 0; k < len; ++k) {
        const std::size_t vi = w.vindex(traj.pos[k]);
        if (first_visit[vi] < 0) first_visit[vi] = static_cast<int64_t>(k);
    }

    for (std::size_t k = 1; k < len; ++k) {
        const Vertex v = traj.pos[k];
        if (!at_point(v)) continue;
        if (first_visit[w.vindex(v)] != static_cast<int64_t>(k)) continue;
        if (suffix_min[k] < v.x) continue;
        rec.taus.push_back(static_cast<int64_t>(k));
        rec.rhos.push_back(v.x);
    }
    rec.censored_last = !rec.taus.empty();
    return rec;
}

EstimateCI speed_regen(const std::vector<RegenRecord>& records, std::size_t batch) {
    std::size_t total = 0;
    for (const auto& r : records) {
        const auto g = r.gaps();
        total += g.size() > 1 ? g.size() - 1 : 0;
    }
    if (total < 30) throw ParameterError("speed_regen: fewer than 30 usable gaps");
    if (batch == 0) batch = std::max<std::size_t>(2, total / 30);

    BatchRatio ratio(batch);
    for (const auto& r : records) {
        const auto g = r.gaps();
        if (g.size() < 2) continue;
        std::vector<double> num, den;
        // Gap 1 carries the boundary law of (tau_1, rho_1); start at gap 2.
        for (std::size_t i = 1; i < g.size(); ++i) {
            num.push_back(static_cast<double>(g[i].second));
            den.push_back(static_cast<double>(g[i].first));
        }
        ratio.add_segment(num, den);
    }
    const BatchRatio::Result res = ratio.estimate();
    EstimateCI e;
    e.value = res.ratio;
    e.se = res.se;
    e.n_eff = static_cast<double>(res.n_batches);
    e.method = "regen";
    return e;
}

TailReport regen_tail_diagnostic(const std::vector<RegenRecord>& records) {
    TailReport rep;
    std::vector<double> pooled;
    double lambda = 0.0;
    for (const auto& r : records) {
        lambda = r.lambda;
        for (const auto& g : r.gaps()) pooled.push_back(static_cast<double>(g.second));
    }
    rep.n_gaps = pooled.size();
    if (pooled.size() < 50) throw ParameterError("regen_tail_diagnostic: too few gaps");

    std::sort(pooled.begin(), pooled.end());
    rep.min_gap = static_cast<int>(pooled.front());
    const double n = static_cast<double>(pooled.size());

    // Empirical survival on integer gap values, fitted where it is neither
    // saturated nor down to a handful of samples.
    std::vector<double> xs, ys;
    const int lo = static_cast<int>(pooled.front());
    const int hi = static_cast<int>(pooled.back());
    std::size_t idx = 0;
    for (int g = lo; g <= hi; ++g) {
        while (idx < pooled.size() && pooled[idx] < g) ++idx;
        const double surv = (n - static_cast<double>(idx)) / n;
        if (surv < 0.01) break;
        if (surv > 0.8) continue;
        xs.push_back(static_cast<double>(g));
        ys.push_back(std::log(surv));
    }
    if (xs.size() >= 3) {
        const LinearFit fit = linear_fit(xs, ys);
        rep.slope = fit.slope;
        rep.slope_se = fit.slope_se;
        rep.c = lambda > 0.0 ? -fit.slope / lambda : 0.0;
    }

    // Lag correlations of the gap pairs, computed within records only.
    double mean = 0.0;
    std::size_t cnt = 0;
    for (const auto& r : records)
        for (const auto& g : r.gaps()) {
            mean += static_cast<double>(g.second);
            ++cnt;
        }
    if (cnt > 0) mean /= static_cast<double>(cnt);
    double var = 0.0;
    double lag1 = 0.0, lag2 = 0.0;
    std::size_t n1 = 0, n2 = 0;
    for (const auto& r : records) {
        const auto g = r.gaps();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double d0 = static_cast<double>(g[i].second) - mean;
            var += d0 * d0;
            if (i + 1 < g.size()) {
                lag1 += d0 * (static_cast<double>(g[i + 1].second) - mean);
                ++n1;
            }
            if (i + 2 < g.size()) {
                lag2 += d0 * (static_cast<double>(g[i + 2].second) - mean);
                ++n2;
            }
        }
    }
    if (cnt > 1 && var > 0.0) {
        var /= static_cast<double>(cnt);
        if (n1 > 0) rep.lag1_corr = lag1 / static_cast<double>(n1) / var;
        if (n2 > 0) rep.lag2_corr = lag2 / static_cast<double>(n2) / var;
        rep.corr_se = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(1, n2)));
    }
    return rep;
}

}  // namespace ladder
