// Acceptance suite: one line per criterion, exit code = number of failures.
//
// Exact-tolerance suites (C1-C8) pin identities and closed forms against
// independent oracles; the statistical suites (C9-C13) run the full
// experiment pipeline at the shipped defaults and test the asymptotic
// identities by confidence-interval overlap.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ladder/corrector.hpp"
#include "ladder/electrical.hpp"
#include "ladder/experiments.hpp"
#include "ladder/percolation.hpp"
#include "ladder/regeneration.hpp"
#include "ladder/rng.hpp"
#include "ladder/stats.hpp"
#include "ladder/walk.hpp"

using namespace ladder;

namespace {

constexpr uint64_t kSeed = 20260809;
int g_failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

// --------------------------------------------------------------------------

void c1_kernel_validity() {
    RngStream rng(kSeed, 1);
    double worst = 0.0;
    for (double p : {0.3, 0.5, 0.7}) {
        for (int rep = 0; rep < 334; ++rep) {
            const WindowConfig w = sample_window_conditioned(p, 15, 15, rng);
            for (double lambda : {0.0, 0.1, 0.5, 1.0}) {
                for (int x = -14; x <= 14; ++x)
                    for (int y = 0; y < 2; ++y)
                        worst = std::max(
                            worst, std::fabs(transition_row(w, lambda, {x, y}).sum() - 1.0));
            }
        }
    }
    report("C1 kernel validity", worst <= 1e-12,
           "max |row sum - 1| = " + fmt(worst) + " over 1002 environments (tol 1e-12)");
}

void c2_derivative_oracles() {
    RngStream rng(kSeed, 2);
    const double h = 1e-4;
    double worst_fd = 0.0, worst_id = 0.0;
    int pairs = 0;
    while (pairs < 10000) {
        const WindowConfig w = sample_window_conditioned(0.6, 14, 14, rng);
        for (int x = -13; x <= 13 && pairs < 10000; ++x) {
            for (int y = 0; y < 2; ++y) {
                const Vertex v{x, y};
                const TransitionRow r0 = transition_row(w, 0.0, v);
                const TransitionRow rp = transition_row(w, h, v);
                const TransitionRow rm = transition_row(w, -h, v);
                double nu_sum = 0.0, dd_sum = 0.0;
                for (int i = 0; i < r0.n; ++i) {
                    const double fd1 = (std::log(rp.prob[i]) - std::log(rm.prob[i])) / (2.0 * h);
                    const double fd2 =
                        (rp.prob[i] - 2.0 * r0.prob[i] + rm.prob[i]) / (h * h) / r0.prob[i];
                    const double nv = nu(w, v, r0.target[i]);
                    const double dd = second_derivative_ratio(w, v, r0.target[i]);
                    worst_fd = std::max(worst_fd, std::fabs(nv - fd1));
                    worst_fd = std::max(worst_fd, std::fabs(dd - fd2));
                    nu_sum += nv * r0.prob[i];
                    dd_sum += dd * r0.prob[i];
                    ++pairs;
                }
                worst_id = std::max(worst_id, std::max(std::fabs(nu_sum), std::fabs(dd_sum)));
            }
        }
    }
    report("C2 derivative oracles", worst_fd < 1e-6 && worst_id <= 1e-10,
           "max FD gap " + fmt(worst_fd) + " (tol 1e-6), max identity residual " + fmt(worst_id) +
               " (tol 1e-10) over 10^4 pairs");
}

void c3_sampler_exactness() {
    const double p = 0.5;
    const EnumeratedDistribution d = enumerate_conditioned_distribution(p, 3, 3);
    const ConditionedSampler sampler(p, -3, 3);
    RngStream rng(kSeed, 3);
    const int n = 1000000;
    std::vector<double> counts(d.keys.size(), 0.0);
    std::vector<double> edge_freq(static_cast<std::size_t>(d.n_edges), 0.0);
    for (int i = 0; i < n; ++i) {
        const WindowConfig w = sampler.draw(rng);
        const uint32_t key = EnumeratedDistribution::encode(w);
        const auto it = d.index.find(key);
        if (it == d.index.end()) {
            report("C3 sampler exactness", false, "sampler produced a non-crossing configuration");
            return;
        }
        counts[static_cast<std::size_t>(it->second)] += 1.0;
        for (int b = 0; b < d.n_edges; ++b)
            if (key & (1u << b)) edge_freq[static_cast<std::size_t>(b)] += 1.0;
    }

    const Binning bins = bin_by_expected_count(d.probs, n, 100.0);
    std::vector<double> expected(static_cast<std::size_t>(bins.n_bins), 0.0);
    std::vector<double> observed(static_cast<std::size_t>(bins.n_bins), 0.0);
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
        expected[static_cast<std::size_t>(bins.bin_of_cell[i])] += d.probs[i] * n;
        observed[static_cast<std::size_t>(bins.bin_of_cell[i])] += counts[i];
    }
    const Chi2Result gof = chi2_gof(expected, observed);

    int marginal_fails = 0;
    double worst_pull = 0.0;
    for (int b = 0; b < d.n_edges; ++b) {
        const double exact = d.edge_marginals[static_cast<std::size_t>(b)];
        const double freq = edge_freq[static_cast<std::size_t>(b)] / n;
        const double se = std::sqrt(exact * (1.0 - exact) / n);
        worst_pull = std::max(worst_pull, std::fabs(freq - exact) / se);
        if (std::fabs(freq - exact) > 3.0 * se) ++marginal_fails;
    }
    report("C3 sampler exactness", gof.p_value > 1e-3 && marginal_fails == 0,
           "chi^2 p = " + fmt(gof.p_value) + " over " + std::to_string(bins.n_bins) +
               " bins (need > 1e-3), worst marginal pull " + fmt(worst_pull) + " SE");
}

double reff_eigen(const ResistorGraph& g, Vertex a, Vertex b) {
    const int ia = g.index_of(a);
    const int ib = g.index_of(b);
    const int n = static_cast<int>(g.verts.size());
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges) {
        lap(e.a, e.a) += e.c;
        lap(e.b, e.b) += e.c;
        lap(e.a, e.b) -= e.c;
        lap(e.b, e.a) -= e.c;
    }
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (i != ib) keep.push_back(i);
    Eigen::MatrixXd m(n - 1, n - 1);
    for (int r = 0; r < n - 1; ++r)
        for (int c = 0; c < n - 1; ++c) m(r, c) = lap(keep[r], keep[c]);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
    for (int r = 0; r < n - 1; ++r)
        if (keep[r] == ia) rhs(r) = 1.0;
    const Eigen::VectorXd x = m.fullPivLu().solve(rhs);
    for (int r = 0; r < n - 1; ++r)
        if (keep[r] == ia) return x(r);
    return -1.0;
}

void c4_network_suite() {
    RngStream rng(kSeed, 4);
    double worst = 0.0;
    bool rayleigh_ok = true;
    bool metric_ok = true;
    int blocks = 0;
    const double ps[3] = {0.4, 0.55, 0.7};
    while (blocks < 1000) {
        const double p = ps[blocks % 3];
        WindowConfig w = sample_window_conditioned(p, 5, 5, rng);
        const auto mask = crossing_cluster_mask(w);
        if (!mask[w.vindex({-5, 0})] || !mask[w.vindex({5, 0})]) continue;
        const ResistorGraph g = tilted_subgraph(w, -5, 5, 0.0, 0);
        const double mine = effective_resistance(g, {-5, 0}, {5, 0});
        worst = std::max(worst, std::fabs(mine - reff_eigen(g, {-5, 0}, {5, 0})));

        // Metric property through a random intermediate cluster vertex.
        for (int tries = 0; tries < 4; ++tries) {
            const int x = -4 + static_cast<int>(rng.below(9));
            const int y = static_cast<int>(rng.below(2));
            if (!mask[w.vindex({x, y})]) continue;
            const double r_av = effective_resistance(g, {-5, 0}, {x, y});
            const double r_vb = effective_resistance(g, {x, y}, {5, 0});
            if (mine > r_av + r_vb + 1e-9) metric_ok = false;
            break;
        }

        // Rayleigh monotonicity under closing one random open edge.
        std::vector<std::pair<char, int>> open_edges;
        for (int x = -5; x <= 5; ++x) {
            if (w.vertical(x)) open_edges.push_back({'v', x});
            if (x < 5 && w.h_bottom(x)) open_edges.push_back({'b', x});
            if (x < 5 && w.h_top(x)) open_edges.push_back({'t', x});
        }
        const auto pick = open_edges[static_cast<std::size_t>(rng.below(open_edges.size()))];
        if (pick.first == 'v')
            w.set_vertical(pick.second, false);
        else if (pick.first == 'b')
            w.set_h_bottom(pick.second, false);
        else
            w.set_h_top(pick.second, false);
        double after = std::numeric_limits<double>::infinity();
        try {
            after = effective_resistance(tilted_subgraph(w, -5, 5, 0.0, 0), {-5, 0}, {5, 0});
        } catch (const std::exception&) {
        }
        if (after < mine - 1e-9) rayleigh_ok = false;
        ++blocks;
    }
    report("C4 network suite", worst <= 1e-10 && rayleigh_ok && metric_ok,
           "max |R_eff - oracle| = " + fmt(worst) +
               " over 1000 blocks (tol 1e-10); rayleigh " + (rayleigh_ok ? "ok" : "VIOLATED") +
               ", metric " + (metric_ok ? "ok" : "VIOLATED"));
}

void c5_harmonicity(const KappaEstimate& kappa) {
    RngStream rng(kSeed, 5);
    double worst_res = 0.0, worst_phi = 0.0, worst_psi = 0.0;
    int envs = 0;
    while (envs < 100) {
        const WindowConfig w = sample_window_conditioned(0.7, 300, 300, rng);
        if (!crossing_cluster_mask(w)[w.vindex({0, 0})]) continue;
        PotentialTable t;
        try {
            t = build_potentials(w, kappa.kappa, {0, 0}, 10);
        } catch (const MarginViolation&) {
            continue;
        }
        worst_res = std::max(worst_res, harmonicity_residual(w, t));
        for (const Vertex& v : t.covered_vertices()) {
            for (const Vertex& u : {Vertex{v.x + 1, v.y}, Vertex{v.x, 1 - v.y}}) {
                if (!t.has(u) || !w.edge_open(v, u)) continue;
                worst_phi = std::max(worst_phi, std::fabs(t.phi(v) - t.phi(u)));
                worst_psi = std::max(worst_psi, std::fabs(t.psi(v) - t.psi(u)));
            }
        }
        ++envs;
    }
    report("C5 harmonicity and increments",
           worst_res <= 1e-9 && worst_phi <= 1.0 + 1e-9 && worst_psi <= kappa.kappa + 1e-9,
           "max residual " + fmt(worst_res) + " (tol 1e-9), max |dphi| = " + fmt(worst_phi) +
               " (<= 1), max |dpsi| = " + fmt(worst_psi) + " (<= kappa = " + fmt(kappa.kappa) +
               ") over 100 environments");
}

void c6_girsanov_enumeration() {
    RngStream rng(kSeed, 6);
    double worst = 0.0;
    int envs = 0;
    while (envs < 20) {
        const WindowConfig w = sample_window_conditioned(0.6, 12, 12, rng);
        if (!crossing_cluster_mask(w)[w.vindex({0, 0})]) continue;
        for (double lambda : {0.1, 0.3})
            worst = std::max(worst, girsanov_enumeration_gap(w, {0, 0}, 8, lambda));
        ++envs;
    }
    report("C6 girsanov enumeration", worst <= 1e-12,
           "max |weighted path sum - P_lambda| = " + fmt(worst) +
               " over 20 environments, n = 8 (tol 1e-12)");
}

void c7_hitting_brackets(const std::vector<Cycle>& pool) {
    RngStream rng(kSeed, 7);
    const Cycle unit = [] {
        Cycle c;
        c.length = 1;
        c.vert = {0};
        c.hb = {1};
        c.ht = {0};
        c.conductance = 1.0;
        return c;
    }();
    const auto fill_span = [&](int target) {
        std::vector<Cycle> out;
        int remaining = target;
        while (remaining > 0) {
            const Cycle& c = pool[static_cast<std::size_t>(rng.below(pool.size()))];
            if (c.length <= remaining) {
                out.push_back(c);
                remaining -= c.length;
            } else {
                out.push_back(unit);
                remaining -= 1;
            }
        }
        return out;
    };
    const auto spaced = [&](int left, int right) {
        std::vector<Cycle> cycles{unit, unit};
        const auto lc = fill_span(left);
        cycles.insert(cycles.end(), lc.begin(), lc.end());
        const std::size_t designated = cycles.size();
        const auto rc = fill_span(right);
        cycles.insert(cycles.end(), rc.begin(), rc.end());
        cycles.push_back(unit);
        cycles.push_back(unit);
        return assemble_cycles(cycles, designated, 0.7);
    };

    int violations = 0, checks = 0;
    for (double lambda : {0.05, 0.1}) {
        const int k = static_cast<int>(std::floor(1.0 / lambda));
        for (int L = 1; L <= 3; ++L) {
            for (int R = 1; R <= 3; ++R) {
                const HittingBounds b = hitting_probability_bounds(L, R, lambda);
                for (int rep = 0; rep < 6; ++rep) {
                    const CycleEnv env = spaced(L * k, R * k);
                    const double exact =
                        hitting_probability_exact(env.window, lambda, -L * k, 0, R * k);
                    if (exact < b.lower - 1e-12 || exact > b.upper + 1e-12) ++violations;
                    ++checks;
                }
            }
        }
    }

    // (L = 1, R = infinity): long-right-window surrogate, value <= 4/10.
    double worst_inf = 0.0;
    for (double lambda : {0.05, 0.1}) {
        const int k = static_cast<int>(std::floor(1.0 / lambda));
        for (int rep = 0; rep < 5; ++rep) {
            const CycleEnv env = spaced(k, 40 * k);
            const double exact = hitting_probability_exact(env.window, lambda, -k, 0, 40 * k);
            worst_inf = std::max(worst_inf, exact);
        }
    }
    report("C7 hitting brackets", violations == 0 && worst_inf <= 0.4,
           std::to_string(checks) + " bracket checks, " + std::to_string(violations) +
               " violations; max P(T_u < T_w) at L=1, far w: " + fmt(worst_inf) + " (<= 0.4)");
}

void c8_ruin_formula() {
    double worst = 0.0, worst_limit = 0.0;
    for (double lambda : {1e-4, 0.1, 0.5})
        for (int m = 2; m <= 20; ++m)
            for (int i = 1; i <= m; ++i)
                worst = std::max(worst, std::fabs(ruin_probability_r(i, m, lambda) -
                                                  ruin_probability_first_step_oracle(i, m, lambda)));
    for (int m = 3; m <= 20; ++m) {
        const double limit = (2.0 * m - 3.0) / (2.0 * m - 2.0);
        worst_limit = std::max(worst_limit,
                               std::fabs(ruin_probability_r(m - 1, m, 1e-4) - limit));
    }
    report("C8 ruin formula", worst < 1e-10 && worst_limit < 1e-3,
           "max |closed - oracle| = " + fmt(worst) + " (tol 1e-10); max |r_{m-1} - limit| = " +
               fmt(worst_limit) + " at lambda = 1e-4 (tol 1e-3)");
}

void c9_zero_speed(const EinsteinReport& rep) {
    const auto& xn = rep.sigma_paths.xn_at.back();
    const int64_t n = rep.sigma_paths.n_list.back();
    std::vector<double> xn_over_n;
    for (double x : xn) xn_over_n.push_back(x / static_cast<double>(n));
    const MeanSE v0 = mean_se(xn_over_n);
    const bool speed_ok = std::fabs(v0.mean) <= 3.0 * v0.se;

    bool var_stable = true;
    for (std::size_t i = 0; i < rep.sigma_paths.reports.size(); ++i)
        for (std::size_t j = i + 1; j < rep.sigma_paths.reports.size(); ++j)
            if (!rep.sigma_paths.reports[i].var_over_n.overlaps(
                    rep.sigma_paths.reports[j].var_over_n))
                var_stable = false;

    const bool ks_ok = rep.sigma_paths.ks.p_value > 1e-3;
    report("C9 zero speed and diffusive scaling", speed_ok && var_stable && ks_ok,
           "|v(0)| = " + fmt(std::fabs(v0.mean)) + " <= 3 SE = " + fmt(3.0 * v0.se) +
               "; Var/n stable across n = " + (var_stable ? "yes" : "NO") +
               "; KS p = " + fmt(rep.sigma_paths.ks.p_value) + " (> 1e-3)");
}

void c10_covariance_identity(const EinsteinReport& rep) {
    const EstimateCI& pathvar = rep.sigma_paths.reports.back().var_over_n;
    const EstimateCI& s11 = rep.sigma_psi.sigma.s11;
    const EstimateCI& s12 = rep.sigma_psi.sigma.s12;
    const bool ok = s11.overlaps(s12) && s11.overlaps(pathvar) && s12.overlaps(pathvar);
    report("C10 covariance identity", ok,
           "s11 = " + fmt(s11.value) + "+-" + fmt(s11.se) + ", s12 = " + fmt(s12.value) + "+-" +
               fmt(s12.se) + ", Var(X_n)/n = " + fmt(pathvar.value) + "+-" + fmt(pathvar.se) +
               "; pairwise 95% CIs " + (ok ? "overlap" : "DO NOT overlap"));
}

void c11_speed_concordance(const EinsteinReport& rep) {
    bool all_ok = true;
    std::string detail;
    for (const auto& pl : rep.per_lambda) {
        if (pl.lambda != 0.1 && pl.lambda != 0.2) continue;
        EstimateCI gir_speed = pl.girsanov;  // E_lambda[X_n]/(lambda n)
        gir_speed.value *= pl.lambda;
        gir_speed.se *= pl.lambda;
        const bool ok = pl.direct.overlaps(pl.regen) && pl.direct.overlaps(gir_speed) &&
                        pl.regen.overlaps(gir_speed);
        all_ok = all_ok && ok;
        detail += "lambda=" + fmt(pl.lambda) + ": direct " + fmt(pl.direct.value) + ", regen " +
                  fmt(pl.regen.value) + ", lambda*girsanov " + fmt(gir_speed.value) +
                  (ok ? " overlap; " : " NO OVERLAP; ");
    }
    report("C11 speed estimator concordance", all_ok, detail);
}

void c12_einstein(const EinsteinReport& rep) {
    const bool ok = rep.verdict.monotone_trend && rep.verdict.smallest_ci_overlap &&
                    rep.verdict.lambda2_a_concentrates;
    std::string ratios;
    for (const auto& pl : rep.per_lambda)
        ratios += fmt(pl.ratio_direct.value) + "@" + fmt(pl.lambda) + " ";
    report("C12 einstein relation", ok,
           "v/lambda = " + ratios + "-> sigma^2 = " +
               fmt(rep.sigma_paths.reports.back().var_over_n.value) + "; trend " +
               (rep.verdict.monotone_trend ? "ok" : "BROKEN") + ", smallest-lambda overlap " +
               (rep.verdict.smallest_ci_overlap ? "ok" : "MISSING") + ", lambda^2 A_n " +
               (rep.verdict.lambda2_a_concentrates ? "concentrates" : "OFF"));
}

void c13_regen_tails(const EinsteinReport& rep) {
    bool all_ok = true;
    std::string detail;
    for (const auto& pl : rep.per_lambda) {
        if (pl.lambda != 0.1 && pl.lambda != 0.2) continue;
        const bool slope_ok = pl.tail.slope < 0.0 && pl.tail.c > 0.0;
        const bool lag_ok = std::fabs(pl.tail.lag2_corr) <= 3.0 * pl.tail.corr_se;
        all_ok = all_ok && slope_ok && lag_ok;
        detail += "lambda=" + fmt(pl.lambda) + ": slope " + fmt(pl.tail.slope) + " (c = " +
                  fmt(pl.tail.c) + "), lag2 " + fmt(pl.tail.lag2_corr) + " vs 3SE " +
                  fmt(3.0 * pl.tail.corr_se) + "; ";
    }
    report("C13 regeneration tails", all_ok, detail);
}

}  // namespace

int main() {
    const double t0 = now_seconds();

    c1_kernel_validity();
    c2_derivative_oracles();
    c3_sampler_exactness();
    c4_network_suite();

    // A moderate cycle pool feeds C5 and C7.
    const auto pool = harvest_cycle_pool(0.7, 20000, 10, kSeed + 1, 1);
    const KappaEstimate kappa_small = estimate_kappa(pool);
    c5_harmonicity(kappa_small);
    c6_girsanov_enumeration();
    c7_hitting_brackets(pool);
    c8_ruin_formula();

    // Statistical criteria share one full pipeline run at the defaults.
    ExperimentConfig cfg;
    cfg.seed = kSeed;
    cfg.threads = 0;
    const EinsteinReport rep = run_einstein(cfg);
    c9_zero_speed(rep);
    c10_covariance_identity(rep);
    c11_speed_concordance(rep);
    c12_einstein(rep);
    c13_regen_tails(rep);

    std::printf("%d criteria failed; total runtime %.1f s\n", g_failures,
                now_seconds() - t0);
    return g_failures;
}
