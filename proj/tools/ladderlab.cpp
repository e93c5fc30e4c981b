// Reproducible experiment runner for the ladder-percolation walk laboratory.
//
// Subcommands: sample-env, kappa, hitting-check, speed, sigma, einstein,
// selftest. Every artifact embeds the configuration, the seed, the rng name
// and the version string. Outputs are a pure function of (config, seed);
// LADDER_THREADS overrides the worker count without changing results.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ladder/corrector.hpp"
#include "ladder/electrical.hpp"
#include "ladder/experiments.hpp"
#include "ladder/percolation.hpp"
#include "ladder/regeneration.hpp"
#include "ladder/stats.hpp"
#include "ladder/walk.hpp"

using namespace ladder;
using nlohmann::json;

namespace {

struct CliOverrides {
    std::optional<std::string> config_path;
    std::optional<uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<double> p;
    std::optional<double> alpha;
    std::optional<int> replicas;
};

ExperimentConfig resolve_config(const CliOverrides& o) {
    ExperimentConfig cfg;
    if (o.config_path) cfg = parse_config_file(*o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.threads) cfg.threads = *o.threads;
    if (o.p) cfg.p = *o.p;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.replicas) cfg.replicas = *o.replicas;
    cfg.validate();
    return cfg;
}

void ensure_out_dir(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
}

json base_json(const ExperimentConfig& cfg, const std::string& subcommand) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["rng"] = kRngName;
    j["subcommand"] = subcommand;
    j["seed"] = cfg.seed;
    json c;
    std::istringstream text(cfg.to_text());
    std::string line;
    while (std::getline(text, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        const auto strip = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
        };
        strip(key);
        strip(val);
        c[key] = val;
    }
    j["config"] = c;
    return j;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

json ci_json(const EstimateCI& e) {
    return {{"value", e.value},
            {"se", e.se},
            {"n_eff", e.n_eff},
            {"method", e.method},
            {"degenerate", e.degenerate}};
}

// ---------------------------------------------------------------------------

int cmd_sample_env(const ExperimentConfig& cfg, int count, bool dump_potentials) {
    ensure_out_dir(cfg);
    json report = base_json(cfg, "sample-env");
    report["windows"] = json::array();
    for (int i = 0; i < count; ++i) {
        RngStream rng(cfg.seed, make_stream(kStreamEnv, 0, static_cast<uint32_t>(i)));
        const WindowConfig w = draw_pp_window(cfg.p, cfg.n1, cfg.n2, rng);
        const ClusterDecomposition d = decompose(w, cfg.margin);

        std::ostringstream path;
        path << cfg.out_dir << "/window_" << i << ".txt";
        std::ostringstream content;
        content << provenance_header(cfg, "sample-env");
        w.write(content);
        write_text(path.str(), content.str());

        if (dump_potentials) {
            try {
                const PotentialTable t = build_potentials(w, 1.0, {0, 0}, cfg.margin);
                std::ostringstream csv;
                csv.precision(17);
                csv << provenance_header(cfg, "sample-env");
                csv << "vertex_x,vertex_y,phi,psi,chi\n";
                for (const Vertex& v : t.covered_vertices())
                    csv << v.x << ',' << v.y << ',' << t.phi(v) << ',' << t.psi(v) << ','
                        << t.chi(v) << '\n';
                std::ostringstream ppath;
                ppath << cfg.out_dir << "/potentials_" << i << ".csv";
                write_text(ppath.str(), csv.str());
            } catch (const MarginViolation&) {
                std::cout << "window " << i << ": potentials skipped (margin violation)\n";
            }
        }

        json stats;
        stats["file"] = path.str();
        stats["prereg_points"] = d.prereg_xs.size();
        stats["cycles"] = d.cycles.size();
        stats["traps"] = d.traps.size();
        stats["trap_lengths"] = d.trap_lengths;
        double mean_l = 0.0, mean_inv_c = 0.0;
        for (const Cycle& c : d.cycles) {
            mean_l += c.length;
            mean_inv_c += 1.0 / c.conductance;
        }
        if (!d.cycles.empty()) {
            mean_l /= static_cast<double>(d.cycles.size());
            mean_inv_c /= static_cast<double>(d.cycles.size());
        }
        stats["mean_cycle_length"] = mean_l;
        stats["mean_cycle_resistance"] = mean_inv_c;
        int t00 = 0;
        for (std::size_t k = 1; k + 1 < d.t_states.size(); ++k)
            t00 += d.t_states[k] == "00" ? 1 : 0;
        stats["interior_t00_columns"] = t00;
        report["windows"].push_back(stats);
        std::cout << "window " << i << ": " << d.prereg_xs.size() << " pre-regeneration points, "
                  << d.cycles.size() << " cycles, " << d.traps.size() << " traps\n";
    }
    write_text(cfg.out_dir + "/sample_env.json", report.dump(2));
    std::cout << "wrote " << cfg.out_dir << "/sample_env.json\n";
    return 0;
}

int cmd_kappa(const ExperimentConfig& cfg) {
    ensure_out_dir(cfg);
    const int threads = resolve_threads(cfg);
    const auto pool = harvest_cycle_pool(cfg.p, cfg.kappa_pool, cfg.margin, cfg.seed + 1, threads);
    const KappaEstimate k = estimate_kappa(pool);

    double mean_l = 0.0, mean_inv_c = 0.0;
    for (const Cycle& c : pool) {
        mean_l += c.length;
        mean_inv_c += 1.0 / c.conductance;
    }
    mean_l /= static_cast<double>(pool.size());
    mean_inv_c /= static_cast<double>(pool.size());

    json report = base_json(cfg, "kappa");
    report["kappa"] = {{"value", k.kappa}, {"se", k.se}, {"n_cycles", k.n}};
    report["mean_cycle_length"] = mean_l;
    report["mean_cycle_resistance"] = mean_inv_c;
    write_text(cfg.out_dir + "/kappa.json", report.dump(2));
    std::cout << "kappa = " << k.kappa << " +- " << k.se << "  (E[L] = " << mean_l
              << ", E[1/C] = " << mean_inv_c << ", n = " << k.n << ")\n";
    return 0;
}

Cycle unit_cycle_for_fill() {
    Cycle c;
    c.length = 1;
    c.vert = {0};
    c.hb = {1};
    c.ht = {0};
    c.conductance = 1.0;
    return c;
}

int cmd_hitting_check(const ExperimentConfig& cfg, int envs_per_cell) {
    ensure_out_dir(cfg);
    const auto pool = harvest_cycle_pool(cfg.p, 5000, cfg.margin, cfg.seed + 1, 1);
    RngStream rng(cfg.seed, make_stream(kStreamMisc, 0, 0));

    const Cycle unit = unit_cycle_for_fill();
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

    std::ostringstream csv;
    csv.precision(17);
    csv << provenance_header(cfg, "hitting-check");
    csv << "lambda,L,R,exact,lower,upper,inside\n";
    int violations = 0;
    int checks = 0;
    for (double lambda : {0.05, 0.1}) {
        if (!in_bracket_regime(lambda, cfg.lambda0)) continue;
        const int k = static_cast<int>(std::floor(1.0 / lambda));
        for (int L = 1; L <= 3; ++L) {
            for (int R = 1; R <= 3; ++R) {
                const HittingBounds b = hitting_probability_bounds(L, R, lambda);
                for (int rep = 0; rep < envs_per_cell; ++rep) {
                    std::vector<Cycle> cycles{unit, unit};
                    const auto lc = fill_span(L * k);
                    cycles.insert(cycles.end(), lc.begin(), lc.end());
                    const std::size_t designated = cycles.size();
                    const auto rc = fill_span(R * k);
                    cycles.insert(cycles.end(), rc.begin(), rc.end());
                    cycles.push_back(unit);
                    cycles.push_back(unit);
                    const CycleEnv env = assemble_cycles(cycles, designated, cfg.p);
                    const double exact =
                        hitting_probability_exact(env.window, lambda, -L * k, 0, R * k);
                    const bool inside = exact >= b.lower - 1e-12 && exact <= b.upper + 1e-12;
                    violations += inside ? 0 : 1;
                    ++checks;
                    csv << lambda << ',' << L << ',' << R << ',' << exact << ',' << b.lower
                        << ',' << b.upper << ',' << (inside ? 1 : 0) << '\n';
                }
            }
        }
    }
    write_text(cfg.out_dir + "/hitting_check.csv", csv.str());
    std::cout << checks << " bracket checks, " << violations << " violations; wrote "
              << cfg.out_dir << "/hitting_check.csv\n";
    return violations == 0 ? 0 : 1;
}

int cmd_speed(const ExperimentConfig& cfg, double lambda, bool dump_trajectory) {
    if (lambda <= 0.0) {
        std::cerr << "speed: --lambda must be positive\n";
        return 2;
    }
    ensure_out_dir(cfg);
    const int threads = resolve_threads(cfg);
    const int64_t n = cfg.n_steps > 0
                          ? cfg.n_steps
                          : static_cast<int64_t>(std::ceil(cfg.run_scale / (lambda * lambda)));
    const BiasedRunResult run =
        run_biased_walks(cfg.p, lambda, cfg.replicas, n, cfg.seed + 10, threads);
    const EstimateCI direct = speed_direct(run.xn_over_n);
    const EstimateCI regen = speed_regen(run.records);
    const TailReport tail = regen_tail_diagnostic(run.records);

    // Gap pairs for external analysis.
    {
        std::ostringstream csv;
        csv << provenance_header(cfg, "speed");
        csv << "tau_gap,rho_gap\n";
        for (const RegenRecord& rec : run.records)
            for (const auto& g : rec.gaps()) csv << g.first << ',' << g.second << '\n';
        write_text(cfg.out_dir + "/gaps.csv", csv.str());
    }

    if (dump_trajectory) {
        // Replay the first replica's environment and walk, dumping the
        // per-step accumulators.
        RngStream env_rng(cfg.seed + 10, make_stream(kStreamEnv, 0, 0));
        RngStream walk_rng(cfg.seed + 10, make_stream(kStreamWalk, 0, 0));
        // Window plan mirrors run_biased_walks' first attempt; on boundary
        // exit the dump is skipped rather than resized.
        try {
            const WindowConfig w = draw_pp_window(
                cfg.p, 60 + static_cast<int>(std::ceil(6.0 * std::sqrt(double(n) + 1.0))),
                60 + static_cast<int>(std::ceil(
                         (std::exp(lambda) - std::exp(-lambda)) / partition_z(lambda) * double(n) +
                         6.0 * std::sqrt(double(n) + 1.0))),
                env_rng);
            const Trajectory t = simulate(w, lambda, {0, 0}, n, walk_rng);
            std::ostringstream csv;
            csv.precision(17);
            csv << provenance_header(cfg, "speed");
            csv << "step,x,y,M,A,log_weight\n";
            double m = 0.0, a = 0.0, lw = 0.0;
            csv << 0 << ',' << t.pos[0].x << ',' << t.pos[0].y << ",0,0,0\n";
            const double log_z_ratio = std::log(partition_z(lambda) / 3.0);
            for (std::size_t k = 1; k < t.pos.size(); ++k) {
                const Vertex from = t.pos[k - 1];
                const Vertex to = t.pos[k];
                const double nv = nu(w, from, to);
                m += nv;
                a += 0.5 * (nv * nv - second_derivative_ratio(w, from, to));
                if (to != from) {
                    lw += lambda * (to.x - from.x) - log_z_ratio;
                } else {
                    const TransitionRow r0 = transition_row(w, 0.0, from);
                    const TransitionRow rl = transition_row(w, lambda, from);
                    lw += std::log(rl.prob[rl.n - 1] / r0.prob[r0.n - 1]);
                }
                csv << k << ',' << to.x << ',' << to.y << ',' << m << ',' << a << ',' << lw
                    << '\n';
            }
            write_text(cfg.out_dir + "/trajectory.csv", csv.str());
            std::cout << "wrote " << cfg.out_dir << "/trajectory.csv\n";
        } catch (const BoundaryExit&) {
            std::cout << "trajectory dump skipped: walk left the first-attempt window\n";
        }
    }

    json report = base_json(cfg, "speed");
    report["lambda"] = lambda;
    report["n_steps"] = n;
    report["speed_direct"] = ci_json(direct);
    report["speed_regen"] = ci_json(regen);
    report["tail"] = {{"slope", tail.slope},       {"c", tail.c},
                      {"lag1_corr", tail.lag1_corr}, {"lag2_corr", tail.lag2_corr},
                      {"corr_se", tail.corr_se},   {"n_gaps", tail.n_gaps}};
    write_text(cfg.out_dir + "/speed.json", report.dump(2));

    std::ostringstream csv;
    csv.precision(17);
    csv << provenance_header(cfg, "speed");
    csv << "lambda,estimator,value,se\n";
    csv << lambda << ",speed_direct," << direct.value << ',' << direct.se << '\n';
    csv << lambda << ",speed_regen," << regen.value << ',' << regen.se << '\n';
    write_text(cfg.out_dir + "/speed.csv", csv.str());

    std::cout << "lambda = " << lambda << ", n = " << n << "\n"
              << "  direct: " << direct.value << " +- " << direct.se << "\n"
              << "  regen : " << regen.value << " +- " << regen.se << "\n";
    return 0;
}

int cmd_sigma(const ExperimentConfig& cfg) {
    ensure_out_dir(cfg);
    const int threads = resolve_threads(cfg);
    const auto pool = harvest_cycle_pool(cfg.p, cfg.kappa_pool, cfg.margin, cfg.seed + 1, threads);
    const KappaEstimate kappa = estimate_kappa(pool);
    const SigmaPathsResult paths = run_sigma_paths(
        cfg.p,
        {std::max<int64_t>(100, cfg.sigma_n / 100), std::max<int64_t>(200, cfg.sigma_n / 10),
         cfg.sigma_n},
        cfg.sigma_replicas, cfg.seed + 2, threads);
    const SigmaPsiResult psi = run_sigma_psi(cfg.p, cfg.sigma_envs, cfg.n1, cfg.n2, cfg.margin,
                                             kappa, cfg.seed + 3, threads);

    json report = base_json(cfg, "sigma");
    report["kappa"] = {{"value", kappa.kappa}, {"se", kappa.se}, {"n_cycles", kappa.n}};
    report["path_variance"] = ci_json(paths.reports.back().var_over_n);
    report["ks_p_value"] = paths.ks.p_value;
    report["s11"] = ci_json(psi.sigma.s11);
    report["s12"] = ci_json(psi.sigma.s12);
    report["s22"] = ci_json(psi.sigma.s22);
    report["psi_envs_used"] = psi.n_envs_used;
    report["psi_envs_skipped"] = psi.n_skipped;
    write_text(cfg.out_dir + "/sigma.json", report.dump(2));

    std::cout << "kappa = " << kappa.kappa << " +- " << kappa.se << "\n"
              << "sigma^2 (path variance) = " << paths.reports.back().var_over_n.value << " +- "
              << paths.reports.back().var_over_n.se << "\n"
              << "s11 = " << psi.sigma.s11.value << " +- " << psi.sigma.s11.se << "\n"
              << "s12 = " << psi.sigma.s12.value << " +- " << psi.sigma.s12.se << "\n"
              << "s22 = " << psi.sigma.s22.value << " +- " << psi.sigma.s22.se << "\n";
    return 0;
}

int cmd_einstein(const ExperimentConfig& cfg) {
    ensure_out_dir(cfg);
    const EinsteinReport rep = run_einstein(cfg);
    write_text(cfg.out_dir + "/einstein.json", einstein_report_json(rep));
    write_text(cfg.out_dir + "/einstein.csv", einstein_report_csv(rep));
    std::cout << "sigma^2 (path) = " << rep.sigma_paths.reports.back().var_over_n.value << " +- "
              << rep.sigma_paths.reports.back().var_over_n.se << "\n";
    for (const auto& pl : rep.per_lambda) {
        std::cout << "lambda = " << pl.lambda << ": v/lambda = " << pl.ratio_direct.value
                  << " +- " << pl.ratio_direct.se << "\n";
    }
    std::cout << "verdict: monotone_trend=" << rep.verdict.monotone_trend
              << " smallest_ci_overlap=" << rep.verdict.smallest_ci_overlap
              << " lambda2_a_concentrates=" << rep.verdict.lambda2_a_concentrates << "\n"
              << "wrote " << cfg.out_dir << "/einstein.json and einstein.csv\n";
    return 0;
}

#define SELFTEST_CHECK(cond, what)                            \
    do {                                                      \
        if (!(cond)) {                                        \
            std::cerr << "selftest FAILED: " << what << "\n"; \
            return 1;                                         \
        }                                                     \
    } while (0)

int cmd_selftest(const ExperimentConfig& cfg) {
    // Exact-tolerance oracle suites only; the statistical suites live in the
    // acceptance runner.
    RngStream rng(cfg.seed, make_stream(kStreamMisc, 0, 1));

    for (double p : {0.3, 0.5, 0.7}) {
        for (int rep = 0; rep < 20; ++rep) {
            const WindowConfig w = sample_window_conditioned(p, 12, 12, rng);
            for (double lambda : {0.0, 0.1, 0.5, 1.0}) {
                for (int x = -11; x <= 11; ++x) {
                    for (int y = 0; y < 2; ++y) {
                        const double s = transition_row(w, lambda, {x, y}).sum();
                        SELFTEST_CHECK(std::fabs(s - 1.0) <= 1e-12,
                                       "kernel row sum at p=" << p << " lambda=" << lambda
                                                              << " x=" << x << " y=" << y);
                    }
                }
            }
        }
    }
    std::cout << "[ok] kernel rows\n";

    const double h = 1e-4;
    for (int rep = 0; rep < 40; ++rep) {
        const WindowConfig w = sample_window_conditioned(0.6, 12, 12, rng);
        for (int x = -11; x <= 11; ++x) {
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
                    const double nu_v = nu(w, v, r0.target[i]);
                    const double dd = second_derivative_ratio(w, v, r0.target[i]);
                    SELFTEST_CHECK(std::fabs(nu_v - fd1) < 1e-6, "nu finite difference");
                    SELFTEST_CHECK(std::fabs(dd - fd2) < 1e-6, "p''/p finite difference");
                    nu_sum += nu_v * r0.prob[i];
                    dd_sum += dd * r0.prob[i];
                }
                SELFTEST_CHECK(std::fabs(nu_sum) <= 1e-10, "sum nu p = 0");
                SELFTEST_CHECK(std::fabs(dd_sum) <= 1e-10, "sum p'' = 0");
            }
        }
    }
    std::cout << "[ok] derivative oracles\n";

    int done = 0;
    while (done < 5) {
        const WindowConfig w = sample_window_conditioned(0.6, 12, 12, rng);
        if (!crossing_cluster_mask(w)[w.vindex({0, 0})]) continue;
        for (double lambda : {0.1, 0.3}) {
            const double gap = girsanov_enumeration_gap(w, {0, 0}, 6, lambda);
            SELFTEST_CHECK(gap <= 1e-12, "girsanov enumeration gap " << gap);
        }
        ++done;
    }
    std::cout << "[ok] girsanov enumeration\n";

    for (double lambda : {1e-4, 0.1, 0.5}) {
        for (int m = 2; m <= 20; ++m) {
            for (int i = 1; i <= m; ++i) {
                const double gap = std::fabs(ruin_probability_r(i, m, lambda) -
                                             ruin_probability_first_step_oracle(i, m, lambda));
                SELFTEST_CHECK(gap < 1e-10, "ruin closed form i=" << i << " m=" << m);
            }
        }
    }
    std::cout << "[ok] ruin formula\n";

    {
        ResistorGraph chain;
        for (int i = 0; i < 7; ++i) chain.add_edge({i, 0}, {i + 1, 0}, 1.0);
        SELFTEST_CHECK(std::fabs(effective_resistance(chain, {0, 0}, {7, 0}) - 7.0) < 1e-12,
                       "series law");
        ResistorGraph cyc;
        cyc.add_edge({0, 0}, {1, 0}, 1.0);
        cyc.add_edge({1, 0}, {1, 1}, 1.0);
        cyc.add_edge({1, 1}, {0, 1}, 1.0);
        cyc.add_edge({0, 1}, {0, 0}, 1.0);
        SELFTEST_CHECK(std::fabs(effective_resistance(cyc, {0, 0}, {1, 0}) - 0.75) < 1e-12,
                       "4-cycle reduction");
    }
    std::cout << "[ok] network closed forms\n";

    done = 0;
    while (done < 5) {
        const WindowConfig w = sample_window_conditioned(cfg.p, 250, 250, rng);
        if (!crossing_cluster_mask(w)[w.vindex({0, 0})]) continue;
        try {
            const PotentialTable t = build_potentials(w, 1.0, {0, 0}, cfg.margin);
            SELFTEST_CHECK(harmonicity_residual(w, t) <= 1e-9, "harmonicity residual");
        } catch (const MarginViolation&) {
            continue;
        }
        ++done;
    }
    std::cout << "[ok] harmonicity\n";

    {
        const EnumeratedDistribution d = enumerate_conditioned_distribution(0.5, 1, 1);
        const ConditionedSampler sampler(0.5, -1, 1);
        const int n = 200000;
        std::vector<double> counts(d.keys.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            const int idx = d.index_of(sampler.draw(rng));
            SELFTEST_CHECK(idx >= 0, "sampler produced a non-crossing configuration");
            counts[static_cast<std::size_t>(idx)] += 1.0;
        }
        const Binning bins = bin_by_expected_count(d.probs, n, 100.0);
        std::vector<double> expected(static_cast<std::size_t>(bins.n_bins), 0.0);
        std::vector<double> observed(static_cast<std::size_t>(bins.n_bins), 0.0);
        for (std::size_t i = 0; i < d.probs.size(); ++i) {
            expected[static_cast<std::size_t>(bins.bin_of_cell[i])] += d.probs[i] * n;
            observed[static_cast<std::size_t>(bins.bin_of_cell[i])] += counts[i];
        }
        const Chi2Result gof = chi2_gof(expected, observed);
        SELFTEST_CHECK(gof.p_value > 1e-3, "sampler GOF p-value " << gof.p_value);
    }
    std::cout << "[ok] conditioned sampler\n";

    std::cout << "selftest passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ladderlab: biased random walk on conditioned ladder percolation"};
    app.require_subcommand(1);

    CliOverrides o;
    app.add_option("--config", o.config_path, "config file (key = value lines)");
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--out", o.out_dir, "output directory");
    app.add_option("--threads", o.threads, "worker count (LADDER_THREADS overrides)");
    app.add_option("--p", o.p, "percolation parameter");
    app.add_option("--alpha", o.alpha, "alpha for the Girsanov window");
    app.add_option("--replicas", o.replicas, "replica count");

    int sample_count = 5;
    bool dump_potentials = false;
    auto* sample = app.add_subcommand("sample-env", "emit conditioned windows + stats");
    sample->add_option("--count", sample_count, "number of windows");
    sample->add_flag("--dump-potentials", dump_potentials, "write phi/psi/chi tables as CSV");

    app.add_subcommand("kappa", "estimate kappa = E[L]/E[1/C] from a cycle pool");

    int envs_per_cell = 6;
    auto* hitting = app.add_subcommand("hitting-check", "bracket verification table");
    hitting->add_option("--envs-per-cell", envs_per_cell, "environments per (L,R,lambda) cell");

    double lambda = 0.2;
    bool dump_trajectory = false;
    auto* speed = app.add_subcommand("speed", "direct + regeneration speed at one lambda");
    speed->add_option("--lambda", lambda, "bias");
    speed->add_flag("--dump-trajectory", dump_trajectory, "write the first replica's path as CSV");

    app.add_subcommand("sigma", "path-variance and psi-moment diffusivity");
    app.add_subcommand("einstein", "full Einstein-relation report");
    app.add_subcommand("selftest", "exact oracle suites");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = resolve_config(o);
        if (app.got_subcommand("sample-env")) return cmd_sample_env(cfg, sample_count, dump_potentials);
        if (app.got_subcommand("kappa")) return cmd_kappa(cfg);
        if (app.got_subcommand("hitting-check")) return cmd_hitting_check(cfg, envs_per_cell);
        if (app.got_subcommand("speed")) return cmd_speed(cfg, lambda, dump_trajectory);
        if (app.got_subcommand("sigma")) return cmd_sigma(cfg);
        if (app.got_subcommand("einstein")) return cmd_einstein(cfg);
        if (app.got_subcommand("selftest")) return cmd_selftest(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
