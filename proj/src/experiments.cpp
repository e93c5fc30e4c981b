#include "ladder/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ladder/electrical.hpp"
#include "ladder/walk.hpp"

namespace ladder {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

std::string join_lambdas(const std::vector<double>& xs) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ',';
        os << xs[i];
    }
    return os.str();
}

std::vector<double> split_lambdas(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "p = " << p << '\n'
       << "lambda_grid = " << join_lambdas(lambda_grid) << '\n'
       << "alpha = " << alpha << '\n'
       << "n1 = " << n1 << '\n'
       << "n2 = " << n2 << '\n'
       << "margin = " << margin << '\n'
       << "replicas = " << replicas << '\n'
       << "n_steps = " << n_steps << '\n'
       << "seed = " << seed << '\n'
       << "threads = " << threads << '\n'
       << "out_dir = " << out_dir << '\n'
       << "lambda0 = " << lambda0 << '\n'
       << "kappa_pool = " << kappa_pool << '\n'
       << "run_scale = " << run_scale << '\n'
       << "sigma_envs = " << sigma_envs << '\n'
       << "sigma_n = " << sigma_n << '\n'
       << "sigma_replicas = " << sigma_replicas << '\n';
    return os.str();
}

void ExperimentConfig::set_key(const std::string& key, const std::string& value) {
    if (key == "p")
        p = std::stod(value);
    else if (key == "lambda_grid")
        lambda_grid = split_lambdas(value);
    else if (key == "alpha")
        alpha = std::stod(value);
    else if (key == "n1")
        n1 = std::stoi(value);
    else if (key == "n2")
        n2 = std::stoi(value);
    else if (key == "margin")
        margin = std::stoi(value);
    else if (key == "replicas")
        replicas = std::stoi(value);
    else if (key == "n_steps")
        n_steps = std::stoll(value);
    else if (key == "seed")
        seed = std::stoull(value);
    else if (key == "threads")
        threads = std::stoi(value);
    else if (key == "out_dir")
        out_dir = value;
    else if (key == "lambda0")
        lambda0 = std::stod(value);
    else if (key == "kappa_pool")
        kappa_pool = std::stoull(value);
    else if (key == "run_scale")
        run_scale = std::stod(value);
    else if (key == "sigma_envs")
        sigma_envs = std::stoi(value);
    else if (key == "sigma_n")
        sigma_n = std::stoll(value);
    else if (key == "sigma_replicas")
        sigma_replicas = std::stoi(value);
    else
        throw ParameterError("unknown config key '" + key + "'");
}

void ExperimentConfig::validate() const {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("config: p must be in (0,1)");
    for (double l : lambda_grid)
        if (l < 0.0) throw ParameterError("config: lambda values must be >= 0");
    if (replicas < 1) throw ParameterError("config: replicas must be >= 1");
    if (margin < 0) throw ParameterError("config: margin must be >= 0");
    if (alpha <= 0.0) throw ParameterError("config: alpha must be positive");
    if (run_scale <= 0.0) throw ParameterError("config: run_scale must be positive");
}

ExperimentConfig parse_config_text(std::istream& is, const std::string& origin) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string stripped = strip(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << origin << ':' << lineno << ": expected 'key = value'";
            throw ParameterError(msg.str());
        }
        try {
            cfg.set_key(strip(stripped.substr(0, eq)), strip(stripped.substr(eq + 1)));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << origin << ':' << lineno << ": " << e.what();
            throw ParameterError(msg.str());
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParameterError("cannot open config file " + path);
    return parse_config_text(is, path);
}

int resolve_threads(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("LADDER_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const int workers = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(threads)));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Environment and walk plumbing
// ---------------------------------------------------------------------------

WindowConfig draw_pp_window(double p, int n_left, int n_right, RngStream& rng) {
    const ConditionedSampler sampler(p, -n_left, n_right);
    for (int tries = 0; tries < 1000; ++tries) {
        WindowConfig w = sampler.draw(rng);
        const auto mask = crossing_cluster_mask(w);
        if (mask[w.vindex({0, 0})]) return w;
    }
    throw ConnectivityError("draw_pp_window: origin kept missing the crossing cluster");
}

std::vector<Cycle> harvest_cycle_pool(double p, std::size_t count, int margin, uint64_t seed,
                                      int threads) {
    if (count == 0) throw ParameterError("harvest_cycle_pool: zero pool size");
    const int window_cols = 1500;
    const ConditionedSampler sampler(p, 0, window_cols);

    std::vector<Cycle> pool;
    uint32_t window_index = 0;
    while (pool.size() < count) {
        const std::size_t batch =
            std::max<std::size_t>(1, (count - pool.size()) / (window_cols / 4) + 1);
        std::vector<std::vector<Cycle>> per_window(batch);
        parallel_for(batch, threads, [&](std::size_t i) {
            RngStream rng(seed, make_stream(kStreamKappa, 0, window_index + static_cast<uint32_t>(i)));
            const WindowConfig w = sampler.draw(rng);
            per_window[i] = extract_cycles(w, margin);
        });
        window_index += static_cast<uint32_t>(batch);
        for (auto& cycles : per_window)
            for (auto& c : cycles) pool.push_back(std::move(c));
        if (window_index > 100000)
            throw ConnectivityError("harvest_cycle_pool: cycles too rare at this p");
    }
    pool.resize(count);
    return pool;
}

namespace {

struct WindowPlan {
    int n_left = 0;
    int n_right = 0;
};

WindowPlan plan_window(double lambda, int64_t n, int attempt) {
    const double vmax = (std::exp(lambda) - std::exp(-lambda)) / partition_z(lambda);
    const double spread = 6.0 * std::sqrt(static_cast<double>(n) + 1.0);
    WindowPlan plan;
    plan.n_left = 60 + static_cast<int>(std::ceil(spread));
    plan.n_right = 60 + static_cast<int>(std::ceil(vmax * static_cast<double>(n) + spread));
    plan.n_left <<= attempt;
    plan.n_right <<= attempt;
    return plan;
}

constexpr int kMaxAttempts = 8;

/// Draw a P_p window and run one walk on it, growing the window on
/// boundary exits. Deterministic in (seed, replica).
template <typename Use>
void with_walk(double p, double lambda, int64_t n, uint64_t seed, uint32_t replica, Use&& use) {
    for (int attempt = 0;; ++attempt) {
        const WindowPlan plan = plan_window(lambda, n, attempt);
        RngStream env_rng(seed, make_stream(kStreamEnv, static_cast<uint32_t>(attempt), replica));
        RngStream walk_rng(seed, make_stream(kStreamWalk, static_cast<uint32_t>(attempt), replica));
        const WindowConfig w = draw_pp_window(p, plan.n_left, plan.n_right, env_rng);
        try {
            const Trajectory traj = simulate(w, lambda, {0, 0}, n, walk_rng);
            use(w, traj);
            return;
        } catch (const BoundaryExit&) {
            if (attempt + 1 >= kMaxAttempts) throw;
        } catch (const MarginViolation&) {
            if (attempt + 1 >= kMaxAttempts) throw;
        }
    }
}

}  // namespace

BiasedRunResult run_biased_walks(double p, double lambda, int replicas, int64_t n, uint64_t seed,
                                 int threads) {
    if (lambda <= 0.0) throw ParameterError("run_biased_walks: lambda must be positive");
    BiasedRunResult out;
    out.n = n;
    out.xn_over_n.assign(static_cast<std::size_t>(replicas), 0.0);
    out.records.assign(static_cast<std::size_t>(replicas), {});
    parallel_for(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
        with_walk(p, lambda, n, seed, static_cast<uint32_t>(r),
                  [&](const WindowConfig& w, const Trajectory& traj) {
                      out.xn_over_n[r] =
                          static_cast<double>(traj.x_n()) / static_cast<double>(n);
                      const auto points =
                          lambda_prereg_points(find_preregeneration_points(w), lambda);
                      if (points.empty()) throw MarginViolation("no lambda points in window");
                      out.records[r] = detect_regenerations(traj, w, lambda, points);
                  });
    });
    return out;
}

GirsanovRunResult run_unbiased_weighted(double p, double lambda, int64_t n, int replicas,
                                        uint64_t seed, int threads) {
    GirsanovRunResult out;
    out.n = n;
    out.xn.assign(static_cast<std::size_t>(replicas), 0.0);
    out.log_weights.assign(static_cast<std::size_t>(replicas), 0.0);
    out.lambda2_a.assign(static_cast<std::size_t>(replicas), 0.0);
    parallel_for(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
        with_walk(p, 0.0, n, seed, static_cast<uint32_t>(r),
                  [&](const WindowConfig& w, const Trajectory& traj) {
                      const GirsanovComponents g = girsanov_components(w, traj.pos, lambda);
                      out.xn[r] = static_cast<double>(traj.x_n());
                      out.log_weights[r] = g.log_weight;
                      out.lambda2_a[r] = lambda * lambda * g.a;
                  });
    });
    return out;
}

SigmaPathsResult run_sigma_paths(double p, std::vector<int64_t> n_list, int replicas,
                                 uint64_t seed, int threads) {
    if (n_list.empty()) throw ParameterError("run_sigma_paths: empty horizon list");
    std::sort(n_list.begin(), n_list.end());
    const int64_t n_max = n_list.back();

    SigmaPathsResult out;
    out.n_list = n_list;
    out.xn_at.assign(n_list.size(),
                     std::vector<double>(static_cast<std::size_t>(replicas), 0.0));
    // Running max of X_k^2 recorded at every horizon separately.
    std::vector<std::vector<double>> max_at(
        n_list.size(), std::vector<double>(static_cast<std::size_t>(replicas), 0.0));

    parallel_for(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
        with_walk(p, 0.0, n_max, seed, static_cast<uint32_t>(r),
                  [&](const WindowConfig&, const Trajectory& traj) {
                      double max_sq = 0.0;
                      std::size_t which = 0;
                      for (std::size_t k = 0; k < traj.pos.size(); ++k) {
                          const double x = static_cast<double>(traj.pos[k].x);
                          max_sq = std::max(max_sq, x * x);
                          if (which < n_list.size() &&
                              static_cast<int64_t>(k) == n_list[which]) {
                              out.xn_at[which][r] = x;
                              max_at[which][r] = max_sq;
                              ++which;
                          }
                      }
                  });
    });
    out.max_xk_sq = max_at.back();

    for (std::size_t i = 0; i < n_list.size(); ++i)
        out.reports.push_back(sigma_path_variance(out.xn_at[i], max_at[i], n_list[i]));

    const double var = out.reports.back().var_over_n.value * static_cast<double>(n_max);
    std::vector<double> standardized;
    standardized.reserve(static_cast<std::size_t>(replicas));
    for (double x : out.xn_at.back()) standardized.push_back(x / std::sqrt(var));
    out.ks = ks_test_standard_normal(standardized);
    return out;
}

SigmaPsiResult run_sigma_psi(double p, int n_envs, int n1, int n2, int margin,
                             const KappaEstimate& kappa, uint64_t seed, int threads) {
    SigmaPsiResult out;
    std::vector<double> s11(static_cast<std::size_t>(n_envs), 0.0);
    std::vector<double> s12(static_cast<std::size_t>(n_envs), 0.0);
    std::vector<double> s22(static_cast<std::size_t>(n_envs), 0.0);
    std::vector<uint8_t> used(static_cast<std::size_t>(n_envs), 0);

    parallel_for(static_cast<std::size_t>(n_envs), threads, [&](std::size_t r) {
        RngStream rng(seed, make_stream(kStreamSigmaEnv, 0, static_cast<uint32_t>(r)));
        const WindowConfig w = draw_pp_window(p, n1, n2, rng);
        const Vertex origin{0, 0};
        PotentialTable table;
        try {
            table = build_potentials(w, kappa.kappa, origin, margin);
        } catch (const MarginViolation&) {
            return;  // skipped and counted
        }
        const TransitionRow row = transition_row(w, 0.0, origin);
        double m11 = 0.0, m12 = 0.0, m22 = 0.0;
        for (int i = 0; i < row.n; ++i) {
            const Vertex to = row.target[i];
            if (to != origin && !table.has(to)) return;  // psi unavailable: skip env
            const double psi = to == origin ? 0.0 : table.psi(to);
            const double nu_v = nu(w, origin, to);
            m11 += row.prob[i] * psi * psi;
            m12 += row.prob[i] * psi * nu_v;
            m22 += row.prob[i] * nu_v * nu_v;
        }
        s11[r] = m11;
        s12[r] = m12;
        s22[r] = m22;
        used[r] = 1;
    });

    std::vector<double> u11, u12, u22;
    for (std::size_t r = 0; r < used.size(); ++r) {
        if (!used[r]) {
            ++out.n_skipped;
            continue;
        }
        u11.push_back(s11[r]);
        u12.push_back(s12[r]);
        u22.push_back(s22[r]);
    }
    out.n_envs_used = static_cast<int>(u11.size());
    if (out.n_envs_used == 0) throw MarginViolation("run_sigma_psi: every environment skipped");
    out.sigma = sigma_psi_moments(u11, u12, u22, kappa.kappa, kappa.se);
    return out;
}

// ---------------------------------------------------------------------------
// Einstein experiment
// ---------------------------------------------------------------------------

EinsteinReport run_einstein(const ExperimentConfig& cfg) {
    cfg.validate();
    const int threads = resolve_threads(cfg);

    EinsteinReport rep;
    rep.cfg = cfg;

    const std::vector<Cycle> pool =
        harvest_cycle_pool(cfg.p, cfg.kappa_pool, cfg.margin, cfg.seed + 1, threads);
    rep.kappa = estimate_kappa(pool);

    rep.sigma_paths = run_sigma_paths(
        cfg.p, {std::max<int64_t>(100, cfg.sigma_n / 100), std::max<int64_t>(200, cfg.sigma_n / 10), cfg.sigma_n},
        cfg.sigma_replicas, cfg.seed + 2, threads);
    rep.sigma_psi = run_sigma_psi(cfg.p, cfg.sigma_envs, cfg.n1, cfg.n2, cfg.margin, rep.kappa,
                                  cfg.seed + 3, threads);

    std::vector<double> lambdas = cfg.lambda_grid;
    std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());

    uint64_t lambda_salt = 10;
    for (double lambda : lambdas) {
        PerLambdaResult res;
        res.lambda = lambda;
        res.n_long = cfg.n_steps > 0
                         ? cfg.n_steps
                         : static_cast<int64_t>(std::ceil(cfg.run_scale / (lambda * lambda)));
        res.n_gir = static_cast<int64_t>(std::ceil(cfg.alpha / (lambda * lambda)));
        res.alpha_eff = lambda * lambda * static_cast<double>(res.n_gir);

        const BiasedRunResult biased = run_biased_walks(cfg.p, lambda, cfg.replicas, res.n_long,
                                                        cfg.seed + lambda_salt, threads);
        res.direct = speed_direct(biased.xn_over_n);
        res.regen = speed_regen(biased.records);
        res.tail = regen_tail_diagnostic(biased.records);
        res.ratio_direct = res.direct;
        res.ratio_direct.value /= lambda;
        res.ratio_direct.se /= lambda;
        res.ratio_direct.method = "direct/lambda";

        const GirsanovRunResult gir = run_unbiased_weighted(cfg.p, lambda, res.n_gir,
                                                            cfg.replicas, cfg.seed + lambda_salt + 1,
                                                            threads);
        res.girsanov = speed_girsanov(gir.xn, gir.log_weights, lambda, res.n_gir);
        res.lambda2_a = mean_se(gir.lambda2_a);

        for (double mult : {0.5, 1.0, 2.0}) {
            const int64_t n_alt =
                static_cast<int64_t>(std::ceil(mult * cfg.alpha / (lambda * lambda)));
            GirsanovSweepPoint pt;
            pt.alpha_eff = lambda * lambda * static_cast<double>(n_alt);
            if (n_alt == res.n_gir) {
                pt.estimate = res.girsanov;
            } else {
                const GirsanovRunResult alt = run_unbiased_weighted(
                    cfg.p, lambda, n_alt, cfg.replicas, cfg.seed + lambda_salt + 1, threads);
                pt.estimate = speed_girsanov(alt.xn, alt.log_weights, lambda, n_alt);
            }
            res.girsanov_sweep.push_back(std::move(pt));
        }

        rep.per_lambda.push_back(std::move(res));
        lambda_salt += 2;
    }

    rep.verdict = compute_einstein_verdict(rep.per_lambda,
                                           rep.sigma_paths.reports.back().var_over_n,
                                           rep.sigma_psi.sigma);
    return rep;
}

EinsteinVerdict compute_einstein_verdict(const std::vector<PerLambdaResult>& per_lambda,
                                         const EstimateCI& sigma_path,
                                         const SigmaMatrix& sigma_psi) {
    EinsteinVerdict v;
    // Decreasing in lambda: the ratio at the larger bias must not exceed the
    // ratio at the smaller bias beyond CI slack (it climbs toward sigma^2 as
    // lambda drops).
    v.monotone_trend = true;
    for (std::size_t i = 0; i + 1 < per_lambda.size(); ++i) {
        const EstimateCI& big = per_lambda[i].ratio_direct;    // larger lambda
        const EstimateCI& small = per_lambda[i + 1].ratio_direct;
        if (big.value - 1.96 * (big.se + small.se) > small.value) v.monotone_trend = false;
    }
    v.max_ratio = 0.0;
    for (const auto& pl : per_lambda)
        v.max_ratio = std::max(v.max_ratio, std::fabs(pl.ratio_direct.value));
    if (!per_lambda.empty())
        v.smallest_ci_overlap = per_lambda.back().ratio_direct.overlaps(sigma_path);
    v.lambda2_a_concentrates = true;
    for (const auto& pl : per_lambda) {
        const double target = 0.5 * pl.alpha_eff * sigma_psi.s22.value;
        const double tol =
            3.0 * (pl.lambda2_a.se + 0.5 * pl.alpha_eff * sigma_psi.s22.se);
        if (std::fabs(pl.lambda2_a.mean - target) > tol) v.lambda2_a_concentrates = false;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::json ci_json(const EstimateCI& e) {
    return {{"value", e.value},
            {"se", e.se},
            {"n_eff", e.n_eff},
            {"method", e.method},
            {"degenerate", e.degenerate}};
}

}  // namespace

std::string einstein_report_json(const EinsteinReport& rep) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["rng"] = kRngName;
    j["config"] = nlohmann::json::parse("{}");
    {
        nlohmann::json c;
        c["p"] = rep.cfg.p;
        c["lambda_grid"] = rep.cfg.lambda_grid;
        c["alpha"] = rep.cfg.alpha;
        c["replicas"] = rep.cfg.replicas;
        c["seed"] = rep.cfg.seed;
        c["margin"] = rep.cfg.margin;
        c["run_scale"] = rep.cfg.run_scale;
        c["kappa_pool"] = rep.cfg.kappa_pool;
        c["sigma_envs"] = rep.cfg.sigma_envs;
        c["sigma_n"] = rep.cfg.sigma_n;
        c["sigma_replicas"] = rep.cfg.sigma_replicas;
        j["config"] = c;
    }
    j["kappa"] = {{"value", rep.kappa.kappa}, {"se", rep.kappa.se}, {"n", rep.kappa.n}};

    nlohmann::json sigma;
    sigma["path_variance"] = ci_json(rep.sigma_paths.reports.back().var_over_n);
    sigma["path_variance_by_n"] = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.sigma_paths.n_list.size(); ++i) {
        sigma["path_variance_by_n"].push_back(
            {{"n", rep.sigma_paths.n_list[i]},
             {"estimate", ci_json(rep.sigma_paths.reports[i].var_over_n)},
             {"mean_max_sq_over_n", rep.sigma_paths.reports[i].mean_max_sq_over_n}});
    }
    sigma["ks_p_value"] = rep.sigma_paths.ks.p_value;
    sigma["s11"] = ci_json(rep.sigma_psi.sigma.s11);
    sigma["s12"] = ci_json(rep.sigma_psi.sigma.s12);
    sigma["s22"] = ci_json(rep.sigma_psi.sigma.s22);
    sigma["psi_envs_used"] = rep.sigma_psi.n_envs_used;
    sigma["psi_envs_skipped"] = rep.sigma_psi.n_skipped;
    j["sigma"] = sigma;

    j["per_lambda"] = nlohmann::json::array();
    for (const auto& pl : rep.per_lambda) {
        nlohmann::json e;
        e["lambda"] = pl.lambda;
        e["n_long"] = pl.n_long;
        e["n_girsanov"] = pl.n_gir;
        e["alpha_eff"] = pl.alpha_eff;
        e["speed_direct"] = ci_json(pl.direct);
        e["speed_regen"] = ci_json(pl.regen);
        e["girsanov_ratio"] = ci_json(pl.girsanov);
        e["ratio_direct"] = ci_json(pl.ratio_direct);
        e["girsanov_alpha_sweep"] = nlohmann::json::array();
        for (const auto& pt : pl.girsanov_sweep)
            e["girsanov_alpha_sweep"].push_back(
                {{"alpha_eff", pt.alpha_eff}, {"estimate", ci_json(pt.estimate)}});
        e["lambda2_A"] = {{"mean", pl.lambda2_a.mean}, {"se", pl.lambda2_a.se}};
        e["tail"] = {{"slope", pl.tail.slope},
                     {"slope_se", pl.tail.slope_se},
                     {"c", pl.tail.c},
                     {"lag1_corr", pl.tail.lag1_corr},
                     {"lag2_corr", pl.tail.lag2_corr},
                     {"corr_se", pl.tail.corr_se},
                     {"min_gap", pl.tail.min_gap},
                     {"n_gaps", pl.tail.n_gaps}};
        j["per_lambda"].push_back(e);
    }

    j["verdict"] = {{"monotone_trend", rep.verdict.monotone_trend},
                    {"smallest_lambda_ci_overlaps_sigma", rep.verdict.smallest_ci_overlap},
                    {"max_ratio", rep.verdict.max_ratio},
                    {"lambda2_a_concentrates", rep.verdict.lambda2_a_concentrates}};
    return j.dump(2);
}

std::string einstein_report_csv(const EinsteinReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << provenance_header(rep.cfg, "einstein");
    os << "lambda,estimator,value,se\n";
    for (const auto& pl : rep.per_lambda) {
        os << pl.lambda << ",speed_direct," << pl.direct.value << ',' << pl.direct.se << '\n';
        os << pl.lambda << ",speed_regen," << pl.regen.value << ',' << pl.regen.se << '\n';
        os << pl.lambda << ",girsanov_ratio," << pl.girsanov.value << ',' << pl.girsanov.se
           << '\n';
        os << pl.lambda << ",ratio_direct," << pl.ratio_direct.value << ','
           << pl.ratio_direct.se << '\n';
        os << pl.lambda << ",lambda2_A," << pl.lambda2_a.mean << ',' << pl.lambda2_a.se << '\n';
    }
    os << "0,sigma_path_variance," << rep.sigma_paths.reports.back().var_over_n.value << ','
       << rep.sigma_paths.reports.back().var_over_n.se << '\n';
    os << "0,sigma_s11," << rep.sigma_psi.sigma.s11.value << ',' << rep.sigma_psi.sigma.s11.se
       << '\n';
    os << "0,sigma_s12," << rep.sigma_psi.sigma.s12.value << ',' << rep.sigma_psi.sigma.s12.se
       << '\n';
    os << "0,sigma_s22," << rep.sigma_psi.sigma.s22.value << ',' << rep.sigma_psi.sigma.s22.se
       << '\n';
    os << "0,kappa," << rep.kappa.kappa << ',' << rep.kappa.se << '\n';
    return os.str();
}

std::string provenance_header(const ExperimentConfig& cfg, const std::string& subcommand) {
    std::ostringstream os;
    os << "# " << kVersion << " subcommand=" << subcommand << '\n';
    os << "# rng=" << kRngName << " seed=" << cfg.seed << '\n';
    std::istringstream cfg_text(cfg.to_text());
    std::string line;
    while (std::getline(cfg_text, line)) os << "# config: " << line << '\n';
    return os.str();
}

}  // namespace ladder
