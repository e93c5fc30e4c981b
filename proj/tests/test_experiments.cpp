#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ladder/experiments.hpp"
#include "ladder/stats.hpp"

using namespace ladder;

TEST_CASE("config round trip and parse errors") {
    ExperimentConfig cfg;
    cfg.p = 0.61;
    cfg.lambda_grid = {0.3, 0.15};
    cfg.replicas = 17;
    cfg.seed = 987654321;
    cfg.out_dir = "artifacts";
    cfg.run_scale = 777.0;

    std::stringstream ss(cfg.to_text());
    const ExperimentConfig back = parse_config_text(ss, "mem");
    CHECK(back.p == cfg.p);
    CHECK(back.lambda_grid == cfg.lambda_grid);
    CHECK(back.replicas == cfg.replicas);
    CHECK(back.seed == cfg.seed);
    CHECK(back.out_dir == cfg.out_dir);
    CHECK(back.run_scale == cfg.run_scale);
    CHECK(back.to_text() == cfg.to_text());

    // Comments and blank lines are fine; junk is rejected with a line number.
    {
        std::stringstream ok("# comment\n\np = 0.5\nreplicas = 3 # trailing\n");
        const ExperimentConfig c = parse_config_text(ok, "mem");
        CHECK(c.p == 0.5);
        CHECK(c.replicas == 3);
    }
    {
        std::stringstream bad("p = 0.5\nnot_a_kv_line\n");
        try {
            parse_config_text(bad, "conf.txt");
            FAIL("expected a parse error");
        } catch (const ParameterError& e) {
            CHECK(std::string(e.what()).find("conf.txt:2") != std::string::npos);
        }
    }
    {
        std::stringstream bad("banana = 7\n");
        try {
            parse_config_text(bad, "conf.txt");
            FAIL("expected unknown-key error");
        } catch (const ParameterError& e) {
            CHECK(std::string(e.what()).find("banana") != std::string::npos);
        }
    }

    ExperimentConfig invalid;
    invalid.p = 1.5;
    CHECK_THROWS_AS(invalid.validate(), ParameterError);
}

TEST_CASE("pp windows put the origin on the crossing cluster") {
    RngStream rng(81, 0);
    for (int rep = 0; rep < 30; ++rep) {
        const WindowConfig w = draw_pp_window(0.6, 40, 40, rng);
        CHECK(crossing_cluster_mask(w)[w.vindex({0, 0})]);
        CHECK(w.conditioned());
    }
}

TEST_CASE("cycle pool harvesting is deterministic and exact-sized") {
    const auto a = harvest_cycle_pool(0.5, 3000, 8, 333, 1);
    const auto b = harvest_cycle_pool(0.5, 3000, 8, 333, 3);
    REQUIRE(a.size() == 3000);
    REQUIRE(b.size() == 3000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].length == b[i].length);
        CHECK(a[i].conductance == b[i].conductance);
        CHECK(a[i].vert == b[i].vert);
    }
}

TEST_CASE("runs are independent of the worker count") {
    // Same seed, different thread counts: byte-identical outputs.
    const BiasedRunResult r1 = run_biased_walks(0.6, 0.4, 12, 4000, 777, 1);
    const BiasedRunResult r3 = run_biased_walks(0.6, 0.4, 12, 4000, 777, 3);
    CHECK(r1.xn_over_n == r3.xn_over_n);
    REQUIRE(r1.records.size() == r3.records.size());
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
        CHECK(r1.records[i].taus == r3.records[i].taus);
        CHECK(r1.records[i].rhos == r3.records[i].rhos);
    }

    const GirsanovRunResult g1 = run_unbiased_weighted(0.6, 0.2, 500, 10, 778, 1);
    const GirsanovRunResult g2 = run_unbiased_weighted(0.6, 0.2, 500, 10, 778, 2);
    CHECK(g1.xn == g2.xn);
    CHECK(g1.log_weights == g2.log_weights);
    CHECK(g1.lambda2_a == g2.lambda2_a);
}

TEST_CASE("regen speed from disjoint trajectory halves agrees") {
    const BiasedRunResult run = run_biased_walks(0.7, 0.4, 60, 30000, 775, 1);
    const std::vector<RegenRecord> first(run.records.begin(), run.records.begin() + 30);
    const std::vector<RegenRecord> second(run.records.begin() + 30, run.records.end());
    const EstimateCI a = speed_regen(first);
    const EstimateCI b = speed_regen(second);
    CHECK(a.overlaps(b));
}

TEST_CASE("sigma runners produce sane small-scale output") {
    const SigmaPathsResult paths = run_sigma_paths(0.6, {500, 2000}, 120, 779, 1);
    REQUIRE(paths.reports.size() == 2);
    for (const auto& rep : paths.reports) {
        CHECK(rep.var_over_n.value > 0.05);
        CHECK(rep.var_over_n.value < 1.0);
    }
    CHECK(paths.ks.p_value >= 0.0);

    KappaEstimate kappa;
    kappa.kappa = 0.9;
    kappa.se = 0.01;
    const SigmaPsiResult psi = run_sigma_psi(0.6, 60, 150, 150, 10, kappa, 780, 1);
    CHECK(psi.n_envs_used + psi.n_skipped == 60);
    CHECK(psi.n_envs_used > 30);
    CHECK(psi.sigma.s11.value > 0.0);
    CHECK(psi.sigma.s22.value > 0.3);
    CHECK(psi.sigma.s22.value < 1.0);
    CHECK(sigma_cauchy_schwarz_ok(psi.sigma));
}

TEST_CASE("einstein report json and csv carry the schema") {
    // Tiny configuration: large lambdas only, few replicas.
    ExperimentConfig cfg;
    cfg.p = 0.6;
    cfg.lambda_grid = {0.5, 0.4};
    cfg.replicas = 40;
    cfg.run_scale = 400.0;
    cfg.kappa_pool = 2000;
    cfg.sigma_envs = 60;
    cfg.sigma_n = 4000;
    cfg.sigma_replicas = 120;
    cfg.seed = 4242;
    cfg.threads = 1;
    cfg.n1 = 150;
    cfg.n2 = 150;

    const EinsteinReport rep = run_einstein(cfg);
    REQUIRE(rep.per_lambda.size() == 2);
    CHECK(rep.per_lambda[0].lambda == 0.5);

    const std::string json = einstein_report_json(rep);
    REQUIRE(rep.per_lambda[0].girsanov_sweep.size() == 3);
    CHECK(json.find("\"girsanov_alpha_sweep\"") != std::string::npos);
    CHECK(json.find("\"schema_version\"") != std::string::npos);
    CHECK(json.find("\"verdict\"") != std::string::npos);
    CHECK(json.find("\"monotone_trend\"") != std::string::npos);
    CHECK(json.find("\"smallest_lambda_ci_overlaps_sigma\"") != std::string::npos);
    CHECK(json.find("\"per_lambda\"") != std::string::npos);
    CHECK(json.find("\"kappa\"") != std::string::npos);

    const std::string csv = einstein_report_csv(rep);
    CHECK(csv.find("lambda,estimator,value,se") != std::string::npos);
    CHECK(csv.find("speed_direct") != std::string::npos);
    CHECK(csv.find("# ladderlab") != std::string::npos);

    // Determinism of the whole pipeline: same config + seed, worker count
    // overridden through the environment, byte-identical CSV.
    setenv("LADDER_THREADS", "3", 1);
    const EinsteinReport rep2 = run_einstein(cfg);
    unsetenv("LADDER_THREADS");
    CHECK(einstein_report_csv(rep2) == csv);
}
