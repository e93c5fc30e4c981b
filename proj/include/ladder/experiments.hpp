#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ladder/corrector.hpp"
#include "ladder/estimators.hpp"
#include "ladder/percolation.hpp"
#include "ladder/regeneration.hpp"
#include "ladder/stats.hpp"
#include "ladder/window.hpp"

namespace ladder {

inline constexpr const char* kVersion = "ladderlab 0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Flat key = value configuration with '#' comments; flags override file
/// values in the CLI. Serializes round-trip losslessly.
struct ExperimentConfig {
    double p = 0.7;
    std::vector<double> lambda_grid = {0.4, 0.2, 0.1, 0.05};
    double alpha = 1.0;
    int n1 = 300;             // sigma-moment window half-widths
    int n2 = 300;
    int margin = 10;
    int replicas = 200;
    int64_t n_steps = 0;      // 0: derive per estimator
    uint64_t seed = 12345;
    int threads = 0;          // 0: hardware; env LADDER_THREADS overrides
    std::string out_dir = "out";
    double lambda0 = 0.2;     // small-bias regime knob for the brackets
    uint64_t kappa_pool = 100000;
    double run_scale = 8000.0;  // direct/regen runs use n = ceil(run_scale/lambda^2)
    int sigma_envs = 1000;
    int64_t sigma_n = 100000;
    int sigma_replicas = 200;

    std::string to_text() const;
    void set_key(const std::string& key, const std::string& value);  // throws on unknown key
    void validate() const;
};

ExperimentConfig parse_config_text(std::istream& is, const std::string& origin);
ExperimentConfig parse_config_file(const std::string& path);

int resolve_threads(const ExperimentConfig& cfg);

/// Static-slot parallel map: results must be written to per-index slots so
/// the outcome is independent of scheduling and worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Stream-id layout: purpose | attempt | replica.
enum StreamPurpose : uint32_t {
    kStreamEnv = 1,
    kStreamWalk = 2,
    kStreamKappa = 3,
    kStreamSigmaEnv = 4,
    kStreamMisc = 7,
};

inline uint64_t make_stream(uint32_t purpose, uint32_t attempt, uint32_t replica) {
    return (static_cast<uint64_t>(purpose) << 48) | (static_cast<uint64_t>(attempt) << 32) |
           replica;
}

/// Conditioned window with the origin on the crossing cluster (the
/// finite-window stand-in for P_p). Resamples in-stream until accepted.
WindowConfig draw_pp_window(double p, int n_left, int n_right, RngStream& rng);

/// Margin-separated cycles harvested from long conditioned windows.
std::vector<Cycle> harvest_cycle_pool(double p, std::size_t count, int margin, uint64_t seed,
                                      int threads);

struct BiasedRunResult {
    std::vector<double> xn_over_n;
    std::vector<RegenRecord> records;
    int64_t n = 0;
};

/// Replicated lambda-biased walks on fresh P_p windows, long enough for
/// regeneration statistics. Windows grow on boundary exits.
BiasedRunResult run_biased_walks(double p, double lambda, int replicas, int64_t n, uint64_t seed,
                                 int threads);

struct GirsanovRunResult {
    std::vector<double> xn;
    std::vector<double> log_weights;  // toward the target lambda
    std::vector<double> lambda2_a;    // lambda^2 A_n per replica
    int64_t n = 0;
};

/// Unbiased walks with Girsanov reweighting toward `lambda`.
GirsanovRunResult run_unbiased_weighted(double p, double lambda, int64_t n, int replicas,
                                        uint64_t seed, int threads);

struct SigmaPathsResult {
    std::vector<int64_t> n_list;
    std::vector<std::vector<double>> xn_at;  // xn_at[i][r] = X at n_list[i]
    std::vector<double> max_xk_sq;           // running max over the longest horizon
    std::vector<PathVarianceReport> reports;
    KsResult ks;  // X_n / sqrt(var) at the longest horizon
};

SigmaPathsResult run_sigma_paths(double p, std::vector<int64_t> n_list, int replicas,
                                 uint64_t seed, int threads);

struct SigmaPsiResult {
    SigmaMatrix sigma;
    int n_envs_used = 0;
    int n_skipped = 0;
};

SigmaPsiResult run_sigma_psi(double p, int n_envs, int n1, int n2, int margin,
                             const KappaEstimate& kappa, uint64_t seed, int threads);

struct GirsanovSweepPoint {
    double alpha_eff = 0.0;
    EstimateCI estimate;
};

struct PerLambdaResult {
    double lambda = 0.0;
    int64_t n_long = 0;
    int64_t n_gir = 0;
    EstimateCI direct;
    EstimateCI regen;
    EstimateCI girsanov;      // E_lambda[X_n]/(lambda n) via reweighting
    EstimateCI ratio_direct;  // direct / lambda
    MeanSE lambda2_a;
    double alpha_eff = 0.0;   // lambda^2 n_gir
    // The double limit is summarized by the trend of the mid-quantity over
    // alpha multiples {0.5, 1, 2} rather than by an outer limit.
    std::vector<GirsanovSweepPoint> girsanov_sweep;
    TailReport tail;
};

struct EinsteinVerdict {
    bool monotone_trend = false;        // ratios non-increasing as lambda decreases (with CI slack)
    bool smallest_ci_overlap = false;   // smallest-lambda ratio CI vs path-variance sigma^2 CI
    double max_ratio = 0.0;
    bool lambda2_a_concentrates = false;  // each lambda: mean lambda^2 A_n near (alpha/2) s22
};

struct EinsteinReport {
    ExperimentConfig cfg;
    KappaEstimate kappa;
    SigmaPathsResult sigma_paths;
    SigmaPsiResult sigma_psi;
    std::vector<PerLambdaResult> per_lambda;
    EinsteinVerdict verdict;
};

/// Verdict assembly from already-computed estimates; exposed so synthetic
/// pipelines with known ground truth can exercise the same logic.
EinsteinVerdict compute_einstein_verdict(const std::vector<PerLambdaResult>& per_lambda,
                                         const EstimateCI& sigma_path,
                                         const SigmaMatrix& sigma_psi);

EinsteinReport run_einstein(const ExperimentConfig& cfg);

std::string einstein_report_json(const EinsteinReport& rep);
std::string einstein_report_csv(const EinsteinReport& rep);

/// '#'-prefixed provenance lines: version, rng, seed, config echo.
std::string provenance_header(const ExperimentConfig& cfg, const std::string& subcommand);

}  // namespace ladder
