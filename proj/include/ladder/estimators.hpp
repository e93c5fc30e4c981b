#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ladder {

struct EstimateCI {
    double value = 0.0;
    double se = 0.0;
    double n_eff = 0.0;
    std::string method;
    bool degenerate = false;

    double lo(double z = 1.96) const { return value - z * se; }
    double hi(double z = 1.96) const { return value + z * se; }
    bool overlaps(const EstimateCI& other, double z = 1.96) const {
        return lo(z) <= other.hi(z) && other.lo(z) <= hi(z);
    }
};

struct SigmaMatrix {
    EstimateCI s11, s12, s22;
};

/// |s12| <= sqrt(s11 s22) up to the stated SE slack.
bool sigma_cauchy_schwarz_ok(const SigmaMatrix& m, double z = 3.0);

/// Mean of X_n/n across replicas.
EstimateCI speed_direct(const std::vector<double>& xn_over_n);

/// Unnormalized importance-sampling estimate of E_lambda[X_n]/(lambda n)
/// from unbiased trajectories: mean of X_n e^{log w} over replicas. n_eff
/// carries the effective sample size (sum w)^2 / sum w^2; the estimate is
/// flagged degenerate below 10.
EstimateCI speed_girsanov(const std::vector<double>& xn, const std::vector<double>& log_weights,
                          double lambda, int64_t n);

struct PathVarianceReport {
    EstimateCI var_over_n;         // Var(X_n)/n across replicas
    double mean_max_sq_over_n = 0.0;  // (1/n) mean of max_k X_k^2
};

PathVarianceReport sigma_path_variance(const std::vector<double>& xn,
                                       const std::vector<double>& max_xk_sq, int64_t n);

/// Averages of the exact per-environment one-step moments
///   s11: sum_w p0(0,w) psi(w)^2, s12: sum_w p0(0,w) psi(w) nu(0,w),
///   s22: sum_w p0(0,w) nu(0,w)^2,
/// with kappa estimation noise propagated into s11 (~kappa^2) and s12
/// (~kappa) by the delta method.
SigmaMatrix sigma_psi_moments(const std::vector<double>& s11_per_env,
                              const std::vector<double>& s12_per_env,
                              const std::vector<double>& s22_per_env, double kappa,
                              double kappa_se);

}  // namespace ladder
