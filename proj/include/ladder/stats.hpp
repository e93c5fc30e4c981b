#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ladder {

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSE mean_se(const std::vector<double>& xs);

/// Sample variance with a moment-based standard error,
/// SE(s^2) ~ sqrt((m4 - s^4)/n).
struct VarianceEstimate {
    double var = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

VarianceEstimate variance_with_se(const std::vector<double>& xs);

/// Lag-k sample autocorrelation; se is the null approximation 1/sqrt(n).
struct LagCorrelation {
    double corr = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

LagCorrelation lag_correlation(const std::vector<double>& xs, std::size_t lag);

/// Pearson correlation of (x_i, y_i) pairs.
double correlation(const std::vector<double>& xs, const std::vector<double>& ys);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
double gammq(double a, double x);

/// Survival function of the chi-squared distribution with df degrees of freedom.
double chi2_sf(double x, double df);

double normal_cdf(double x);

/// One-sample Kolmogorov-Smirnov test against the standard normal.
/// Returns the statistic and the asymptotic p-value with the usual
/// finite-sample correction.
struct KsResult {
    double d = 0.0;
    double p_value = 0.0;
};

KsResult ks_test_standard_normal(std::vector<double> xs);

/// Ratio-of-sums estimator over (numerator, denominator) pairs with a
/// batch-means standard error. Batches are nonoverlapping runs of
/// `batch` consecutive pairs; pairs from different segments (e.g.
/// different trajectories) never share a batch when fed segment-wise via
/// BatchRatio::add_segment.
class BatchRatio {
public:
    explicit BatchRatio(std::size_t batch) : batch_(batch < 2 ? 2 : batch) {}

    void add_segment(const std::vector<double>& num, const std::vector<double>& den);

    struct Result {
        double ratio = 0.0;
        double se = 0.0;
        std::size_t n_batches = 0;
    };
    Result estimate() const;

private:
    std::size_t batch_;
    std::vector<double> batch_num_;
    std::vector<double> batch_den_;
};

/// Total variation distance between two distributions given as aligned
/// probability vectors.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

/// Group cells of a discrete distribution into bins whose expected counts
/// under n draws are at least min_expected. Cells are taken in decreasing
/// probability order, so the binning is deterministic. Returns the bin
/// index per cell and the number of bins.
struct Binning {
    std::vector<int> bin_of_cell;
    int n_bins = 0;
};

Binning bin_by_expected_count(const std::vector<double>& probs, double n_draws,
                              double min_expected);

/// Pearson chi-squared GOF over pre-binned counts.
struct Chi2Result {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 0.0;
};

Chi2Result chi2_gof(const std::vector<double>& expected, const std::vector<double>& observed);

}  // namespace ladder
