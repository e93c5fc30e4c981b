#include "ladder/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ladder {

MeanSE mean_se(const std::vector<double>& xs) {
    MeanSE r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    r.se = std::sqrt(var / static_cast<double>(xs.size()));
    return r;
}

VarianceEstimate variance_with_se(const std::vector<double>& xs) {
    VarianceEstimate r;
    r.n = xs.size();
    if (xs.size() < 2) return r;
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    r.var = m2 * n / (n - 1.0);
    const double v = std::max(0.0, m4 - m2 * m2);
    r.se = std::sqrt(v / n);
    return r;
}

LagCorrelation lag_correlation(const std::vector<double>& xs, std::size_t lag) {
    LagCorrelation r;
    if (xs.size() <= lag + 1) return r;
    const std::size_t n = xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    if (var <= 0.0) return r;
    double cov = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
        cov += (xs[i] - mean) * (xs[i + lag] - mean);
    cov /= static_cast<double>(n - lag);
    r.corr = cov / var;
    r.n = n - lag;
    r.se = 1.0 / std::sqrt(static_cast<double>(r.n));
    return r;
}

double correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("correlation: need equal-length samples, n >= 2");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("linear_fit: need equal-length samples, n >= 3");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("linear_fit: degenerate x values");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (f.intercept + f.slope * xs[i]);
        rss += e * e;
    }
    f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    return f;
}

namespace {

double gammln(double x) { return std::lgamma(x); }

// Series expansion of P(a,x), valid for x < a+1.
double gser(double a, double x) {
    const int kMaxIter = 500;
    const double eps = 1e-15;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * eps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gammln(a));
}

// Continued fraction for Q(a,x), valid for x >= a+1.
double gcf(double a, double x) {
    const int kMaxIter = 500;
    const double eps = 1e-15;
    const double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return std::exp(-x + a * std::log(x) - gammln(a)) * h;
}

}  // namespace

double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammq: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gser(a, x);
    return gcf(a, x);
}

double chi2_sf(double x, double df) { return gammq(0.5 * df, 0.5 * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Kolmogorov distribution survival Q_KS(x) = 2 sum (-1)^{k-1} exp(-2k^2x^2).
double ks_q(double x) {
    if (x < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

}  // namespace

KsResult ks_test_standard_normal(std::vector<double> xs) {
    KsResult r;
    if (xs.empty()) return r;
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = normal_cdf(xs[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::fabs(cdf - lo), std::fabs(hi - cdf)));
    }
    r.d = d;
    const double sn = std::sqrt(n);
    r.p_value = ks_q((sn + 0.12 + 0.11 / sn) * d);
    return r;
}

void BatchRatio::add_segment(const std::vector<double>& num, const std::vector<double>& den) {
    if (num.size() != den.size())
        throw std::invalid_argument("BatchRatio: mismatched segment lengths");
    for (std::size_t i = 0; i < num.size(); i += batch_) {
        const std::size_t hi = std::min(num.size(), i + batch_);
        if (hi - i < batch_ && i > 0) {
            // Fold a short tail into the previous batch of the same segment.
            for (std::size_t j = i; j < hi; ++j) {
                batch_num_.back() += num[j];
                batch_den_.back() += den[j];
            }
            continue;
        }
        double sn = 0.0, sd = 0.0;
        for (std::size_t j = i; j < hi; ++j) {
            sn += num[j];
            sd += den[j];
        }
        batch_num_.push_back(sn);
        batch_den_.push_back(sd);
    }
}

BatchRatio::Result BatchRatio::estimate() const {
    Result r;
    r.n_batches = batch_num_.size();
    if (batch_num_.empty()) return r;
    double tn = 0.0, td = 0.0;
    for (std::size_t i = 0; i < batch_num_.size(); ++i) {
        tn += batch_num_[i];
        td += batch_den_[i];
    }
    if (td == 0.0) throw std::invalid_argument("BatchRatio: zero denominator");
    r.ratio = tn / td;
    if (batch_num_.size() < 2) return r;
    double ss = 0.0;
    for (std::size_t i = 0; i < batch_num_.size(); ++i) {
        const double e = batch_num_[i] - r.ratio * batch_den_[i];
        ss += e * e;
    }
    const double b = static_cast<double>(batch_num_.size());
    r.se = std::sqrt(ss * b / (b - 1.0)) / td;
    return r;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("tv_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
    return 0.5 * s;
}

Binning bin_by_expected_count(const std::vector<double>& probs, double n_draws,
                              double min_expected) {
    Binning out;
    out.bin_of_cell.assign(probs.size(), 0);
    std::vector<std::size_t> order(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (probs[a] != probs[b]) return probs[a] > probs[b];
        return a < b;
    });
    int bin = 0;
    double acc = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.bin_of_cell[order[k]] = bin;
        acc += probs[order[k]] * n_draws;
        if (acc >= min_expected && k + 1 < order.size()) {
            ++bin;
            acc = 0.0;
        }
    }
    // If the trailing bin ended up light, merge it into the previous one.
    if (bin > 0 && acc < min_expected && acc > 0.0) {
        for (auto& b : out.bin_of_cell)
            if (b == bin) b = bin - 1;
        --bin;
    }
    out.n_bins = bin + 1;
    return out;
}

Chi2Result chi2_gof(const std::vector<double>& expected, const std::vector<double>& observed) {
    if (expected.size() != observed.size() || expected.empty())
        throw std::invalid_argument("chi2_gof: bad inputs");
    Chi2Result r;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i] <= 0.0) throw std::invalid_argument("chi2_gof: nonpositive expected count");
        const double d = observed[i] - expected[i];
        r.statistic += d * d / expected[i];
    }
    r.df = static_cast<double>(expected.size() - 1);
    r.p_value = chi2_sf(r.statistic, r.df);
    return r;
}

}  // namespace ladder
