#include "ladder/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "ladder/stats.hpp"

namespace ladder {

bool sigma_cauchy_schwarz_ok(const SigmaMatrix& m, double z) {
    const double bound = std::sqrt(std::max(0.0, m.s11.value) * std::max(0.0, m.s22.value));
    const double slack = z * (m.s11.se + m.s12.se + m.s22.se);
    return std::fabs(m.s12.value) <= bound + slack;
}

EstimateCI speed_direct(const std::vector<double>& xn_over_n) {
    if (xn_over_n.size() < 30)
        throw std::invalid_argument("speed_direct: need at least 30 replicas");
    const MeanSE m = mean_se(xn_over_n);
    EstimateCI e;
    e.value = m.mean;
    e.se = m.se;
    e.n_eff = static_cast<double>(m.n);
    e.method = "direct";
    return e;
}

EstimateCI speed_girsanov(const std::vector<double>& xn, const std::vector<double>& log_weights,
                          double lambda, int64_t n) {
    if (xn.size() != log_weights.size() || xn.empty())
        throw std::invalid_argument("speed_girsanov: bad inputs");
    if (lambda <= 0.0 || n <= 0)
        throw std::invalid_argument("speed_girsanov: lambda and n must be positive");
    std::vector<double> weighted(xn.size());
    double sw = 0.0, sw2 = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i) {
        const double w = std::exp(log_weights[i]);
        weighted[i] = xn[i] * w;
        sw += w;
        sw2 += w * w;
    }
    const MeanSE m = mean_se(weighted);
    const double scale = lambda * static_cast<double>(n);
    EstimateCI e;
    e.value = m.mean / scale;
    e.se = m.se / scale;
    e.n_eff = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
    e.method = "girsanov";
    e.degenerate = e.n_eff < 10.0;
    return e;
}

PathVarianceReport sigma_path_variance(const std::vector<double>& xn,
                                       const std::vector<double>& max_xk_sq, int64_t n) {
    if (xn.size() < 100)
        throw std::invalid_argument("sigma_path_variance: need at least 100 replicas");
    if (xn.size() != max_xk_sq.size())
        throw std::invalid_argument("sigma_path_variance: mismatched inputs");
    const VarianceEstimate v = variance_with_se(xn);
    PathVarianceReport rep;
    rep.var_over_n.value = v.var / static_cast<double>(n);
    rep.var_over_n.se = v.se / static_cast<double>(n);
    rep.var_over_n.n_eff = static_cast<double>(v.n);
    rep.var_over_n.method = "path-variance";
    double s = 0.0;
    for (double m : max_xk_sq) s += m;
    rep.mean_max_sq_over_n = s / static_cast<double>(max_xk_sq.size()) / static_cast<double>(n);
    return rep;
}

SigmaMatrix sigma_psi_moments(const std::vector<double>& s11_per_env,
                              const std::vector<double>& s12_per_env,
                              const std::vector<double>& s22_per_env, double kappa,
                              double kappa_se) {
    if (s11_per_env.size() != s12_per_env.size() || s11_per_env.size() != s22_per_env.size() ||
        s11_per_env.empty())
        throw std::invalid_argument("sigma_psi_moments: bad inputs");
    const double rel = kappa > 0.0 ? kappa_se / kappa : 0.0;
    SigmaMatrix out;
    const auto fill = [](EstimateCI& e, const std::vector<double>& xs, const char* tag) {
        const MeanSE m = mean_se(xs);
        e.value = m.mean;
        e.se = m.se;
        e.n_eff = static_cast<double>(m.n);
        e.method = tag;
    };
    fill(out.s11, s11_per_env, "psi-moment");
    fill(out.s12, s12_per_env, "psi-moment");
    fill(out.s22, s22_per_env, "psi-moment");
    // psi scales linearly in kappa, so s11 ~ kappa^2 and s12 ~ kappa.
    out.s11.se = std::sqrt(out.s11.se * out.s11.se +
                           (2.0 * rel * out.s11.value) * (2.0 * rel * out.s11.value));
    out.s12.se =
        std::sqrt(out.s12.se * out.s12.se + (rel * out.s12.value) * (rel * out.s12.value));
    return out;
}

}  // namespace ladder
