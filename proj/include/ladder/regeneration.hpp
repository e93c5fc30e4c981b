#pragma once

#include <cstdint>
#include <vector>

#include "ladder/estimators.hpp"
#include "ladder/walk.hpp"
#include "ladder/window.hpp"

namespace ladder {

/// Every floor(1/lambda)-th pre-regeneration point, anchored so that index
/// 0 is the first point with x >= 0.
std::vector<int> lambda_prereg_points(const std::vector<int>& prereg_xs, double lambda);

/// Confirmed lambda-regenerations of one trajectory. The final candidate
/// of a finite path can never be confirmed; it is recorded but excluded
/// from gap statistics (censoring).
struct RegenRecord {
    double lambda = 0.0;
    std::vector<int64_t> taus;  // step indices, ascending; last is censored
    std::vector<int> rhos;      // walk x-positions at the taus
    bool censored_last = false;

    std::size_t usable() const {
        return censored_last && !taus.empty() ? taus.size() - 1 : taus.size();
    }
    /// Inter-regeneration gaps among usable points (the segment before the
    /// first regeneration never enters here).
    std::vector<std::pair<int64_t, int>> gaps() const;
};

/// Literal forward scan of the definition: a candidate at step k is a
/// first visit to a lambda-pre-regeneration vertex after the previous
/// regeneration, confirmed only if the remaining path never visits a
/// lambda-pre-regeneration vertex strictly left of X_k.
RegenRecord detect_regenerations(const Trajectory& traj, const WindowConfig& w, double lambda,
                                 const std::vector<int>& lambda_points);

/// Renewal-formula speed estim: ratio of mean rho-gap to mean tau-gap over
/// gaps k >= 2, with nonoverlapping batch means (batch >= 2) for the
/// 1-dependent gap sequence. batch = 0 picks a size automatically.
EstimateCI speed_regen(const std::vector<RegenRecord>& records, std::size_t batch = 0);

struct TailReport {
    double slope = 0.0;     // fitted slope of log P(gap >= n) vs n
    double slope_se = 0.0;
    double c = 0.0;         // -slope / lambda
    double lag1_corr = 0.0;
    double lag2_corr = 0.0;
    double corr_se = 0.0;
    int min_gap = 0;
    std::size_t n_gaps = 0;
};

/// Exponential-tail and 1-dependence diagnostics on pooled rho-gaps.
TailReport regen_tail_diagnostic(const std::vector<RegenRecord>& records);

}  // namespace ladder
