#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bornwalk/detect.hpp"
#include "bornwalk/stats.hpp"
#include "bornwalk/walk.hpp"

namespace bornwalk {

struct TrialResult {
    std::optional<int> hit;
    std::optional<double> t_hit;
    std::int64_t steps = 0;
};

struct RatioEstimate {
    int num = 0; // eigenstate indices (0-based)
    int den = 0;
    double value = 0.0;
    Interval ci;
};

struct ExperimentSummary {
    std::string mode;                 // "first-hit" or "ensemble"
    int dim = 0;
    double epsilon = 0.0;
    std::int64_t totals = 0;
    std::vector<std::int64_t> counts; // per-eigenstate hits
    std::int64_t no_hit = 0;
    std::int64_t failures = 0;        // constructor failures, excluded from counts
    std::int64_t double_accept = 0;   // samples accepted by more than one row
    std::vector<double> probabilities;
    std::vector<Interval> probability_ci; // 95% Wilson
    std::vector<RatioEstimate> ratios;    // all pairs m < n
    std::uint64_t seed = 0;
    int threads = 1;
    // first-hit extras
    double mean_t_hit = 0.0;
    double median_t_hit = 0.0;
};

// One walk per trial from the identity, stopped at the first detection (the
// initial state is checked too) or at t_max.
ExperimentSummary run_first_hit(const Amplitudes& c0, const WalkConfig& walk_cfg,
                                const DetectionConfig& detect_cfg, std::int64_t trials,
                                int threads = 1);

// i.i.d. stationary parameter draws, realized and fed to detection; the
// epsilon -> 0 first-hit law estimated by conditioning on detection.
ExperimentSummary run_ensemble(const Amplitudes& c0, const DetectionConfig& detect_cfg,
                               std::int64_t samples, std::uint64_t seed, int threads = 1);

struct ComponentEstimate {
    double estimate = 0.0;
    Interval ci;
    std::int64_t accepted = 0;
    std::int64_t samples = 0;
    bool starved = false; // conditioning produced < 100 accepted draws
};

// Fraction of uniform-disk draws with | |z| - c_mag | <= eps/2. Compare to
// 2 c_mag eps. Requires the ring to fit inside the disk.
ComponentEstimate estimate_p1(double c_mag, double eps, std::int64_t samples,
                              std::uint64_t seed);

// Among draws conditioned on the ring, fraction inside the disk of diameter
// eps centered at c_mag e^{i theta_target}. Compare to eps / (8 c_mag).
ComponentEstimate estimate_p_phi(double c_mag, double eps, std::int64_t samples,
                                 std::uint64_t seed, double theta_target = 0.0);

struct ScalingPoint {
    double epsilon = 0.0;
    std::int64_t samples = 0;
    std::int64_t count = 0; // eigenstate-1 hits
    double probability = 0.0;
    Interval ci;
    bool starved = false;
};
struct ScalingStudy {
    std::vector<ScalingPoint> points; // ordered by descending epsilon
    SlopeFit fit;                     // log P vs log eps
};
// Log-log fit of the eigenstate-1 ensemble probability over a decreasing
// epsilon grid (>= 3 points).
ScalingStudy scaling_study(const Amplitudes& c0, const std::vector<double>& eps_grid,
                           std::int64_t samples_per_eps, std::uint64_t seed,
                           int threads = 1);

struct MomentReport {
    double mean = 0.0;
    double se = 0.0;
};
struct HaarComparison {
    int dim = 0;
    std::int64_t samples = 0;
    std::vector<MomentReport> parameterized_diag_sq; // E[|U_kk|^2], realized matrices
    std::vector<MomentReport> haar_diag_sq;          // E[|U_kk|^2], Haar samples
};
HaarComparison haar_compare(int n, std::int64_t samples, std::uint64_t seed, int threads = 1);

struct LastRowStats {
    int dim = 0;
    std::int64_t samples = 0;
    std::vector<MomentReport> row_sq;   // E[u_Nj^2] per column j
    double u_nn_sq_mean = 0.0;
    double u_nn_sq_se = 0.0;
    std::vector<double> xi_chi2_pvalues; // uniformity per xi phase
};
LastRowStats last_row_stats(int n, std::int64_t samples, std::uint64_t seed, int threads = 1);

struct ShortTimePoint {
    double horizon = 0.0;
    std::vector<std::int64_t> counts;
    double no_hit_fraction = 0.0;
};
struct ShortTimeProfile {
    std::vector<ShortTimePoint> points; // ascending horizons
    std::int64_t trials = 0;
};
// First-hit counts per horizon, from one set of walks run to the largest
// horizon (cumulative, so the no-hit fraction is nonincreasing by
// construction).
ShortTimeProfile short_time_profile(const Amplitudes& c0, const WalkConfig& walk_cfg,
                                    const DetectionConfig& detect_cfg,
                                    const std::vector<double>& t_grid, std::int64_t trials,
                                    int threads = 1);

} // namespace bornwalk
