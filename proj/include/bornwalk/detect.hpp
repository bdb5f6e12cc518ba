#pragma once

#include <optional>
#include <vector>

#include "bornwalk/complex_linalg.hpp"
#include "bornwalk/types.hpp"

namespace bornwalk {

enum class DetectionCriterion { RowGeometric, Amplitude };

struct DetectionConfig {
    double epsilon = 0.1; // complex-plane tolerance, in (0,1)
    DetectionCriterion criterion = DetectionCriterion::RowGeometric;
    // biased-measurement hook: per-eigenstate override of epsilon
    std::optional<std::vector<double>> per_eigenstate_epsilon;
    // documented fallback for zero components of c0: rows with c_k = 0 are
    // never accepted, columns with c_j = 0 require |U_kj| <= eps/2
    bool reduce_zero_components = false;

    double eps_for(int k) const {
        if (per_eigenstate_epsilon && k < static_cast<int>(per_eigenstate_epsilon->size())) {
            return (*per_eigenstate_epsilon)[k];
        }
        return epsilon;
    }
    void validate(int n) const;
};

struct DetectionOutcome {
    std::optional<int> hit;      // 0-based eigenstate index
    double theta = 0.0;          // phase when hit
    std::vector<double> residuals; // per-row worst-element distance
};

// Row-geometric acceptance of row k against e^{i theta} c0^dagger with
// theta = arg(U_kk) - arg(c0_k^*):
//   (a) | |U_kk| - |c0_k| | <= eps/2          (ring of width eps)
//   (b) |U_kj - e^{i theta} c0_j^*| <= eps/2  for every j != k (disk of
//       diameter eps)
// Returns theta on acceptance. Requires all |c0_i| > 0 unless
// zero-component reduction is active.
std::optional<double> match_row(const CMatrix& u, int k, const Amplitudes& c0, double eps,
                                bool reduce_zero_components = false);

// Scans rows in order; the first accepted row wins. The amplitude criterion
// instead accepts k iff |(U c0)_k|^2 >= 1 - eps_k.
DetectionOutcome detect(const CMatrix& u, const Amplitudes& c0, const DetectionConfig& cfg);

// Hit-index-only fast path used by the Monte Carlo loops (no residuals).
std::optional<int> detect_hit(const CMatrix& u, const Amplitudes& c0,
                              const DetectionConfig& cfg);

} // namespace bornwalk
