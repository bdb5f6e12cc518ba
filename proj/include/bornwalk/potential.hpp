#pragma once

#include <iosfwd>
#include <vector>

#include "bornwalk/complex_linalg.hpp"
#include "bornwalk/walk.hpp"

namespace bornwalk {

// Per-step Hermitian generators V_n recovered from a trajectory:
// exp(-i V_n dt) U_n = U_{n+1}. With D = I the full Hamiltonian equals this
// stochastic term.
struct HermitianSeries {
    std::vector<double> times; // start time of each step
    std::vector<CMatrix> generators;
    double dt = 0.0;

    std::size_t size() const { return generators.size(); }
};

// Builds the series from a materialized trajectory. Throws NumericalError
// naming the step when a transfer matrix sits on the log branch cut.
HermitianSeries reconstruct_potential(const WalkTrajectory& traj);

// Applies exp(-i V_n dt) sequentially to c0.
Amplitudes propagate(const Amplitudes& c0, const HermitianSeries& series);

// Descriptive statistics of the recovered generators.
struct PotentialStats {
    std::vector<double> step_norms;       // operator norm per step
    double norm_median = 0.0;
    double norm_max = 0.0;
    double offdiag_mean = 0.0;            // mean off-diagonal magnitude
    double offdiag_max = 0.0;
    std::vector<int> autocorr_lags;
    std::vector<double> autocorr;         // entry-averaged autocorrelation per lag
};
PotentialStats potential_stats(const HermitianSeries& series,
                               const std::vector<int>& lags = {1, 2, 5, 10, 20});

// CSV: t, Hermitian entries re/im row-major, per-step operator norm.
void write_series_csv(const HermitianSeries& series, std::ostream& os);

} // namespace bornwalk
