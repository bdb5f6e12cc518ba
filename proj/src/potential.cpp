#include "bornwalk/potential.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace bornwalk {

HermitianSeries reconstruct_potential(const WalkTrajectory& traj) {
    if (traj.matrices.size() != traj.states.size() || traj.matrices.empty()) {
        throw std::invalid_argument("reconstruct_potential: trajectory not materialized");
    }
    HermitianSeries series;
    series.dt = traj.config.dt;
    const std::size_t nsteps = traj.matrices.size() - 1;
    series.times.reserve(nsteps);
    series.generators.reserve(nsteps);
    for (std::size_t n = 0; n < nsteps; ++n) {
        try {
            series.generators.push_back(
                hermitian_generator(traj.matrices[n], traj.matrices[n + 1], series.dt));
        } catch (const NumericalError& e) {
            throw NumericalError("reconstruct_potential: branch cut at step " +
                                 std::to_string(n) + " (" + e.what() +
                                 "); reduce dt or sigma");
        }
        series.times.push_back(traj.times[n]);
    }
    return series;
}

Amplitudes propagate(const Amplitudes& c0, const HermitianSeries& series) {
    CVector c = c0.coeffs();
    for (const CMatrix& v : series.generators) {
        c = expm_i_hermitian(v, series.dt) * c;
    }
    const double drift = std::abs(c.squaredNorm() - 1.0);
    if (drift > 1e-12) {
        throw NumericalError("propagate: norm drift " + std::to_string(drift) +
                             " exceeds 1e-12");
    }
    return Amplitudes(std::move(c));
}

PotentialStats potential_stats(const HermitianSeries& series, const std::vector<int>& lags) {
    PotentialStats st;
    st.autocorr_lags = lags;
    if (series.size() == 0) {
        st.autocorr.assign(lags.size(), 0.0);
        return st;
    }
    const int n = static_cast<int>(series.generators.front().rows());
    st.step_norms.reserve(series.size());
    double offdiag_sum = 0.0;
    std::size_t offdiag_count = 0;
    for (const CMatrix& v : series.generators) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(v, Eigen::EigenvaluesOnly);
        st.step_norms.push_back(es.eigenvalues().cwiseAbs().maxCoeff());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double m = std::abs(v(i, j));
                offdiag_sum += m;
                st.offdiag_max = std::max(st.offdiag_max, m);
                ++offdiag_count;
            }
        }
    }
    std::vector<double> sorted = st.step_norms;
    std::sort(sorted.begin(), sorted.end());
    st.norm_median = sorted[sorted.size() / 2];
    st.norm_max = sorted.back();
    st.offdiag_mean = offdiag_count ? offdiag_sum / static_cast<double>(offdiag_count) : 0.0;

    // entry-averaged autocorrelation of the independent real components
    const std::size_t steps = series.size();
    std::vector<std::vector<double>> channels;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            std::vector<double> re(steps), im;
            if (i != j) im.resize(steps);
            for (std::size_t t = 0; t < steps; ++t) {
                re[t] = series.generators[t](i, j).real();
                if (i != j) im[t] = series.generators[t](i, j).imag();
            }
            channels.push_back(std::move(re));
            if (i != j) channels.push_back(std::move(im));
        }
    }
    st.autocorr.assign(lags.size(), 0.0);
    for (std::size_t li = 0; li < lags.size(); ++li) {
        const auto lag = static_cast<std::size_t>(std::max(lags[li], 0));
        double acc = 0.0;
        std::size_t used = 0;
        for (const auto& ch : channels) {
            if (ch.size() <= lag + 1) continue;
            double mean = 0.0;
            for (double x : ch) mean += x;
            mean /= static_cast<double>(ch.size());
            double var = 0.0, cov = 0.0;
            for (std::size_t t = 0; t < ch.size(); ++t) {
                var += (ch[t] - mean) * (ch[t] - mean);
            }
            for (std::size_t t = 0; t + lag < ch.size(); ++t) {
                cov += (ch[t] - mean) * (ch[t + lag] - mean);
            }
            if (var > 1e-300) {
                acc += cov / var;
                ++used;
            }
        }
        st.autocorr[li] = used ? acc / static_cast<double>(used) : 0.0;
    }
    return st;
}

void write_series_csv(const HermitianSeries& series, std::ostream& os) {
    if (series.size() == 0) {
        os << "t\n";
        return;
    }
    const int n = static_cast<int>(series.generators.front().rows());
    os << "t";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) os << ",v" << i + 1 << j + 1 << "_re,v" << i + 1 << j + 1 << "_im";
    }
    os << ",op_norm\n";
    os.precision(17);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const CMatrix& v = series.generators[k];
        Eigen::SelfAdjointEigenSolver<CMatrix> es(v, Eigen::EigenvaluesOnly);
        os << series.times[k];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) os << "," << v(i, j).real() << "," << v(i, j).imag();
        }
        os << "," << es.eigenvalues().cwiseAbs().maxCoeff() << "\n";
    }
}

} // namespace bornwalk
