#pragma once

#include <cstdint>
#include <vector>

namespace bornwalk {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Running mean/variance (Welford).
class MeanVar {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const MeanVar& o);
    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double std_error() const;

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Wilson 95% score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t total);

// Delta-method 95% CI for the ratio of two multinomial cell probabilities;
// var(log r) = 1/c1 + 1/c2 for counts from one sample.
Interval ratio_interval(std::int64_t c1, std::int64_t c2);

// Kolmogorov-Smirnov statistic of samples against Uniform[0,1]. Sorts a copy.
double ks_uniform_statistic(std::vector<double> samples);

// Asymptotic critical value at significance alpha=0.01: 1.628/sqrt(n).
double ks_critical_1pct(std::size_t n);

// Upper tail of the chi-square distribution: P(X > x) with `dof` degrees of
// freedom, via the regularized incomplete gamma function Q(dof/2, x/2).
double chi2_sf(double x, int dof);

// Pearson chi-square uniformity test of phases in [0, 2pi): equiprobable
// bins; returns the p-value.
double chi2_uniform_phases_pvalue(const std::vector<double>& phases, int bins);

struct SlopeFit {
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
};

// Weighted least squares line fit y = a + b x with per-point variances.
SlopeFit wls_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& var_y);

} // namespace bornwalk
