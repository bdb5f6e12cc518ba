#include "bornwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bornwalk/types.hpp"

namespace bornwalk {

namespace {
constexpr double kZ95 = 1.959963984540054;

// Regularized incomplete gamma P(a,x) by series (x < a+1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized incomplete gamma Q(a,x) by continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}
} // namespace

void MeanVar::merge(const MeanVar& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * nb / (na + nb);
    m2_ += o.m2_ + d * d * na * nb / (na + nb);
    n_ += o.n_;
}

double MeanVar::std_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

Interval wilson_interval(std::int64_t successes, std::int64_t total) {
    if (total <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kZ95 * kZ95;
    const double den = 1.0 + z2 / n;
    const double ctr = (p + z2 / (2.0 * n)) / den;
    const double hw = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
    return {std::max(0.0, ctr - hw), std::min(1.0, ctr + hw)};
}

Interval ratio_interval(std::int64_t c1, std::int64_t c2) {
    if (c1 <= 0 || c2 <= 0) {
        return {0.0, std::numeric_limits<double>::infinity()};
    }
    const double r = static_cast<double>(c1) / static_cast<double>(c2);
    const double slog = std::sqrt(1.0 / static_cast<double>(c1) + 1.0 / static_cast<double>(c2));
    return {r * std::exp(-kZ95 * slog), r * std::exp(kZ95 * slog)};
}

double ks_uniform_statistic(std::vector<double> s) {
    if (s.empty()) return 0.0;
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(s[i] - lo, hi - s[i]));
    }
    return d;
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

double chi2_sf(double x, int dof) {
    if (dof <= 0) throw std::invalid_argument("chi2_sf: dof must be positive");
    return gamma_q(0.5 * dof, 0.5 * x);
}

double chi2_uniform_phases_pvalue(const std::vector<double>& phases, int bins) {
    if (bins < 2 || phases.size() < static_cast<std::size_t>(5 * bins)) {
        throw std::invalid_argument("chi2_uniform_phases_pvalue: too few samples or bins");
    }
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (double ph : phases) {
        double u = ph / kTwoPi;
        u -= std::floor(u);
        auto b = static_cast<std::size_t>(u * bins);
        if (b >= counts.size()) b = counts.size() - 1;
        ++counts[b];
    }
    const double expect = static_cast<double>(phases.size()) / bins;
    double chi2 = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expect;
        chi2 += d * d / expect;
    }
    return chi2_sf(chi2, bins - 1);
}

SlopeFit wls_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& var_y) {
    if (x.size() != y.size() || x.size() != var_y.size() || x.size() < 2) {
        throw std::invalid_argument("wls_line_fit: need >=2 points with matching sizes");
    }
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / std::max(var_y[i], 1e-300);
        sw += w;
        swx += w * x[i];
        swy += w * y[i];
        swxx += w * x[i] * x[i];
        swxy += w * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    SlopeFit f;
    f.slope = (sw * swxy - swx * swy) / det;
    f.intercept = (swxx * swy - swx * swxy) / det;
    f.slope_se = std::sqrt(sw / det);
    return f;
}

} // namespace bornwalk
