#include "bornwalk/detect.hpp"

#include <cmath>

namespace bornwalk {

namespace {

constexpr double kZeroComponent = 1e-15;

bool has_zero_component(const Amplitudes& c0) {
    for (int i = 0; i < c0.dim(); ++i) {
        if (std::abs(c0[i]) < kZeroComponent) return true;
    }
    return false;
}

// worst element distance of row k from e^{i theta} c0^dagger
double row_residual(const CMatrix& u, int k, const Amplitudes& c0, double theta,
                    bool reduce_zero) {
    const int n = c0.dim();
    const Complex rot = std::polar(1.0, theta);
    double worst = std::abs(std::abs(u(k, k)) - std::abs(c0[k]));
    for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        if (reduce_zero && std::abs(c0[j]) < kZeroComponent) {
            worst = std::max(worst, std::abs(u(k, j)));
        } else {
            worst = std::max(worst, std::abs(u(k, j) - rot * std::conj(c0[j])));
        }
    }
    return worst;
}

} // namespace

void DetectionConfig::validate(int n) const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("DetectionConfig: epsilon must lie in (0, 1)");
    }
    if (per_eigenstate_epsilon) {
        if (static_cast<int>(per_eigenstate_epsilon->size()) != n) {
            throw std::invalid_argument(
                "DetectionConfig: per-eigenstate epsilon list must have N entries");
        }
        for (double e : *per_eigenstate_epsilon) {
            if (!(e > 0.0)) {
                throw std::invalid_argument("DetectionConfig: per-eigenstate epsilon <= 0");
            }
        }
    }
}

std::optional<double> match_row(const CMatrix& u, int k, const Amplitudes& c0, double eps,
                                bool reduce_zero_components) {
    const int n = c0.dim();
    const double ck = std::abs(c0[k]);
    if (ck < kZeroComponent) {
        if (!reduce_zero_components) {
            throw std::invalid_argument("match_row: zero component in c0 (enable the "
                                        "zero-component reduction to allow this)");
        }
        return std::nullopt; // theta undefined; such rows are never accepted
    }
    const double half = eps / 2.0;
    if (std::abs(std::abs(u(k, k)) - ck) > half) return std::nullopt;
    const double theta = std::arg(u(k, k)) + std::arg(c0[k]); // arg(U_kk) - arg(c0_k^*)
    const Complex rot = std::polar(1.0, theta);
    const double half_sq = half * half;
    for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        const double cj = std::abs(c0[j]);
        if (cj < kZeroComponent) {
            if (!reduce_zero_components) {
                throw std::invalid_argument("match_row: zero component in c0 (enable the "
                                            "zero-component reduction to allow this)");
            }
            if (std::norm(u(k, j)) > half_sq) return std::nullopt;
        } else if (std::norm(u(k, j) - rot * std::conj(c0[j])) > half_sq) {
            return std::nullopt;
        }
    }
    return theta;
}

DetectionOutcome detect(const CMatrix& u, const Amplitudes& c0, const DetectionConfig& cfg) {
    const int n = c0.dim();
    cfg.validate(n);
    if (!cfg.reduce_zero_components && has_zero_component(c0)) {
        throw std::invalid_argument("detect: c0 has zero components (enable the "
                                    "zero-component reduction to allow this)");
    }
    DetectionOutcome out;
    out.residuals.assign(static_cast<std::size_t>(n), 0.0);
    if (cfg.criterion == DetectionCriterion::Amplitude) {
        const CVector y = u * c0.coeffs();
        for (int k = 0; k < n; ++k) {
            const double w = std::norm(y(k));
            out.residuals[static_cast<std::size_t>(k)] = std::max(0.0, 1.0 - w);
            if (!out.hit && w >= 1.0 - cfg.eps_for(k)) {
                out.hit = k;
                out.theta = std::arg(y(k));
            }
        }
        return out;
    }
    for (int k = 0; k < n; ++k) {
        if (std::abs(c0[k]) < kZeroComponent) {
            out.residuals[static_cast<std::size_t>(k)] = 1.0;
            continue;
        }
        const double theta_k = std::arg(u(k, k)) + std::arg(c0[k]);
        out.residuals[static_cast<std::size_t>(k)] =
            row_residual(u, k, c0, theta_k, cfg.reduce_zero_components);
        if (!out.hit) {
            const auto theta = match_row(u, k, c0, cfg.eps_for(k), cfg.reduce_zero_components);
            if (theta) {
                out.hit = k;
                out.theta = *theta;
            }
        }
    }
    return out;
}

std::optional<int> detect_hit(const CMatrix& u, const Amplitudes& c0,
                              const DetectionConfig& cfg) {
    const int n = c0.dim();
    if (cfg.criterion == DetectionCriterion::Amplitude) {
        const CVector y = u * c0.coeffs();
        for (int k = 0; k < n; ++k) {
            if (std::norm(y(k)) >= 1.0 - cfg.eps_for(k)) return k;
        }
        return std::nullopt;
    }
    for (int k = 0; k < n; ++k) {
        if (std::abs(c0[k]) < kZeroComponent) continue;
        if (match_row(u, k, c0, cfg.eps_for(k), cfg.reduce_zero_components)) return k;
    }
    return std::nullopt;
}

} // namespace bornwalk
