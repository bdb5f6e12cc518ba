#include "bornwalk/unitary_param.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace bornwalk {

namespace {

constexpr double kLoFloor = 1e-9;       // below this, a_k takes the closed-form branch
constexpr double kCollinearFloor = 1e-12;
constexpr double kDefectBound = 1e-9;

double wrap_2pi(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    if (y >= kTwoPi) y -= kTwoPi;
    return y;
}

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

struct N3Phases {
    double f11, f22, f33;
    double f12, f13, f21, f23;
    double d1, d2, d3; // delta_i = phi_{1i} - phi_{2i}
};

N3Phases n3_phases(const BoxOneParams& p) {
    N3Phases ph{};
    ph.f11 = std::arg(p.diag[0]);
    ph.f22 = std::arg(p.diag[1]);
    ph.f33 = p.last_diag_phase;
    ph.f12 = p.offdiag(0, 1);
    ph.f13 = p.offdiag(0, 2);
    ph.f21 = p.offdiag(1, 0);
    ph.f23 = p.offdiag(1, 2);
    ph.d1 = ph.f11 - ph.f21;
    ph.d2 = ph.f12 - ph.f22;
    ph.d3 = ph.f13 - ph.f23;
    return ph;
}

struct N3Solution {
    double u12 = 0, u13 = 0, u21 = 0, u23 = 0; // signed; u12,u13 >= 0
    std::vector<std::string> tags;
    int polish_iterations = 0;
};

// Orthonormality residuals of rows 1-2 in the four dependent magnitudes.
void n3_residual(const N3Solution& s, double a1, double a2, const N3Phases& ph,
                 Eigen::Vector4d& r) {
    r(0) = a1 * a1 + s.u12 * s.u12 + s.u13 * s.u13 - 1.0;
    r(1) = s.u21 * s.u21 + a2 * a2 + s.u23 * s.u23 - 1.0;
    const double q1 = a1 * s.u21, q2 = s.u12 * a2, q3 = s.u13 * s.u23;
    r(2) = q1 * std::cos(ph.d1) + q2 * std::cos(ph.d2) + q3 * std::cos(ph.d3);
    r(3) = q1 * std::sin(ph.d1) + q2 * std::sin(ph.d2) + q3 * std::sin(ph.d3);
}

void n3_jacobian(const N3Solution& s, double a1, double a2, const N3Phases& ph,
                 Eigen::Matrix4d& j) {
    const double c1 = std::cos(ph.d1), c2 = std::cos(ph.d2), c3 = std::cos(ph.d3);
    const double s1 = std::sin(ph.d1), s2 = std::sin(ph.d2), s3 = std::sin(ph.d3);
    j.setZero();
    j(0, 0) = 2 * s.u12;
    j(0, 1) = 2 * s.u13;
    j(1, 2) = 2 * s.u21;
    j(1, 3) = 2 * s.u23;
    j(2, 0) = a2 * c2;
    j(2, 1) = s.u23 * c3;
    j(2, 2) = a1 * c1;
    j(2, 3) = s.u13 * c3;
    j(3, 0) = a2 * s2;
    j(3, 1) = s.u23 * s3;
    j(3, 2) = a1 * s1;
    j(3, 3) = s.u13 * s3;
}

// Newton iteration from a near-solution; keeps the first-row sign convention.
void n3_polish(N3Solution& s, double a1, double a2, const N3Phases& ph) {
    Eigen::Vector4d r;
    Eigen::Matrix4d j;
    for (int it = 0; it < 6; ++it) {
        n3_residual(s, a1, a2, ph, r);
        if (r.cwiseAbs().maxCoeff() < 1e-15) break;
        n3_jacobian(s, a1, a2, ph, j);
        Eigen::PartialPivLU<Eigen::Matrix4d> lu(j);
        const Eigen::Vector4d dx = lu.solve(-r);
        if (!dx.allFinite()) break;
        s.u12 += dx(0);
        s.u13 += dx(1);
        s.u21 += dx(2);
        s.u23 += dx(3);
        ++s.polish_iterations;
    }
    s.u12 = std::max(s.u12, 0.0);
    s.u13 = std::max(s.u13, 0.0);
}

// Damped Gauss-Newton fallback for degenerate (collinear-phase) inputs.
bool n3_levenberg(N3Solution& s, double a1, double a2, const N3Phases& ph) {
    Eigen::Vector4d r;
    Eigen::Matrix4d j;
    n3_residual(s, a1, a2, ph, r);
    double cost = r.squaredNorm();
    double lambda = 1e-6;
    for (int it = 0; it < 200 && cost > 1e-28; ++it) {
        n3_jacobian(s, a1, a2, ph, j);
        const Eigen::Matrix4d jtj = j.transpose() * j;
        const Eigen::Vector4d g = j.transpose() * r;
        Eigen::Matrix4d m = jtj;
        m.diagonal().array() += lambda * (jtj.diagonal().array().maxCoeff() + 1e-30);
        const Eigen::Vector4d dx = m.ldlt().solve(-g);
        N3Solution trial = s;
        trial.u12 += dx(0);
        trial.u13 += dx(1);
        trial.u21 += dx(2);
        trial.u23 += dx(3);
        Eigen::Vector4d rt;
        n3_residual(trial, a1, a2, ph, rt);
        const double ct = rt.squaredNorm();
        if (ct < cost) {
            s = trial;
            r = rt;
            cost = ct;
            lambda = std::max(lambda / 3.0, 1e-12);
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
    }
    return cost < 1e-24 && s.u12 > -1e-12 && s.u13 > -1e-12;
}

// Cyclic sine weights: w1 e^{i d1} + w2 e^{i d2} + w3 e^{i d3} = 0 identically.
void cyclic_sines(const N3Phases& ph, double& w1, double& w2, double& w3) {
    w1 = std::sin(ph.d2 - ph.d3);
    w2 = std::sin(ph.d3 - ph.d1);
    w3 = std::sin(ph.d1 - ph.d2);
}

// Generic similar-triangle solve. The triangle family is q = t (w1, w2, w3);
// the row norms give a quadratic in t^2 whose smaller root corresponds to the
// unique nonnegative u13^2 root; computed in the cancellation-free form
// 2C/(B + sqrt(disc)).
bool n3_generic(double a1, double a2, const N3Phases& ph, N3Solution& s) {
    double w1, w2, w3;
    cyclic_sines(ph, w1, w2, w3);
    const double wmax = std::max({std::abs(w1), std::abs(w2), std::abs(w3)});
    if (wmax < kCollinearFloor) return false;
    w1 /= wmax;
    w2 /= wmax;
    w3 /= wmax;
    const double f = 1.0 - a1 * a1;
    const double g = 1.0 - a2 * a2;
    const double big_w1 = w1 / a1, big_w2 = w2 / a2;
    const double qa = big_w1 * big_w1 * big_w2 * big_w2;
    const double qb = big_w1 * big_w1 * f + big_w2 * big_w2 * g + w3 * w3;
    const double qc = f * g;
    double t2 = 0.0;
    if (qa > 1e-300) {
        const double disc = std::max(qb * qb - 4.0 * qa * qc, 0.0);
        t2 = 2.0 * qc / (qb + std::sqrt(disc));
    } else if (qb > 1e-300) {
        t2 = qc / qb;
    }
    const double tmag = std::sqrt(std::max(t2, 0.0));
    const double tsign = (std::abs(w2) > 1e-14) ? sgn(w2) : 1.0;
    const double t = tsign * tmag;
    s.u12 = tmag * std::abs(big_w2);
    s.u13 = std::sqrt(std::max(f - big_w2 * big_w2 * t2, 0.0));
    s.u21 = t * big_w1;
    const double u23sq = std::max(g - big_w1 * big_w1 * t2, 0.0);
    s.u23 = sgn(t * w3) * std::sqrt(u23sq);
    s.tags.push_back(tsign > 0 ? "t+" : "t-");
    return true;
}

// Closed-form branch for a1 ~ 0: first row collapses onto column 3.
void n3_lo1(double a2, N3Solution& s) {
    s.u12 = 0.0;
    s.u13 = 1.0;
    s.u21 = std::sqrt(std::max(1.0 - a2 * a2, 0.0));
    s.u23 = 0.0;
    s.tags.push_back("a1~0");
}

// Closed-form branch for a2 ~ 0: second row collapses onto column 3.
void n3_lo2(double a1, N3Solution& s) {
    s.u12 = std::sqrt(std::max(1.0 - a1 * a1, 0.0));
    s.u13 = 0.0;
    s.u21 = 0.0;
    s.u23 = 1.0;
    s.tags.push_back("a2~0");
}

void assemble_rows12(const BoxOneParams& p, const N3Solution& s, const N3Phases& ph,
                     CMatrix& u) {
    u.resize(3, 3);
    u(0, 0) = p.diag[0];
    u(0, 1) = std::polar(1.0, ph.f12) * s.u12;
    u(0, 2) = std::polar(1.0, ph.f13) * s.u13;
    u(1, 0) = std::polar(1.0, ph.f21) * s.u21;
    u(1, 1) = p.diag[1];
    u(1, 2) = std::polar(1.0, ph.f23) * s.u23;
}

// Third row: conjugated cross product of rows 1-2, phase-aligned so that the
// (3,3) entry carries phi_33 with a nonnegative magnitude.
void complete_row3(CMatrix& u, double f33, std::vector<std::string>* tags) {
    const Complex w0 = std::conj(u(0, 1) * u(1, 2) - u(0, 2) * u(1, 1));
    const Complex w1 = std::conj(u(0, 2) * u(1, 0) - u(0, 0) * u(1, 2));
    const Complex w2 = std::conj(u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0));
    const double nrm = std::sqrt(std::norm(w0) + std::norm(w1) + std::norm(w2));
    Complex rot(1.0, 0.0);
    if (std::abs(w2) > 1e-14) {
        rot = std::polar(1.0, f33 - std::arg(w2));
        if (tags) tags->push_back("row3+");
    } else if (tags) {
        tags->push_back("row3-phase-undefined");
    }
    u(2, 0) = w0 * rot / nrm;
    u(2, 1) = w1 * rot / nrm;
    u(2, 2) = w2 * rot / nrm;
}

void n3_build_matrix(const BoxOneParams& p, CMatrix& out, N3Solution& sol) {
    const double a1 = std::abs(p.diag[0]);
    const double a2 = std::abs(p.diag[1]);
    const N3Phases ph = n3_phases(p);

    bool have_init = false;
    if (a1 < kLoFloor) {
        n3_lo1(a2, sol);
        have_init = true;
    } else if (a2 < kLoFloor) {
        n3_lo2(a1, sol);
        have_init = true;
    } else {
        have_init = n3_generic(a1, a2, ph, sol);
    }

    if (have_init) {
        n3_polish(sol, a1, a2, ph);
        assemble_rows12(p, sol, ph, out);
        complete_row3(out, ph.f33, &sol.tags);
        if (unitarity_defect(out) <= kDefectBound) return;
    }

    // Degenerate phase configurations (or a failed polish): search sign
    // branches with a damped Gauss-Newton solve.
    const double f = 1.0 - a1 * a1;
    const double g = 1.0 - a2 * a2;
    double best_defect = std::numeric_limits<double>::infinity();
    for (int branch = 0; branch < 8; ++branch) {
        N3Solution cand;
        cand.u12 = std::sqrt(f / 2.0);
        cand.u13 = std::sqrt(f / 2.0);
        cand.u21 = ((branch & 1) ? -1.0 : 1.0) * std::sqrt(g / 2.0);
        cand.u23 = ((branch & 2) ? -1.0 : 1.0) * std::sqrt(g / 2.0);
        if (branch & 4) std::swap(cand.u12, cand.u13);
        cand.tags.push_back("gn-fallback");
        if (!n3_levenberg(cand, a1, a2, ph)) continue;
        cand.u12 = std::max(cand.u12, 0.0);
        cand.u13 = std::max(cand.u13, 0.0);
        assemble_rows12(p, cand, ph, out);
        complete_row3(out, ph.f33, &cand.tags);
        const double defect = unitarity_defect(out);
        best_defect = std::min(best_defect, defect);
        if (defect <= kDefectBound) {
            sol = cand;
            return;
        }
    }
    throw NumericalError("build_n3: construction failed; best unitarity defect " +
                         std::to_string(best_defect));
}

void n2_build_matrix(const BoxOneParams& p, CMatrix& out) {
    const double a1 = std::abs(p.diag[0]);
    const double f11 = std::arg(p.diag[0]);
    const double f12 = p.offdiag(0, 1);
    const double f22 = p.last_diag_phase;
    const double u12 = std::sqrt(std::max(1.0 - a1 * a1, 0.0));
    out.resize(2, 2);
    out(0, 0) = p.diag[0];
    out(0, 1) = std::polar(u12, f12);
    out(1, 0) = -std::polar(u12, f22 + f11 - f12);
    out(1, 1) = std::polar(a1, f22);
}

} // namespace

void BoxOneParams::validate() const {
    if (dim < 2) throw std::invalid_argument("BoxOneParams: dim >= 2 required");
    if (static_cast<int>(diag.size()) != dim - 1) {
        throw std::invalid_argument("BoxOneParams: diag must have dim-1 entries");
    }
    if (static_cast<int>(offdiag_phases.size()) != (dim - 1) * (dim - 1)) {
        throw std::invalid_argument("BoxOneParams: offdiag_phases must have (dim-1)^2 entries");
    }
    for (const Complex& z : diag) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw std::invalid_argument("BoxOneParams: non-finite diagonal entry");
        }
        if (std::abs(z) > 1.0 + 1e-9) {
            throw std::invalid_argument("BoxOneParams: diagonal entry outside the unit disk");
        }
    }
    for (double ph : offdiag_phases) {
        if (!(ph >= 0.0 && ph < kTwoPi)) {
            throw std::invalid_argument("BoxOneParams: off-diagonal phase outside [0, 2pi)");
        }
    }
    if (!(last_diag_phase >= 0.0 && last_diag_phase < kTwoPi)) {
        throw std::invalid_argument("BoxOneParams: last diagonal phase outside [0, 2pi)");
    }
}

BoxOneParams sample_stationary(int n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("sample_stationary: N >= 2 required");
    BoxOneParams p;
    p.dim = n;
    p.diag.resize(n - 1);
    p.offdiag_phases.resize(static_cast<std::size_t>((n - 1) * (n - 1)));
    for (auto& z : p.diag) z = rng.unit_disk();
    for (auto& ph : p.offdiag_phases) ph = rng.phase();
    p.last_diag_phase = rng.phase();
    return p;
}

TriangleCoefficients triangle_coefficients(double d1, double d2, double d3, double sin_floor) {
    const double den = std::sin(d3 - d2);
    if (std::abs(den) <= sin_floor) {
        // residual check: with collinear phases no similar-triangle family exists
        throw NumericalError("triangle_coefficients: no similar-triangle family "
                             "(sin(d2 - d3) vanishes)");
    }
    TriangleCoefficients c;
    c.s1 = std::sin(d1 - d3) / den;
    c.s2 = std::sin(d2 - d1) / den;
    return c;
}

RealizedUnitary build_n2(const BoxOneParams& params) {
    params.validate();
    if (params.dim != 2) throw std::invalid_argument("build_n2: dim must be 2");
    RealizedUnitary r;
    r.params = params;
    n2_build_matrix(params, r.matrix);
    const double a1 = std::abs(params.diag[0]);
    const double u12 = std::sqrt(std::max(1.0 - a1 * a1, 0.0));
    r.magnitudes.resize(2, 2);
    r.magnitudes << a1, u12, -u12, a1;
    r.xi = {wrap_2pi(params.last_diag_phase + std::arg(params.diag[0]) - params.offdiag(0, 1))};
    return r;
}

RealizedUnitary build_n3(const BoxOneParams& params) {
    params.validate();
    if (params.dim != 3) throw std::invalid_argument("build_n3: dim must be 3");
    RealizedUnitary r;
    r.params = params;
    N3Solution sol;
    n3_build_matrix(params, r.matrix, sol);
    r.branch_tags = sol.tags;
    r.polish_iterations = sol.polish_iterations;
    r.magnitudes.resize(3, 3);
    r.magnitudes << std::abs(params.diag[0]), sol.u12, sol.u13,
                    sol.u21, std::abs(params.diag[1]), sol.u23,
                    std::abs(r.matrix(2, 0)), std::abs(r.matrix(2, 1)), std::abs(r.matrix(2, 2));
    r.xi = {wrap_2pi(std::arg(r.matrix(2, 0))), wrap_2pi(std::arg(r.matrix(2, 1)))};
    return r;
}

N3RootDiagnostics n3_root_diagnostics(const BoxOneParams& params) {
    if (params.dim != 3) throw std::invalid_argument("n3_root_diagnostics: dim must be 3");
    N3RootDiagnostics diag;
    const double a1 = std::abs(params.diag[0]);
    const double a2 = std::abs(params.diag[1]);
    if (a1 < kLoFloor || a2 < kLoFloor) {
        diag.degenerate_branch = true;
        return diag;
    }
    const N3Phases ph = n3_phases(params);
    double w1, w2, w3;
    cyclic_sines(ph, w1, w2, w3);
    if (std::abs(w1) < 1e-300) {
        diag.degenerate_branch = true;
        return diag;
    }
    const double s1 = w2 / w1;
    const double s2 = w3 / w1;
    const double f = 1.0 - a1 * a1;
    const double g = 1.0 - a2 * a2;
    // discriminant of the p^2 quadratic
    const double b = f / (a1 * a1) + s1 * s1 * g / (a2 * a2) + s2 * s2;
    const double ac = (s1 / (a1 * a2)) * (s1 / (a1 * a2)) * f * g;
    diag.discriminant = b * b - 4.0 * ac;
    // selected root of the u13^2 quadratic (pre-clamp)
    const double bu = a1 * a1 * (-f / (a1 * a1) + s1 * s1 * g / (a2 * a2) + s2 * s2);
    const double cu = a1 * a1 * s2 * s2 * f;
    diag.u13_sq = 0.5 * (-bu + std::sqrt(std::max(bu * bu + 4.0 * cu, 0.0)));
    return diag;
}

GeneralBuildResult build_general(const BoxOneParams& params, const GeneralBuildOptions& opts) {
    params.validate();
    const int n = params.dim;
    if (n < 4) throw std::invalid_argument("build_general: dim >= 4 required");

    GeneralBuildResult result;

    // all-diagonal shortcut: every a_k = 1 pins the whole matrix
    bool all_ones = true;
    for (const Complex& z : params.diag) {
        if (std::abs(std::abs(z) - 1.0) > 1e-15) {
            all_ones = false;
            break;
        }
    }
    if (all_ones) {
        RealizedUnitary r;
        r.params = params;
        r.matrix = CMatrix::Zero(n, n);
        for (int k = 0; k < n - 1; ++k) r.matrix(k, k) = params.diag[k];
        r.matrix(n - 1, n - 1) = std::polar(1.0, params.last_diag_phase);
        r.magnitudes = Eigen::MatrixXd::Identity(n, n);
        r.xi.assign(static_cast<std::size_t>(n - 1), 0.0);
        r.branch_tags = {"all-diag"};
        result.realized = std::move(r);
        result.best_defect = unitarity_defect(result.realized->matrix);
        return result;
    }

    // unknown layout: magnitudes of rows 0..n-2 (off-diagonal, row-major),
    // then last-row magnitudes (n), then last-row phases xi (n-1)
    const int n_row_mags = (n - 1) * (n - 1);
    const int n_unknowns = n_row_mags + n + (n - 1);
    const int n_residuals = n * n; // n diagonal + 2 per upper pair

    auto mag_index = [&](int i, int j) { return i * (n - 1) + (j > i ? j - 1 : j); };

    auto assemble = [&](const Eigen::VectorXd& x, CMatrix& u) {
        u.resize(n, n);
        for (int i = 0; i < n - 1; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) {
                    u(i, j) = params.diag[i];
                } else {
                    u(i, j) = std::polar(1.0, params.offdiag(i, j)) * x(mag_index(i, j));
                }
            }
        }
        for (int j = 0; j < n - 1; ++j) {
            u(n - 1, j) = std::polar(1.0, x(n_row_mags + n + j)) * x(n_row_mags + j);
        }
        u(n - 1, n - 1) = std::polar(1.0, params.last_diag_phase) * x(n_row_mags + n - 1);
    };

    auto residual = [&](const CMatrix& u, Eigen::VectorXd& r) {
        int idx = 0;
        for (int i = 0; i < n; ++i) {
            r(idx++) = u.row(i).squaredNorm() - 1.0;
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const Complex gij = u.row(i).dot(u.row(j)); // conj(row_i) . row_j
                r(idx++) = gij.real();
                r(idx++) = gij.imag();
            }
        }
    };

    // derivative of entry (p,q) with respect to its unknown; magnitude
    // unknowns may be negative, so the derivative is the bare phase factor
    auto entry_derivative = [&](const CMatrix& u, int p, int q, bool phase_unknown) -> Complex {
        if (phase_unknown) return Complex(0.0, 1.0) * u(p, q);
        return std::polar(1.0, params.offdiag(p, q));
    };

    auto jacobian = [&](const CMatrix& u, const Eigen::VectorXd& x, Eigen::MatrixXd& jac) {
        jac.setZero();
        auto add_entry_effect = [&](int col, int p, int q, Complex du) {
            // row norms
            jac(p, col) += 2.0 * (std::conj(u(p, q)) * du).real();
            // orthogonality pairs involving row p at column q
            int idx = n;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (i == p) {
                        const Complex d = std::conj(du) * u(j, q);
                        jac(idx, col) += d.real();
                        jac(idx + 1, col) += d.imag();
                    }
                    if (j == p) {
                        const Complex d = std::conj(u(i, q)) * du;
                        jac(idx, col) += d.real();
                        jac(idx + 1, col) += d.imag();
                    }
                    idx += 2;
                }
            }
        };
        for (int i = 0; i < n - 1; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                add_entry_effect(mag_index(i, j), i, j, entry_derivative(u, i, j, false));
            }
        }
        for (int j = 0; j < n; ++j) {
            Complex du;
            if (j < n - 1) {
                du = std::polar(1.0, x(n_row_mags + n + j));
            } else {
                du = std::polar(1.0, params.last_diag_phase);
            }
            add_entry_effect(n_row_mags + j, n - 1, j, du);
        }
        for (int j = 0; j < n - 1; ++j) {
            add_entry_effect(n_row_mags + n + j, n - 1, j,
                             entry_derivative(u, n - 1, j, true));
        }
    };

    Rng rng(stream_seed(opts.start_seed, 0));
    CMatrix u;
    Eigen::VectorXd r(n_residuals);
    Eigen::MatrixXd jac(n_residuals, n_unknowns);
    double best_defect = std::numeric_limits<double>::infinity();
    int total_iters = 0;

    for (int start = 0; start < opts.restarts && total_iters < opts.max_total_iterations;
         ++start) {
        ++result.restarts_used;
        Eigen::VectorXd x(n_unknowns);
        for (int i = 0; i < n - 1; ++i) {
            const double a = std::abs(params.diag[i]);
            const double base = std::sqrt(std::max(1.0 - a * a, 0.0) / (n - 1));
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double v = base;
                if (start > 0) v *= 0.25 + 1.5 * rng.uniform();
                if (start > 0 && i > 0 && rng.uniform() < 0.5) v = -v;
                x(mag_index(i, j)) = v;
            }
        }
        for (int j = 0; j < n; ++j) {
            double v = 1.0 / std::sqrt(static_cast<double>(n));
            if (start > 0) v *= 0.25 + 1.5 * rng.uniform();
            if (start > 0 && rng.uniform() < 0.5) v = -v;
            x(n_row_mags + j) = v;
        }
        for (int j = 0; j < n - 1; ++j) {
            x(n_row_mags + n + j) = rng.phase();
        }

        double lambda = 1e-3;
        assemble(x, u);
        residual(u, r);
        double cost = r.squaredNorm();
        const int per_start_cap =
            std::max(200, opts.max_total_iterations / std::max(opts.restarts, 1));
        for (int it = 0; it < per_start_cap && total_iters < opts.max_total_iterations; ++it) {
            ++total_iters;
            ++result.iterations;
            jacobian(u, x, jac);
            const Eigen::MatrixXd jtj = jac.transpose() * jac;
            const Eigen::VectorXd g = jac.transpose() * r;
            Eigen::MatrixXd m = jtj;
            m.diagonal().array() += lambda * (jtj.diagonal().array().maxCoeff() + 1e-30);
            const Eigen::VectorXd dx = m.ldlt().solve(-g);
            Eigen::VectorXd xt = x + dx;
            CMatrix ut;
            assemble(xt, ut);
            Eigen::VectorXd rt(n_residuals);
            residual(ut, rt);
            const double ct = rt.squaredNorm();
            if (ct < cost) {
                x = xt;
                u = ut;
                r = rt;
                cost = ct;
                lambda = std::max(lambda / 3.0, 1e-14);
                if (cost < 1e-28) break;
            } else {
                lambda *= 4.0;
                if (lambda > 1e14) break;
            }
        }

        bool first_row_ok = true;
        for (int j = 1; j < n; ++j) {
            if (x(mag_index(0, j)) < -1e-12) {
                first_row_ok = false;
                break;
            }
        }
        const double defect = unitarity_defect(u);
        best_defect = std::min(best_defect, defect);
        if (first_row_ok && defect <= opts.defect_target) {
            RealizedUnitary real;
            real.params = params;
            real.matrix = u;
            real.magnitudes.resize(n, n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i < n - 1) {
                        real.magnitudes(i, j) =
                            (i == j) ? std::abs(params.diag[i]) : x(mag_index(i, j));
                    } else {
                        real.magnitudes(i, j) = x(n_row_mags + j);
                    }
                }
            }
            for (int j = 0; j < n - 1; ++j) {
                real.xi.push_back(wrap_2pi(x(n_row_mags + n + j)));
            }
            real.branch_tags = {"gauss-newton start " + std::to_string(start)};
            real.polish_iterations = result.iterations;
            result.realized = std::move(real);
            result.best_defect = defect;
            return result;
        }
    }
    result.best_defect = best_defect;
    return result;
}

RealizedUnitary realize(const BoxOneParams& params) {
    if (params.dim == 2) return build_n2(params);
    if (params.dim == 3) return build_n3(params);
    GeneralBuildResult r = build_general(params);
    if (!r.feasible()) {
        throw NumericalError("realize: possibly infeasible parameter set (best defect " +
                             std::to_string(r.best_defect) + ")");
    }
    return std::move(*r.realized);
}

void realize_into(const BoxOneParams& params, CMatrix& out) {
    if (params.dim == 2) {
        n2_build_matrix(params, out);
        return;
    }
    if (params.dim == 3) {
        N3Solution sol;
        n3_build_matrix(params, out, sol);
        return;
    }
    out = realize(params).matrix;
}

BoxOneParams params_from_matrix(const CMatrix& u) {
    const int n = static_cast<int>(u.rows());
    if (u.rows() != u.cols() || n < 2) {
        throw std::invalid_argument("params_from_matrix: square matrix with N >= 2 required");
    }
    BoxOneParams p;
    p.dim = n;
    p.diag.resize(n - 1);
    p.offdiag_phases.assign(static_cast<std::size_t>((n - 1) * (n - 1)), 0.0);
    for (int i = 0; i < n - 1; ++i) {
        p.diag[i] = u(i, i);
        if (std::abs(p.diag[i]) > 1.0) p.diag[i] /= std::abs(p.diag[i]); // roundoff guard
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double mag = std::abs(u(i, j));
            p.offdiag_phases[p.offdiag_index(i, j)] = (mag > 1e-14) ? wrap_2pi(std::arg(u(i, j)))
                                                                    : 0.0;
        }
    }
    p.last_diag_phase =
        (std::abs(u(n - 1, n - 1)) > 1e-14) ? wrap_2pi(std::arg(u(n - 1, n - 1))) : 0.0;
    return p;
}

} // namespace bornwalk
