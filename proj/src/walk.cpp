#include "bornwalk/walk.hpp"

#include <cmath>
#include <ostream>

namespace bornwalk {

namespace {

double wrap_phase(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    if (y >= kTwoPi) y -= kTwoPi;
    return y;
}

// radial fold at the unit circle, total for any overshoot (triangle wave)
double fold_radius(double r) {
    double m = std::fmod(r, 2.0);
    if (m < 0.0) m += 2.0;
    return m <= 1.0 ? m : 2.0 - m;
}

} // namespace

void WalkConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("WalkConfig: dt must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("WalkConfig: sigma must be positive");
    if (!(t_max >= 0.0)) throw std::invalid_argument("WalkConfig: t_max must be nonnegative");
}

BoxOneParams initial_params(int n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("initial_params: N >= 2 required");
    BoxOneParams p;
    p.dim = n;
    p.diag.assign(static_cast<std::size_t>(n - 1), Complex(1.0, 0.0));
    p.offdiag_phases.resize(static_cast<std::size_t>((n - 1) * (n - 1)));
    for (auto& ph : p.offdiag_phases) ph = rng.phase();
    p.last_diag_phase = 0.0;
    return p;
}

void step_inplace(BoxOneParams& params, double sd, Rng& rng) {
    for (auto& z : params.diag) {
        z += Complex(sd * rng.normal(), sd * rng.normal());
        const double r = std::abs(z);
        if (r > 1.0) {
            z *= fold_radius(r) / r;
        }
    }
    for (auto& ph : params.offdiag_phases) {
        ph = wrap_phase(ph + sd * rng.normal());
    }
    params.last_diag_phase = wrap_phase(params.last_diag_phase + sd * rng.normal());
}

BoxOneParams step(const BoxOneParams& params, const WalkConfig& cfg, Rng& rng) {
    cfg.validate();
    BoxOneParams next = params;
    step_inplace(next, cfg.sigma * std::sqrt(cfg.dt), rng);
    return next;
}

WalkTrajectory run_walk(int n, const WalkConfig& cfg, bool materialize) {
    cfg.validate();
    WalkTrajectory traj;
    traj.config = cfg;
    traj.dim = n;
    const auto nsteps = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-12));
    traj.times.reserve(nsteps + 1);
    traj.states.reserve(nsteps + 1);
    Rng rng(cfg.seed);
    BoxOneParams p = initial_params(n, rng);
    traj.times.push_back(0.0);
    traj.states.push_back(p);
    const double sd = cfg.sigma * std::sqrt(cfg.dt);
    for (std::size_t k = 1; k <= nsteps; ++k) {
        step_inplace(p, sd, rng);
        traj.times.push_back(static_cast<double>(k) * cfg.dt);
        traj.states.push_back(p);
    }
    if (materialize) {
        traj.matrices.resize(traj.states.size());
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            try {
                realize_into(traj.states[k], traj.matrices[k]);
            } catch (const NumericalError& e) {
                throw NumericalError("run_walk: realization failed at step " +
                                     std::to_string(k) + ": " + e.what());
            }
        }
    }
    return traj;
}

void write_trajectory_csv(const WalkTrajectory& traj, std::ostream& os) {
    const int n = traj.dim;
    os << "t";
    for (int k = 0; k < n - 1; ++k) os << ",diag" << k + 1 << "_re,diag" << k + 1 << "_im";
    for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) os << ",phi_" << i + 1 << j + 1;
        }
    }
    os << ",phi_last";
    if (!traj.matrices.empty()) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) os << ",u" << i + 1 << j + 1 << "_re,u" << i + 1 << j + 1 << "_im";
        }
    }
    os << "\n";
    os.precision(17);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& p = traj.states[k];
        os << traj.times[k];
        for (const auto& z : p.diag) os << "," << z.real() << "," << z.imag();
        for (double ph : p.offdiag_phases) os << "," << ph;
        os << "," << p.last_diag_phase;
        if (!traj.matrices.empty()) {
            const auto& u = traj.matrices[k];
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    os << "," << u(i, j).real() << "," << u(i, j).imag();
                }
            }
        }
        os << "\n";
    }
}

} // namespace bornwalk
