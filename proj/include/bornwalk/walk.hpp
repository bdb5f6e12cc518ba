#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bornwalk/rng.hpp"
#include "bornwalk/unitary_param.hpp"

namespace bornwalk {

enum class DiskBoundary { Reflect };
enum class PhaseWrap { Mod2Pi };

struct WalkConfig {
    double dt = 0.01;
    double sigma = 0.3;           // per-parameter step scale; increment std = sigma*sqrt(dt)
    double t_max = 100.0;
    DiskBoundary boundary = DiskBoundary::Reflect;
    PhaseWrap phase_wrap = PhaseWrap::Mod2Pi;
    std::uint64_t seed = 0;

    void validate() const; // dt > 0, sigma > 0, t_max >= 0
};

struct WalkTrajectory {
    std::vector<double> times;
    std::vector<BoxOneParams> states;
    std::vector<CMatrix> matrices; // empty unless materialized
    WalkConfig config;
    int dim = 0;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

// Identity initial condition: diagonal entries exactly 1+0i, hidden
// off-diagonal phases drawn uniform (the dependent magnitudes all vanish),
// last diagonal phase 0.
BoxOneParams initial_params(int n, Rng& rng);

// One diffusion step: isotropic Gaussian increments on the diagonal disk
// entries (radially folded at the boundary), wrapped Gaussian increments on
// all phases.
BoxOneParams step(const BoxOneParams& params, const WalkConfig& cfg, Rng& rng);

// In-place variant for hot loops.
void step_inplace(BoxOneParams& params, double sd, Rng& rng);

// Full walk from the identity; deterministic given cfg.seed.
WalkTrajectory run_walk(int n, const WalkConfig& cfg, bool materialize);

// CSV dump: t, then flattened params (diagonal entries re/im, off-diagonal
// phases row-major, last diagonal phase), then, when materialized, matrix
// entries row-major re/im interleaved.
void write_trajectory_csv(const WalkTrajectory& traj, std::ostream& os);

} // namespace bornwalk
