#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bornwalk/complex_linalg.hpp"
#include "bornwalk/rng.hpp"
#include "bornwalk/types.hpp"

namespace bornwalk {

// Independent parameter set of the unitary parameterization:
//   - diag[k]: complex diagonal entry a_{k+1} e^{i phi_{k+1,k+1}} of rows 1..N-1,
//     constrained to the closed unit disk;
//   - offdiag_phases: phases phi_ij for rows i = 1..N-1, all columns j != i,
//     stored row-major (row 1: j = 2..N, then the diagonal-skipping order for
//     each following row);
//   - last_diag_phase: phi_NN.
// Count: 2(N-1) + (N-1)^2 + 1 = N^2 real degrees of freedom.
struct BoxOneParams {
    int dim = 0;
    std::vector<Complex> diag;
    std::vector<double> offdiag_phases;
    double last_diag_phase = 0.0;

    // index into offdiag_phases for row i, column j (0-based, i < dim-1, j != i)
    int offdiag_index(int i, int j) const { return i * (dim - 1) + (j > i ? j - 1 : j); }
    double offdiag(int i, int j) const { return offdiag_phases[offdiag_index(i, j)]; }

    void validate() const; // throws std::invalid_argument on violated invariants
};

// A parameter set together with the unitary it determines.
struct RealizedUnitary {
    BoxOneParams params;
    CMatrix matrix;
    // dependent magnitudes; diagonal entries hold a_k, last row holds u_Nj
    Eigen::MatrixXd magnitudes;
    // last-row phases xi_1 .. xi_{N-1}
    std::vector<double> xi;
    // which sign/root branches the construction took, e.g. "t+", "t-", "row3+"
    std::vector<std::string> branch_tags;
    int polish_iterations = 0;
};

// Draws every independent parameter from its stationary law: diagonal entries
// uniform over the closed unit disk, all phases uniform over [0, 2pi).
BoxOneParams sample_stationary(int n, Rng& rng);

// Solves e^{i d1} + s1 e^{i d2} + s2 e^{i d3} = 0 for the unique reals
// (s1, s2). Throws NumericalError when sin(d2 - d3) vanishes within
// `sin_floor` (collinear phases: no similar-triangle family).
struct TriangleCoefficients {
    double s1 = 0.0;
    double s2 = 0.0;
};
TriangleCoefficients triangle_coefficients(double d1, double d2, double d3,
                                           double sin_floor = 1e-9);

// N=2 closed form.
RealizedUnitary build_n2(const BoxOneParams& params);

// N=3 similar-triangle construction (unique nonnegative root for u13^2,
// Newton-polished), total on a_k in [0,1] via closed-form degenerate branches.
RealizedUnitary build_n3(const BoxOneParams& params);

// Diagnostics of the N=3 root solve, exposed for verification studies:
// discriminant of the p^2 quadratic and the selected u13^2 root before
// clamping.
struct N3RootDiagnostics {
    double discriminant = 0.0;
    double u13_sq = 0.0;
    bool degenerate_branch = false; // true when a closed-form boundary branch ran
};
N3RootDiagnostics n3_root_diagnostics(const BoxOneParams& params);

// N>=4 numerical completion: damped Gauss-Newton on the orthonormality
// residual with analytic Jacobian, multiple random restarts.
struct GeneralBuildResult {
    std::optional<RealizedUnitary> realized;
    int iterations = 0;
    int restarts_used = 0;
    double best_defect = 0.0;
    bool feasible() const { return realized.has_value(); }
};
struct GeneralBuildOptions {
    int restarts = 8;
    int max_total_iterations = 10000;
    double defect_target = 1e-8;
    std::uint64_t start_seed = 12345;
};
GeneralBuildResult build_general(const BoxOneParams& params,
                                 const GeneralBuildOptions& opts = {});

// Dispatch over N; throws NumericalError if build_general finds no solution.
RealizedUnitary realize(const BoxOneParams& params);

// Allocation-light variant for hot loops; writes the matrix only.
void realize_into(const BoxOneParams& params, CMatrix& out);

// Reads the independent parameters back off a realized matrix.
BoxOneParams params_from_matrix(const CMatrix& u);

} // namespace bornwalk
