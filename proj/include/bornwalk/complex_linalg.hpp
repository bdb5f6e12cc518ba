#pragma once

#include "bornwalk/rng.hpp"
#include "bornwalk/types.hpp"

namespace bornwalk {

// Normalized complex coefficient vector in the measurement eigenbasis.
class Amplitudes {
public:
    // Requires sum |c_i|^2 = 1 within 1e-12; throws otherwise.
    explicit Amplitudes(CVector coeffs);

    // Builds from squared magnitudes (zero phases), normalizing exactly.
    static Amplitudes from_probabilities(const std::vector<double>& probs);

    int dim() const { return static_cast<int>(coeffs_.size()); }
    const CVector& coeffs() const { return coeffs_; }
    Complex operator[](int i) const { return coeffs_(i); }

private:
    CVector coeffs_;
};

// max-norm of M M^dag - I; 0 iff M unitary. Throws on non-square input.
double unitarity_defect(const CMatrix& m);

// max-norm of M - M^dag.
double hermiticity_defect(const CMatrix& m);

// Haar-distributed N x N unitary: QR of a complex Gaussian matrix with the
// R-diagonal phase correction that makes the distribution exactly Haar.
CMatrix haar_sample(int n, Rng& rng);

// Hermitian V with exp(-i V dt) U_from = U_to, via the principal log of the
// transfer matrix (eigendecomposition of a normal matrix; hbar = 1).
// Throws NumericalError ("step too large") when the transfer matrix has an
// eigenvalue at -1, and std::invalid_argument when inputs are not unitary
// within `unitary_tol`.
CMatrix hermitian_generator(const CMatrix& u_from, const CMatrix& u_to, double dt,
                            double unitary_tol = 1e-10);

// exp(-i H t) for Hermitian H, by eigendecomposition.
CMatrix expm_i_hermitian(const CMatrix& h, double t);

} // namespace bornwalk
