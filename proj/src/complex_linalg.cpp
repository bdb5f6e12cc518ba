#include "bornwalk/complex_linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace bornwalk {

Amplitudes::Amplitudes(CVector coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 1) throw std::invalid_argument("Amplitudes: empty vector");
    const double norm2 = coeffs_.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-12) {
        throw std::invalid_argument("Amplitudes: squared norm deviates from 1 by more than 1e-12");
    }
}

Amplitudes Amplitudes::from_probabilities(const std::vector<double>& probs) {
    CVector c(static_cast<Eigen::Index>(probs.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < 0.0) throw std::invalid_argument("Amplitudes: negative probability");
        sum += probs[i];
    }
    if (sum <= 0.0) throw std::invalid_argument("Amplitudes: zero probability vector");
    for (std::size_t i = 0; i < probs.size(); ++i) {
        c(static_cast<Eigen::Index>(i)) = Complex(std::sqrt(probs[i] / sum), 0.0);
    }
    return Amplitudes(std::move(c));
}

double unitarity_defect(const CMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("unitarity_defect: non-square matrix");
    CMatrix g = m * m.adjoint();
    g.diagonal().array() -= Complex(1.0, 0.0);
    return g.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermiticity_defect: non-square matrix");
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix haar_sample(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("haar_sample: N >= 1 required");
    CMatrix z(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            z(i, j) = rng.complex_normal();
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // phase correction: Q <- Q diag(r_jj / |r_jj|)
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        const double ad = std::abs(d);
        q.col(j) *= (ad > 0.0) ? d / ad : Complex(1.0, 0.0);
    }
    return q;
}

CMatrix hermitian_generator(const CMatrix& u_from, const CMatrix& u_to, double dt,
                            double unitary_tol) {
    if (dt <= 0.0) throw std::invalid_argument("hermitian_generator: dt must be positive");
    if (unitarity_defect(u_from) > unitary_tol || unitarity_defect(u_to) > unitary_tol) {
        throw std::invalid_argument("hermitian_generator: inputs not unitary within tolerance");
    }
    const CMatrix w = u_to * u_from.adjoint();
    // W is unitary (normal); its Schur form is diagonal with unimodular
    // eigenvalues, so V = Q diag(-arg(lambda)/dt) Q^dag is Hermitian exactly.
    Eigen::ComplexSchur<CMatrix> schur(w);
    if (schur.info() != Eigen::Success) {
        throw NumericalError("hermitian_generator: Schur decomposition failed");
    }
    const auto& q = schur.matrixU();
    const auto& t = schur.matrixT();
    const int n = static_cast<int>(w.rows());
    Eigen::VectorXd omega(n);
    for (int j = 0; j < n; ++j) {
        const Complex lam = t(j, j);
        if (std::abs(lam + Complex(1.0, 0.0)) < 1e-9) {
            throw NumericalError(
                "hermitian_generator: transfer matrix has an eigenvalue at -1 "
                "(log branch cut); step too large");
        }
        omega(j) = -std::arg(lam) / dt;
    }
    CMatrix v = q * omega.asDiagonal() * q.adjoint();
    return 0.5 * (v + v.adjoint());
}

CMatrix expm_i_hermitian(const CMatrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericalError("expm_i_hermitian: eigendecomposition failed");
    }
    const int n = static_cast<int>(h.rows());
    CVector phase(n);
    for (int j = 0; j < n; ++j) {
        phase(j) = std::polar(1.0, -es.eigenvalues()(j) * t);
    }
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace bornwalk
