#pragma once

#include <utility>
#include <vector>

#include "rmtrans/scattering.hpp"
#include "rmtrans/types.hpp"

namespace rmtrans {

// ------------------------------ domain types --------------------------------

// Non-Hermitian generator of propagation through the transition space.
// Rows of z1/z2 are the rescaled coupling vectors z_m = Z_m / sqrt(lambda).
struct EffectiveHamiltonian {
    CMatrix h_eff;   // k x k complex symmetric
    Matrix z1;       // k x k real
    Matrix z2;
};

// Complex eigenvalues E_l = eps_l - i gamma_l (sorted by real part), the
// complex orthogonal eigenframe, and the entry/exit amplitudes per resonance.
struct ResonanceSet {
    CVector eigenvalues;
    CMatrix eigenframe;     // O with O^T O = 1 (bilinear, not conjugate)
    CMatrix zeta1;          // zeta_{1,ml}
    CMatrix zeta2;
    double condition = 1.0;    // condition number of the eigenframe
    bool ill_conditioned = false;  // condition > 1e6
};

// ------------------------------- operations ---------------------------------

// z matrix (rows z_m) from singular values and the transition-side frame.
Matrix z_rows_from(const std::vector<double>& singular_values, const Matrix& right_frame,
                   double lambda);

// H_eff = H_tr - i (z1^T z1 + z2^T z2), symmetrized exactly.
EffectiveHamiltonian effective_hamiltonian(const Matrix& htr, const Matrix& z1,
                                           const Matrix& z2);

// Deterministic transition propagator (E - H_eff)^{-1}; contains no random
// elements. Throws SingularAtEnergy when E - H_eff is numerically singular
// (possible only for vanishing couplings at an H_tr eigenvalue).
CMatrix gtr_deterministic(const Matrix& htr, const Matrix& z1, const Matrix& z2,
                          double energy);

// Eigendecomposition by a complex orthogonal frame; eigenvectors are
// renormalized to v^T v = 1. Throws DefectiveMatrix when a quasi-null vector
// (|v^T v| < 1e-8) or a reconstruction failure shows the matrix is not
// orthogonally diagonalizable. Zetas are left empty.
ResonanceSet diagonalize_complex_symmetric(const CMatrix& h_eff);

// zeta_{j,ml} = sum_m' (z_{j,m})_{m'} O_{m'l}.
CMatrix resonance_amplitudes(const Matrix& z, const CMatrix& frame);

// Diagonalization plus amplitudes in one step.
ResonanceSet resonance_set(const EffectiveHamiltonian& heff);

// Transport factor through the transition space, three equivalent routes and
// the split of the resonance double sum into Lorentzian and interference
// parts (diagonal + cross == resonant).
double transport_factor_direct(const Matrix& htr, const Matrix& z1, const Matrix& z2,
                               double energy);
double transport_factor_resonant(const ResonanceSet& res, double energy);
double transport_factor_isolated(const ResonanceSet& res, double energy);
std::pair<double, double> interference_decomposition(const ResonanceSet& res, double energy);

// P_ab = (T_a / sum T) * Y(E) * (T_b / sum T).
double analytic_transmission(const TransmissionCoefficients& t1,
                             const TransmissionCoefficients& t2, const ResonanceSet& res,
                             double energy, Index channel_a, Index channel_b);

}  // namespace rmtrans
