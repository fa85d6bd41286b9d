#pragma once

#include <vector>

#include "rmtrans/model.hpp"
#include "rmtrans/types.hpp"

namespace rmtrans {

// ------------------------------ domain types --------------------------------

// Full multichannel S(E): side-1 channels first, then side-2 channels.
struct ScatteringMatrix {
    CMatrix s;       // (Lambda1+Lambda2) square, unitary and symmetric
    double energy = 0.0;
    Index n_channels_1 = 0;
    Index n_channels_2 = 0;

    Index n_channels() const { return n_channels_1 + n_channels_2; }
    // channel index -> side (1 or 2) and offset within that side
    int side_of(Index channel) const { return channel < n_channels_1 ? 1 : 2; }
    Index offset_of(Index channel) const {
        return channel < n_channels_1 ? channel : channel - n_channels_1;
    }

    CMatrix aa_block() const { return s.topLeftCorner(n_channels_1, n_channels_1); }
    CMatrix ab_block() const { return s.topRightCorner(n_channels_1, n_channels_2); }
    CMatrix ba_block() const { return s.bottomLeftCorner(n_channels_2, n_channels_1); }
    CMatrix bb_block() const { return s.bottomRightCorner(n_channels_2, n_channels_2); }
};

double unitarity_defect(const CMatrix& s);  // max |S^dag S - I|
double symmetry_defect(const CMatrix& s);   // max |S - S^T|

// Propagators of one realization at one energy; gtr_exact is the transition
// propagator dressed by both spaces and is realization dependent.
struct GreenFunctions {
    CMatrix g1;
    CMatrix g2;
    CMatrix gtr_exact;
};

struct TransmissionCoefficients {
    std::vector<double> t_values;   // per channel, in [0, 1]
    double sum_t = 0.0;
};

// Everything the ensemble driver consumes at one (realization, energy).
struct EnergyScattering {
    ScatteringMatrix full;
    CMatrix s1;   // decoupled side-1 backscattering (V = 0)
    CMatrix s2;   // decoupled side-2 backscattering
};

// ------------------------------- operations ---------------------------------

// S(E) = 1 - 2 pi i W^T D^{-1}(E) W over the full (2n+k)-dimensional
// propagator, computed by linear solves against D(E); D^{-1} is never formed.
// Throws SingularPropagator if the solve residual exceeds 1e-8.
ScatteringMatrix s_matrix_direct(const RealizationModel& model, double energy);

// Transmission block via the block identity
// S_ab = -2 pi i W_a G1 V1 G_tr V2^T G2 W_b with the exact G_tr; equals the
// corresponding block of s_matrix_direct up to roundoff.
CMatrix s_ab_resummed(const RealizationModel& model, double energy);

// Backscattering of one side with the transition coupling switched off.
CMatrix decoupled_backscatter(const RealizationModel& model, double energy, int side);

// Same, for a bare (h, w) pair; used by the single-sided Monte Carlo checks.
CMatrix backscatter(const Matrix& h, const ChannelMatrix& w, double energy);

// Full S assembled from the side propagators and the exact G_tr, plus the
// decoupled backscattering matrices from the same factorizations. Identical
// to s_matrix_direct up to roundoff at a quarter of the cost, which is what
// the ensemble sweep wants.
EnergyScattering scattering_at(const RealizationModel& model, double energy);

// Side propagators as explicit matrices (test and diagnostic use).
GreenFunctions green_functions(const RealizationModel& model, double energy);

// T = 1 - |<S_diag>|^2, clamped to [0, 1].
TransmissionCoefficients transmission_from_average(const std::vector<Complex>& avg_diag);

// Band-center single-channel transmission 4x/(1+x)^2, x = pi v^2 / lambda.
// Cross-check oracle only; the ensemble estimates T from its own averages.
double transmission_analytic_oracle(double v_sq, double lambda);

}  // namespace rmtrans
