#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmtrans/model.hpp"
#include "rmtrans/scattering.hpp"
#include "rmtrans/transition.hpp"
#include "rmtrans/types.hpp"

namespace rmtrans {

// ----------------------------- configuration --------------------------------

struct EnsembleConfig {
    ModelConfig model;
    Index n_realizations = 200;
    std::vector<double> energy_grid;   // sorted, |E| <= 0.5 lambda
    bool resample_frames = true;       // redraw left frames per realization
    std::uint64_t master_seed = 42;
    unsigned worker_hint = 0;          // 0 = hardware concurrency

    std::vector<std::string> validate() const;  // throws ValidationError, returns warnings
};

// Mean and jackknife error of one averaged observable.
struct EnsembleStats {
    double mean = 0.0;
    double std_error = 0.0;
    Index n = 0;
};

// ------------------------------ sweep result --------------------------------

// Per-energy Monte Carlo transmission with its analytic counterpart.
// Matrices are indexed (channel a, channel b).
struct TransmissionCurve {
    std::vector<double> energies;
    std::vector<Matrix> p_mc;        // <|S_ab|^2>
    std::vector<Matrix> p_err;       // jackknife standard error of p_mc
    std::vector<Matrix> p_analytic;  // factorized prediction (T_a/sumT) Y (T_b/sumT)
    std::vector<CMatrix> s_mean;     // <S_ab>
    std::vector<TransmissionCoefficients> t1;  // per energy, from decoupled averages
    std::vector<TransmissionCoefficients> t2;
    std::vector<double> y;            // transport factor, resonance form
    std::vector<double> y_isolated;   // Lorentzian (diagonal) part
    std::vector<double> y_cross;      // interference part; diagonal + cross = y
    ResonanceSet resonances;
    Index n_used = 0;
    Index n_skipped = 0;
};

// Samples n_realizations models, sweeps the energy grid, accumulates channel
// averages, and evaluates the deterministic analytic curve. Realizations run
// in parallel; the reduction is a fixed-order pass over stored per-realization
// records, so the result is identical for any worker count. Realizations whose
// S-matrix fails the unitarity/symmetry gate (1e-10) or whose propagator solve
// fails are skipped; more than 1% skips is an error.
TransmissionCurve run_ensemble(const EnsembleConfig& cfg);

// ------------------------------ check reports -------------------------------

// |<S_ab>|^2 / <|S_ab|^2> per pair, pooled over the energy grid. The average
// transmission amplitude should vanish while the probability stays finite.
struct VanishingAmplitudeReport {
    Matrix rho;            // per pair
    double max_rho = 0.0;
    double pooled_rho = 0.0;  // pooled over pairs and energies
    bool applicable = true;   // false when the probability itself is ~ 0
    double threshold = 0.05;
    bool pass = false;
};

VanishingAmplitudeReport vanishing_amplitude_check(const TransmissionCurve& curve);

// Decoupled one-sided run confronting <|S1_aa'|^2> with T_a T_a' / sum T for
// a != a'. Deviations are averaged over the config's energy grid.
struct FactorizationReport {
    Matrix deviation;          // relative deviation per ordered pair, NaN on diagonal
    double max_abs_deviation = 0.0;
    double mean_deviation = 0.0;
    std::vector<double> t_mean;   // grid-averaged transmission coefficients
    double sum_t = 0.0;
    double threshold = 0.10;
    bool pass = false;
};

FactorizationReport factorization_check(const EnsembleConfig& cfg);

// Ensemble average of the side-1 propagator at band center: diagonal entries
// against -i/lambda, off-diagonal entries against zero.
struct GreenCenterReport {
    Complex diag_mean{0.0, 0.0};
    double deviation = 0.0;        // |diag_mean + i/lambda|
    double tolerance = 0.0;        // 0.05 / lambda
    bool diag_pass = false;
    double offdiag_abs_mean = 0.0;
    double offdiag_threshold = 0.0;  // 3 * standard error
    bool offdiag_pass = false;
    Index n = 0;
};

GreenCenterReport green_center_check(const EnsembleConfig& cfg);

// Monte Carlo estimate of the channel-resonance correlator
// X_{a,m'm''} = 2 pi < (W G1 o_m')_a (W G1 o_m'')_a^* > at band center,
// against the factorized prediction (1/lambda) T_a / sum T. The measured
// diagonal, the prediction, their ratio, and the off-diagonal magnitudes are
// all reported; ratio_mean is the headline number.
struct CorrelatorReport {
    Matrix x_diag;             // (channel, probe) measured diagonal
    std::vector<double> x_pred;   // per channel
    double ratio_mean = 0.0;      // measured / predicted, averaged
    double ratio_std_error = 0.0;
    double offdiag_over_pred = 0.0;  // |X_{m'm''}|, m' != m'', relative to prediction
    double offdiag_3se = 0.0;        // 3 standard errors in the same units
    bool offdiag_pass = false;       // consistent with the Kronecker delta structure
    Index n = 0;
};

CorrelatorReport correlator_check(const EnsembleConfig& cfg, Index n_probes);

}  // namespace rmtrans
