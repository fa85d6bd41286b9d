#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmtrans/rng.hpp"
#include "rmtrans/types.hpp"

namespace rmtrans {

// ----------------------------- configuration --------------------------------

// Every knob of the three-block model: two GOE spaces of dimension n_dim
// coupled through k_trans internal states, each space fed by open channels.
struct ModelConfig {
    Index n_dim = 400;
    Index k_trans = 3;
    double lambda = 1.0;                     // spectral scale of each GOE block
    std::vector<double> channel_strengths_1;  // v_a^2, one per channel on side 1
    std::vector<double> channel_strengths_2;  // v_b^2
    Matrix htr;                               // k x k real symmetric
    std::vector<double> sv_1;                 // coupling singular values, side 1
    std::vector<double> sv_2;
    std::uint64_t seed = 42;

    Index n_channels_1() const { return static_cast<Index>(channel_strengths_1.size()); }
    Index n_channels_2() const { return static_cast<Index>(channel_strengths_2.size()); }

    // Throws ValidationError listing every hard violation; returns soft
    // warnings (couplings not small versus lambda, internal levels away from
    // the band center) without failing.
    std::vector<std::string> validate() const;
};

Matrix htr_from_eigenvalues(const std::vector<double>& eigenvalues);

// ------------------------------ domain types --------------------------------

struct GoeSample {
    Matrix matrix;   // real symmetric n x n
    double lambda = 1.0;
};

struct ChannelMatrix {
    Matrix rows;                     // Lambda x n, row a has squared norm v_a^2
    std::vector<double> strengths;   // v_a^2

    Index n_channels() const { return rows.rows(); }
    Index space_dim() const { return rows.cols(); }
};

// One coupling block V = left_frame * diag(singular_values) * right_frame^T.
struct CouplingBlock {
    Matrix v_matrix;       // n x k
    Matrix left_frame;     // n x k, orthonormal columns
    std::vector<double> singular_values;  // k nonnegative reals
    Matrix right_frame;    // k x k orthogonal
    bool degenerate_singular_values = false;  // two values agree within 1e-8 relative

    // k x k matrix whose rows are the transition-space vectors Z_m,
    // i.e. Z = diag(sv) * right_frame^T and V = left_frame * Z.
    Matrix z_rows() const;
};

struct WidthMatrix {
    Matrix gamma;   // n x n symmetric positive semidefinite
};

// One sampled realization of the full model.
struct RealizationModel {
    GoeSample h1;
    GoeSample h2;
    Matrix htr;
    CouplingBlock v1;
    CouplingBlock v2;
    ChannelMatrix w1;
    ChannelMatrix w2;

    Index n_dim() const { return h1.matrix.rows(); }
    Index k_trans() const { return htr.rows(); }
    Index total_dim() const { return 2 * n_dim() + k_trans(); }
};

// ------------------------------- operations ---------------------------------

// Real symmetric n x n with element variances lambda^2/n off the diagonal and
// 2 lambda^2/n on it.
GoeSample sample_goe(Index n_dim, double lambda, Rng& rng);

// Lambda mutually orthogonal rows with squared norms equal to `strengths`,
// drawn isotropically. Redraws on (measure-zero) rank deficiency, throws
// RankDeficient after 3 failures.
ChannelMatrix sample_channel_matrix(Index n_dim, const std::vector<double>& strengths,
                                    Rng& rng);

// n x k matrix with orthonormal columns, isotropic over the Stiefel manifold.
Matrix random_orthonormal_frame(Index n_dim, Index k, Rng& rng);

// Compose a CouplingBlock from explicit factors (frames may be reused across
// realizations by the ensemble driver).
CouplingBlock make_coupling(const Matrix& left_frame, const std::vector<double>& singular_values,
                            const Matrix& right_frame);

// Random frames on both sides, user-specified singular values.
CouplingBlock synthesize_coupling(Index n_dim, const std::vector<double>& singular_values,
                                  Rng& rng);

// Recover frames and singular values of an arbitrary n x k coupling matrix by
// diagonalizing V V^T and V^T V and matching their spectra. Singular values are
// returned nonnegative in descending order. Throws NonDecomposable if the
// factors fail to reproduce v_matrix to 1e-10 relative.
CouplingBlock decompose_coupling(const Matrix& v_matrix);

// Gamma = 2 pi * sum_a w_a w_a^T over channel rows.
WidthMatrix width_matrix(const ChannelMatrix& w);

// Assemble the (2n+k) x (2n+k) block Hamiltonian: space 1, transition space,
// space 2 along the diagonal; V blocks between neighbours; zero corners.
Matrix assemble_full_hamiltonian(const RealizationModel& model);

// Block-diagonal width matrix of the full system (zero in transition space).
Matrix assemble_full_width(const RealizationModel& model);

// Sample an entire realization: GOE blocks, channel matrices, and couplings
// with the given transition-side data. Left frames are drawn from `rng`.
RealizationModel sample_realization(const ModelConfig& cfg, const Matrix& right_frame_1,
                                    const Matrix& right_frame_2, Rng& rng);

// Convenience overload drawing the right frames from `rng` as well.
RealizationModel sample_realization(const ModelConfig& cfg, Rng& rng);

}  // namespace rmtrans
