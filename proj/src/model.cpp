#include "rmtrans/model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmtrans/error.hpp"

namespace rmtrans {

// ----------------------------- configuration --------------------------------

std::vector<std::string> ModelConfig::validate() const {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    if (n_dim < 1) errors.push_back("n_dim must be >= 1");
    if (k_trans < 1) errors.push_back("k_trans must be >= 1");
    if (k_trans > n_dim) errors.push_back("k_trans must not exceed n_dim");
    if (!(lambda > 0.0)) errors.push_back("lambda must be positive");
    if (channel_strengths_1.empty()) errors.push_back("side 1 needs at least one channel");
    if (channel_strengths_2.empty()) errors.push_back("side 2 needs at least one channel");
    if (n_channels_1() > n_dim) errors.push_back("side 1 has more channels than n_dim");
    if (n_channels_2() > n_dim) errors.push_back("side 2 has more channels than n_dim");
    for (double v : channel_strengths_1)
        if (!(v > 0.0)) { errors.push_back("channel strengths on side 1 must be positive"); break; }
    for (double v : channel_strengths_2)
        if (!(v > 0.0)) { errors.push_back("channel strengths on side 2 must be positive"); break; }
    if (static_cast<Index>(sv_1.size()) != k_trans)
        errors.push_back("sv_1 must have k_trans entries");
    if (static_cast<Index>(sv_2.size()) != k_trans)
        errors.push_back("sv_2 must have k_trans entries");
    for (double s : sv_1)
        if (s < 0.0) { errors.push_back("sv_1 entries must be nonnegative"); break; }
    for (double s : sv_2)
        if (s < 0.0) { errors.push_back("sv_2 entries must be nonnegative"); break; }
    if (htr.rows() != k_trans || htr.cols() != k_trans)
        errors.push_back("htr must be k_trans x k_trans");
    else if (!htr.isApprox(htr.transpose(), 1e-12))
        errors.push_back("htr must be symmetric");

    if (!errors.empty()) throw ValidationError(std::move(errors));

    double sv_max = 0.0;
    for (double s : sv_1) sv_max = std::max(sv_max, s);
    for (double s : sv_2) sv_max = std::max(sv_max, s);
    if (sv_max > 0.5 * lambda)
        warnings.push_back("coupling singular values are not small versus lambda (max ratio " +
                           std::to_string(sv_max / lambda) + ")");

    Eigen::SelfAdjointEigenSolver<Matrix> es(htr, Eigen::EigenvaluesOnly);
    const double band = es.eigenvalues().cwiseAbs().maxCoeff();
    if (band > 0.5 * lambda)
        warnings.push_back("transition levels reach |E| = " + std::to_string(band) +
                           ", outside the band-center region |E| <= 0.5 lambda");
    return warnings;
}

Matrix htr_from_eigenvalues(const std::vector<double>& eigenvalues) {
    Matrix h = Matrix::Zero(static_cast<Index>(eigenvalues.size()),
                            static_cast<Index>(eigenvalues.size()));
    for (Index i = 0; i < h.rows(); ++i) h(i, i) = eigenvalues[static_cast<size_t>(i)];
    return h;
}

// ------------------------------ domain types --------------------------------

Matrix CouplingBlock::z_rows() const {
    const Index k = right_frame.rows();
    Matrix z = right_frame.transpose();
    for (Index m = 0; m < k; ++m) z.row(m) *= singular_values[static_cast<size_t>(m)];
    return z;
}

// ------------------------------- operations ---------------------------------

GoeSample sample_goe(Index n_dim, double lambda, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(n_dim, n_dim);
    for (Index j = 0; j < n_dim; ++j)
        for (Index i = 0; i < n_dim; ++i) a(i, j) = normal(rng);
    const double scale = lambda / std::sqrt(2.0 * static_cast<double>(n_dim));
    Matrix h = scale * (a + a.transpose());
    return GoeSample{std::move(h), lambda};
}

namespace {

// Thin QR with R-diagonal sign fix so the distribution is Haar and the
// factorization is rank-revealing enough to detect degenerate draws.
bool gaussian_frame(Index n, Index k, Rng& rng, Matrix& frame) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(n, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < n; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, k);
    Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Index j = 0; j < k; ++j) {
        if (std::abs(r(j, j)) < 1e-12) return false;
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    frame = std::move(q);
    return true;
}

}  // namespace

Matrix random_orthonormal_frame(Index n_dim, Index k, Rng& rng) {
    if (k > n_dim) throw DimensionMismatch("frame: k exceeds n_dim");
    if (k == 0) return Matrix::Zero(n_dim, 0);
    Matrix frame;
    for (int attempt = 0; attempt < 3; ++attempt)
        if (gaussian_frame(n_dim, k, rng, frame)) return frame;
    throw RankDeficient("orthonormalization failed 3 times");
}

ChannelMatrix sample_channel_matrix(Index n_dim, const std::vector<double>& strengths,
                                    Rng& rng) {
    const Index n_ch = static_cast<Index>(strengths.size());
    if (n_ch > n_dim) throw DimensionMismatch("more channels than space dimension");
    Matrix frame = random_orthonormal_frame(n_dim, n_ch, rng);
    Matrix rows(n_ch, n_dim);
    for (Index a = 0; a < n_ch; ++a)
        rows.row(a) = std::sqrt(strengths[static_cast<size_t>(a)]) * frame.col(a).transpose();
    return ChannelMatrix{std::move(rows), strengths};
}

CouplingBlock make_coupling(const Matrix& left_frame, const std::vector<double>& singular_values,
                            const Matrix& right_frame) {
    const Index k = left_frame.cols();
    if (static_cast<Index>(singular_values.size()) != k || right_frame.rows() != k ||
        right_frame.cols() != k)
        throw DimensionMismatch("coupling factors have inconsistent shapes");
    Matrix scaled = left_frame;
    for (Index m = 0; m < k; ++m) scaled.col(m) *= singular_values[static_cast<size_t>(m)];
    CouplingBlock block;
    block.v_matrix = scaled * right_frame.transpose();
    block.left_frame = left_frame;
    block.singular_values = singular_values;
    block.right_frame = right_frame;
    for (size_t i = 0; i < singular_values.size(); ++i)
        for (size_t j = i + 1; j < singular_values.size(); ++j) {
            const double a = singular_values[i] * singular_values[i];
            const double b = singular_values[j] * singular_values[j];
            if (std::abs(a - b) <= 1e-8 * std::max({a, b, 1e-300}))
                block.degenerate_singular_values = true;
        }
    return block;
}

CouplingBlock synthesize_coupling(Index n_dim, const std::vector<double>& singular_values,
                                  Rng& rng) {
    const Index k = static_cast<Index>(singular_values.size());
    if (k > n_dim) throw DimensionMismatch("more transition states than space dimension");
    Matrix left = random_orthonormal_frame(n_dim, k, rng);
    Matrix right = random_orthonormal_frame(k, k, rng);
    return make_coupling(left, singular_values, right);
}

CouplingBlock decompose_coupling(const Matrix& v_matrix) {
    const Index n = v_matrix.rows();
    const Index k = v_matrix.cols();
    if (n < k) throw DimensionMismatch("decompose_coupling needs n >= k");

    // Diagonalize both Gram matrices; their nonzero spectra must agree.
    Eigen::SelfAdjointEigenSolver<Matrix> small_es(v_matrix.transpose() * v_matrix);
    Eigen::SelfAdjointEigenSolver<Matrix> big_es(v_matrix * v_matrix.transpose());
    if (small_es.info() != Eigen::Success || big_es.info() != Eigen::Success)
        throw NonDecomposable("eigendecomposition failed");

    const double scale = std::max(small_es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    // Descending order.
    std::vector<Index> order(static_cast<size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return small_es.eigenvalues()(a) > small_es.eigenvalues()(b);
    });

    Matrix right(k, k);
    std::vector<double> sv(static_cast<size_t>(k));
    for (Index m = 0; m < k; ++m) {
        const double ev = std::max(small_es.eigenvalues()(order[static_cast<size_t>(m)]), 0.0);
        sv[static_cast<size_t>(m)] = std::sqrt(ev);
        right.col(m) = small_es.eigenvectors().col(order[static_cast<size_t>(m)]);
    }

    // The top-k spectrum of V V^T, also descending.
    Vector big = big_es.eigenvalues().reverse().head(k);
    for (Index m = 0; m < k; ++m) {
        const double w2 = std::max(big(m), 0.0);
        const double v2 = sv[static_cast<size_t>(m)] * sv[static_cast<size_t>(m)];
        if (std::abs(w2 - v2) > 1e-10 * scale)
            throw NonDecomposable("spectra of V V^T and V^T V do not match");
    }

    // Pair left vectors with right vectors as u_m = V w_m / sigma_m, which is
    // stable under degeneracies; fill the null directions from V V^T's kernel
    // eigenvectors, re-orthogonalized against the columns already placed.
    Matrix left = Matrix::Zero(n, k);
    const double sv_floor = 1e-13 * std::sqrt(scale);
    Index null_source = 0;  // eigenvalues ascend, so kernel vectors come first
    for (Index m = 0; m < k; ++m) {
        if (sv[static_cast<size_t>(m)] > sv_floor) {
            left.col(m) = v_matrix * right.col(m) / sv[static_cast<size_t>(m)];
        } else {
            sv[static_cast<size_t>(m)] = 0.0;
            Vector cand = big_es.eigenvectors().col(std::min(null_source++, n - 1));
            for (Index j = 0; j < m; ++j) cand -= left.col(j).dot(cand) * left.col(j);
            const double nrm = cand.norm();
            if (nrm < 1e-8) throw NonDecomposable("could not complete null directions");
            left.col(m) = cand / nrm;
        }
    }

    CouplingBlock block = make_coupling(left, sv, right);
    const double vscale = std::max(v_matrix.cwiseAbs().maxCoeff(), 1e-300);
    const double residual = (block.v_matrix - v_matrix).cwiseAbs().maxCoeff() / vscale;
    if (residual > 1e-10)
        throw NonDecomposable("reconstruction residual " + std::to_string(residual));
    block.v_matrix = v_matrix;
    return block;
}

WidthMatrix width_matrix(const ChannelMatrix& w) {
    const Index n = w.space_dim();
    if (w.n_channels() == 0) return WidthMatrix{Matrix::Zero(n, n)};
    Matrix gamma = kTwoPi * (w.rows.transpose() * w.rows);
    gamma = 0.5 * (gamma + gamma.transpose());
    return WidthMatrix{std::move(gamma)};
}

Matrix assemble_full_hamiltonian(const RealizationModel& model) {
    const Index n = model.n_dim();
    const Index k = model.k_trans();
    if (model.h2.matrix.rows() != n || model.v1.v_matrix.rows() != n ||
        model.v2.v_matrix.rows() != n || model.v1.v_matrix.cols() != k ||
        model.v2.v_matrix.cols() != k)
        throw DimensionMismatch("realization blocks have inconsistent shapes");
    Matrix h = Matrix::Zero(2 * n + k, 2 * n + k);
    h.topLeftCorner(n, n) = model.h1.matrix;
    h.block(0, n, n, k) = model.v1.v_matrix;
    h.block(n, 0, k, n) = model.v1.v_matrix.transpose();
    h.block(n, n, k, k) = model.htr;
    h.block(n, n + k, k, n) = model.v2.v_matrix.transpose();
    h.block(n + k, n, n, k) = model.v2.v_matrix;
    h.bottomRightCorner(n, n) = model.h2.matrix;
    return h;
}

Matrix assemble_full_width(const RealizationModel& model) {
    const Index n = model.n_dim();
    const Index k = model.k_trans();
    Matrix g = Matrix::Zero(2 * n + k, 2 * n + k);
    g.topLeftCorner(n, n) = width_matrix(model.w1).gamma;
    g.bottomRightCorner(n, n) = width_matrix(model.w2).gamma;
    return g;
}

RealizationModel sample_realization(const ModelConfig& cfg, const Matrix& right_frame_1,
                                    const Matrix& right_frame_2, Rng& rng) {
    RealizationModel model;
    model.h1 = sample_goe(cfg.n_dim, cfg.lambda, rng);
    model.h2 = sample_goe(cfg.n_dim, cfg.lambda, rng);
    model.htr = cfg.htr;
    model.w1 = sample_channel_matrix(cfg.n_dim, cfg.channel_strengths_1, rng);
    model.w2 = sample_channel_matrix(cfg.n_dim, cfg.channel_strengths_2, rng);
    model.v1 = make_coupling(random_orthonormal_frame(cfg.n_dim, cfg.k_trans, rng), cfg.sv_1,
                             right_frame_1);
    model.v2 = make_coupling(random_orthonormal_frame(cfg.n_dim, cfg.k_trans, rng), cfg.sv_2,
                             right_frame_2);
    return model;
}

RealizationModel sample_realization(const ModelConfig& cfg, Rng& rng) {
    Matrix r1 = random_orthonormal_frame(cfg.k_trans, cfg.k_trans, rng);
    Matrix r2 = random_orthonormal_frame(cfg.k_trans, cfg.k_trans, rng);
    return sample_realization(cfg, r1, r2, rng);
}

}  // namespace rmtrans
