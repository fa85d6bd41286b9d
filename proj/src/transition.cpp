#include "rmtrans/transition.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rmtrans/error.hpp"

namespace rmtrans {

namespace {

constexpr Complex kI{0.0, 1.0};

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

Matrix z_rows_from(const std::vector<double>& singular_values, const Matrix& right_frame,
                   double lambda) {
    const Index k = right_frame.rows();
    if (static_cast<Index>(singular_values.size()) != k || right_frame.cols() != k)
        throw DimensionMismatch("z_rows_from: inconsistent shapes");
    Matrix z = right_frame.transpose() / std::sqrt(lambda);
    for (Index m = 0; m < k; ++m) z.row(m) *= singular_values[static_cast<size_t>(m)];
    return z;
}

EffectiveHamiltonian effective_hamiltonian(const Matrix& htr, const Matrix& z1,
                                           const Matrix& z2) {
    const Index k = htr.rows();
    if (htr.cols() != k || z1.rows() != k || z1.cols() != k || z2.rows() != k ||
        z2.cols() != k)
        throw DimensionMismatch("effective_hamiltonian: shapes must all be k x k");
    Matrix width = z1.transpose() * z1 + z2.transpose() * z2;
    width = 0.5 * (width + width.transpose());   // exact symmetry
    EffectiveHamiltonian out;
    out.h_eff = htr.cast<Complex>() - kI * width.cast<Complex>();
    out.z1 = z1;
    out.z2 = z2;
    return out;
}

CMatrix gtr_deterministic(const Matrix& htr, const Matrix& z1, const Matrix& z2,
                          double energy) {
    const Index k = htr.rows();
    CMatrix core = -effective_hamiltonian(htr, z1, z2).h_eff;
    core.diagonal().array() += energy;
    Eigen::PartialPivLU<CMatrix> lu(core);
    CMatrix g = lu.solve(CMatrix::Identity(k, k));
    const double residual = max_abs(core * g - CMatrix::Identity(k, k));
    if (!(residual < 1e-8))
        throw SingularAtEnergy("transition propagator singular at E = " +
                               std::to_string(energy));
    return g;
}

ResonanceSet diagonalize_complex_symmetric(const CMatrix& h_eff) {
    const Index k = h_eff.rows();
    if (h_eff.cols() != k) throw DimensionMismatch("matrix must be square");
    if (max_abs(CMatrix(h_eff - h_eff.transpose())) >
        1e-12 * std::max(1.0, max_abs(h_eff)))
        throw DimensionMismatch("matrix must be complex symmetric");

    Eigen::ComplexEigenSolver<CMatrix> es(h_eff, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) throw DefectiveMatrix("eigensolver failed");

    ResonanceSet out;
    out.eigenvalues = es.eigenvalues();
    out.eigenframe = es.eigenvectors();

    // Renormalize to the bilinear norm v^T v = 1; a quasi-null vector means the
    // matrix is not diagonalizable by a complex orthogonal transformation.
    for (Index l = 0; l < k; ++l) {
        const Complex bilinear = out.eigenframe.col(l).transpose() * out.eigenframe.col(l);
        if (std::abs(bilinear) < 1e-8)
            throw DefectiveMatrix("quasi-null eigenvector, |v^T v| = " +
                                  std::to_string(std::abs(bilinear)));
        out.eigenframe.col(l) /= std::sqrt(bilinear);
        // Fix the leftover sign deterministically on the largest component.
        Index imax = 0;
        out.eigenframe.col(l).cwiseAbs().maxCoeff(&imax);
        const Complex lead = out.eigenframe(imax, l);
        if (lead.real() < 0.0 || (lead.real() == 0.0 && lead.imag() < 0.0))
            out.eigenframe.col(l) = -out.eigenframe.col(l);
    }

    // Order by real part, ties by imaginary part.
    std::vector<Index> order(static_cast<size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Complex ea = out.eigenvalues(a), eb = out.eigenvalues(b);
        if (ea.real() != eb.real()) return ea.real() < eb.real();
        return ea.imag() < eb.imag();
    });
    CVector ev(k);
    CMatrix frame(k, k);
    for (Index l = 0; l < k; ++l) {
        ev(l) = out.eigenvalues(order[static_cast<size_t>(l)]);
        frame.col(l) = out.eigenframe.col(order[static_cast<size_t>(l)]);
    }
    out.eigenvalues = std::move(ev);
    out.eigenframe = std::move(frame);

    const double scale = std::max(1.0, max_abs(h_eff));
    const double ortho =
        max_abs(CMatrix(out.eigenframe.transpose() * out.eigenframe - CMatrix::Identity(k, k)));
    CMatrix rebuilt =
        out.eigenframe * out.eigenvalues.asDiagonal() * out.eigenframe.transpose();
    const double recon = max_abs(CMatrix(rebuilt - h_eff)) / scale;
    if (ortho > 1e-8 || recon > 1e-8)
        throw DefectiveMatrix("complex orthogonal diagonalization failed (ortho " +
                              std::to_string(ortho) + ", reconstruction " +
                              std::to_string(recon) + ")");

    if (k > 0) {
        Eigen::JacobiSVD<CMatrix> svd(out.eigenframe);
        const double smin = svd.singularValues().minCoeff();
        out.condition = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                                   : std::numeric_limits<double>::infinity();
    }
    out.ill_conditioned = out.condition > 1e6;
    return out;
}

CMatrix resonance_amplitudes(const Matrix& z, const CMatrix& frame) {
    if (z.cols() != frame.rows()) throw DimensionMismatch("resonance_amplitudes shapes");
    return z.cast<Complex>() * frame;
}

ResonanceSet resonance_set(const EffectiveHamiltonian& heff) {
    ResonanceSet res = diagonalize_complex_symmetric(heff.h_eff);
    res.zeta1 = resonance_amplitudes(heff.z1, res.eigenframe);
    res.zeta2 = resonance_amplitudes(heff.z2, res.eigenframe);
    return res;
}

double transport_factor_direct(const Matrix& htr, const Matrix& z1, const Matrix& z2,
                               double energy) {
    CMatrix gtr = gtr_deterministic(htr, z1, z2, energy);
    CMatrix amp = z1.cast<Complex>() * gtr * z2.transpose().cast<Complex>();
    return amp.squaredNorm();
}

double transport_factor_resonant(const ResonanceSet& res, double energy) {
    const Index k = res.eigenvalues.size();
    CVector inv(k);
    for (Index l = 0; l < k; ++l) inv(l) = 1.0 / (energy - res.eigenvalues(l));
    CMatrix amp = res.zeta1 * inv.asDiagonal() * res.zeta2.transpose();
    return amp.squaredNorm();
}

double transport_factor_isolated(const ResonanceSet& res, double energy) {
    const Index k = res.eigenvalues.size();
    double y = 0.0;
    for (Index l = 0; l < k; ++l) {
        const double w1 = res.zeta1.col(l).squaredNorm();
        const double w2 = res.zeta2.col(l).squaredNorm();
        y += w1 * w2 / std::norm(energy - res.eigenvalues(l));
    }
    return y;
}

std::pair<double, double> interference_decomposition(const ResonanceSet& res, double energy) {
    const Index k = res.eigenvalues.size();
    // sum_m zeta_{ml} zeta*_{ml'} for each side
    CMatrix a = res.zeta1.adjoint() * res.zeta1;   // a(l', l)
    CMatrix b = res.zeta2.adjoint() * res.zeta2;
    double diagonal = 0.0;
    Complex cross = 0.0;
    for (Index l = 0; l < k; ++l) {
        for (Index lp = 0; lp < k; ++lp) {
            const Complex term = a(lp, l) * b(lp, l) /
                                 ((energy - res.eigenvalues(l)) *
                                  std::conj(energy - res.eigenvalues(lp)));
            if (l == lp)
                diagonal += term.real();
            else
                cross += term;
        }
    }
    return {diagonal, cross.real()};
}

double analytic_transmission(const TransmissionCoefficients& t1,
                             const TransmissionCoefficients& t2, const ResonanceSet& res,
                             double energy, Index channel_a, Index channel_b) {
    if (!(t1.sum_t > 0.0) || !(t2.sum_t > 0.0))
        throw std::invalid_argument("analytic_transmission needs sum_t > 0 on both sides");
    const double ta = t1.t_values.at(static_cast<size_t>(channel_a));
    const double tb = t2.t_values.at(static_cast<size_t>(channel_b));
    return (ta / t1.sum_t) * transport_factor_resonant(res, energy) * (tb / t2.sum_t);
}

}  // namespace rmtrans
