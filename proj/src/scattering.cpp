#include "rmtrans/scattering.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

#include "rmtrans/error.hpp"

namespace rmtrans {

namespace {

constexpr Complex kI{0.0, 1.0};

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// E - H + (i/2) Gamma for one GOE block.
CMatrix side_propagator_inverse(const Matrix& h, const ChannelMatrix& w, double energy) {
    const Index n = h.rows();
    Matrix re = -h;
    re.diagonal().array() += energy;
    CMatrix d = re.cast<Complex>();
    if (w.n_channels() > 0) d += (kI * kPi) * (w.rows.transpose() * w.rows).cast<Complex>();
    return d;
}

// Solves d * x = rhs and enforces the residual gate.
CMatrix checked_solve(const CMatrix& d, const CMatrix& rhs, const char* what) {
    if (rhs.cols() == 0 || rhs.rows() == 0) return CMatrix::Zero(rhs.rows(), rhs.cols());
    Eigen::PartialPivLU<CMatrix> lu(d);
    CMatrix x = lu.solve(rhs);
    const double scale = std::max(max_abs(rhs), 1e-300);
    const double residual = max_abs(d * x - rhs) / scale;
    if (!(residual < 1e-8))
        throw SingularPropagator(std::string(what) + ": solve residual " +
                                 std::to_string(residual));
    return x;
}

// Per-side solve products shared by the resummed assembly.
struct SideSolve {
    CMatrix gw;   // G W^T   (n x Lambda)
    CMatrix gv;   // G V     (n x k)
    CMatrix s_decoupled;  // 1 - 2 pi i W G W^T
    CMatrix wgv;  // W G V   (Lambda x k)
    CMatrix vgv;  // V^T G V (k x k)
};

SideSolve solve_side(const Matrix& h, const ChannelMatrix& w, const Matrix& v, double energy,
                     const char* what) {
    const Index n = h.rows();
    const Index n_ch = w.n_channels();
    const Index k = v.cols();
    CMatrix d = side_propagator_inverse(h, w, energy);
    CMatrix rhs(n, n_ch + k);
    if (n_ch > 0) rhs.leftCols(n_ch) = w.rows.transpose().cast<Complex>();
    if (k > 0) rhs.rightCols(k) = v.cast<Complex>();
    CMatrix x = checked_solve(d, rhs, what);

    SideSolve out;
    out.gw = x.leftCols(n_ch);
    out.gv = x.rightCols(k);
    out.s_decoupled = CMatrix::Identity(n_ch, n_ch);
    if (n_ch > 0) out.s_decoupled -= (2.0 * kPi * kI) * (w.rows.cast<Complex>() * out.gw);
    out.wgv = w.rows.cast<Complex>() * out.gv;
    out.vgv = v.transpose().cast<Complex>() * out.gv;
    return out;
}

// Exact transition propagator from the side solves (third of the coupled
// Green functions); k = 0 collapses to an empty matrix.
CMatrix exact_gtr(const Matrix& htr, const CMatrix& vgv1, const CMatrix& vgv2, double energy) {
    const Index k = htr.rows();
    if (k == 0) return CMatrix(0, 0);
    CMatrix core = -htr.cast<Complex>() - vgv1 - vgv2;
    core.diagonal().array() += energy;
    return checked_solve(core, CMatrix::Identity(k, k), "transition propagator");
}

}  // namespace

double unitarity_defect(const CMatrix& s) {
    CMatrix defect = s.adjoint() * s - CMatrix::Identity(s.rows(), s.cols());
    return max_abs(defect);
}

double symmetry_defect(const CMatrix& s) { return max_abs(CMatrix(s - s.transpose())); }

ScatteringMatrix s_matrix_direct(const RealizationModel& model, double energy) {
    const Index n = model.n_dim();
    const Index k = model.k_trans();
    const Index l1 = model.w1.n_channels();
    const Index l2 = model.w2.n_channels();
    const Index dim = 2 * n + k;

    Matrix re = -assemble_full_hamiltonian(model);
    re.diagonal().array() += energy;
    CMatrix d = re.cast<Complex>() + (0.5 * kI) * assemble_full_width(model).cast<Complex>();

    // Channel vectors live in their own GOE block and vanish elsewhere.
    CMatrix b = CMatrix::Zero(dim, l1 + l2);
    for (Index a = 0; a < l1; ++a)
        b.col(a).head(n) = model.w1.rows.row(a).transpose().cast<Complex>();
    for (Index c = 0; c < l2; ++c)
        b.col(l1 + c).tail(n) = model.w2.rows.row(c).transpose().cast<Complex>();

    CMatrix x = checked_solve(d, b, "full propagator");
    ScatteringMatrix out;
    out.s = CMatrix::Identity(l1 + l2, l1 + l2) - (2.0 * kPi * kI) * (b.transpose() * x);
    out.energy = energy;
    out.n_channels_1 = l1;
    out.n_channels_2 = l2;
    return out;
}

CMatrix s_ab_resummed(const RealizationModel& model, double energy) {
    SideSolve s1 = solve_side(model.h1.matrix, model.w1, model.v1.v_matrix, energy, "side 1");
    SideSolve s2 = solve_side(model.h2.matrix, model.w2, model.v2.v_matrix, energy, "side 2");
    CMatrix gtr = exact_gtr(model.htr, s1.vgv, s2.vgv, energy);
    return (-2.0 * kPi * kI) * (s1.wgv * gtr * s2.wgv.transpose());
}

CMatrix backscatter(const Matrix& h, const ChannelMatrix& w, double energy) {
    const Index none = 0;
    SideSolve s = solve_side(h, w, Matrix::Zero(h.rows(), none), energy, "backscatter");
    return s.s_decoupled;
}

CMatrix decoupled_backscatter(const RealizationModel& model, double energy, int side) {
    if (side != 1 && side != 2) throw DimensionMismatch("side must be 1 or 2");
    const Matrix& h = side == 1 ? model.h1.matrix : model.h2.matrix;
    const ChannelMatrix& w = side == 1 ? model.w1 : model.w2;
    return backscatter(h, w, energy);
}

EnergyScattering scattering_at(const RealizationModel& model, double energy) {
    const Index l1 = model.w1.n_channels();
    const Index l2 = model.w2.n_channels();
    SideSolve s1 = solve_side(model.h1.matrix, model.w1, model.v1.v_matrix, energy, "side 1");
    SideSolve s2 = solve_side(model.h2.matrix, model.w2, model.v2.v_matrix, energy, "side 2");
    CMatrix gtr = exact_gtr(model.htr, s1.vgv, s2.vgv, energy);

    // Block form of 1 - 2 pi i W^T D^{-1} W after eliminating the two spaces
    // around the transition block.
    EnergyScattering out;
    out.full.s.resize(l1 + l2, l1 + l2);
    const Complex pref = -2.0 * kPi * kI;
    out.full.s.topLeftCorner(l1, l1) = s1.s_decoupled + pref * (s1.wgv * gtr * s1.wgv.transpose());
    out.full.s.bottomRightCorner(l2, l2) =
        s2.s_decoupled + pref * (s2.wgv * gtr * s2.wgv.transpose());
    CMatrix ab = pref * (s1.wgv * gtr * s2.wgv.transpose());
    out.full.s.topRightCorner(l1, l2) = ab;
    out.full.s.bottomLeftCorner(l2, l1) = ab.transpose();
    out.full.energy = energy;
    out.full.n_channels_1 = l1;
    out.full.n_channels_2 = l2;
    out.s1 = std::move(s1.s_decoupled);
    out.s2 = std::move(s2.s_decoupled);
    return out;
}

GreenFunctions green_functions(const RealizationModel& model, double energy) {
    const Index n = model.n_dim();
    GreenFunctions g;
    g.g1 = checked_solve(side_propagator_inverse(model.h1.matrix, model.w1, energy),
                         CMatrix::Identity(n, n), "side 1");
    g.g2 = checked_solve(side_propagator_inverse(model.h2.matrix, model.w2, energy),
                         CMatrix::Identity(n, n), "side 2");
    CMatrix vgv1 = model.v1.v_matrix.transpose().cast<Complex>() * g.g1 *
                   model.v1.v_matrix.cast<Complex>();
    CMatrix vgv2 = model.v2.v_matrix.transpose().cast<Complex>() * g.g2 *
                   model.v2.v_matrix.cast<Complex>();
    g.gtr_exact = exact_gtr(model.htr, vgv1, vgv2, energy);
    return g;
}

TransmissionCoefficients transmission_from_average(const std::vector<Complex>& avg_diag) {
    TransmissionCoefficients out;
    out.t_values.reserve(avg_diag.size());
    for (const Complex& s : avg_diag) {
        const double t = std::clamp(1.0 - std::norm(s), 0.0, 1.0);
        out.t_values.push_back(t);
        out.sum_t += t;
    }
    return out;
}

double transmission_analytic_oracle(double v_sq, double lambda) {
    const double x = kPi * v_sq / lambda;
    const double onepx = 1.0 + x;
    return 4.0 * x / (onepx * onepx);
}

}  // namespace rmtrans
