#include "rmtrans/ensemble.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "rmtrans/error.hpp"
#include "rmtrans/rng.hpp"

namespace rmtrans {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kGateTolerance = 1e-10;

unsigned effective_workers(unsigned hint, Index jobs) {
    unsigned w = hint != 0 ? hint : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<Index>(w, std::max<Index>(jobs, 1)));
}

// Runs fn(0..count-1) on a small pool. Work items write only their own slot,
// so the caller's fixed-order reduction gives identical results for any
// worker count. The first exception (programming errors; per-realization
// failures are handled inside fn) is rethrown after everyone joined.
void parallel_for(Index count, unsigned workers, const std::function<void(Index)>& fn) {
    if (count <= 0) return;
    if (workers <= 1) {
        for (Index i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<Index> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (true) {
            const Index i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Jackknife standard error of a statistic defined on per-realization samples.
// For plain means this reduces to the usual standard error of the mean.
template <typename Getter, typename Statistic>
double jackknife_error(Index n, Getter&& sample, Statistic&& stat) {
    if (n < 2) return 0.0;
    Complex total{0.0, 0.0};
    for (Index i = 0; i < n; ++i) total += sample(i);
    std::vector<double> loo(static_cast<size_t>(n));
    double loo_mean = 0.0;
    for (Index i = 0; i < n; ++i) {
        const Complex rest = (total - sample(i)) / static_cast<double>(n - 1);
        loo[static_cast<size_t>(i)] = stat(rest);
        loo_mean += loo[static_cast<size_t>(i)];
    }
    loo_mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
    return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace

// ----------------------------- configuration --------------------------------

std::vector<std::string> EnsembleConfig::validate() const {
    std::vector<std::string> warnings = model.validate();
    std::vector<std::string> errors;
    if (n_realizations < 2) errors.push_back("n_realizations must be >= 2");
    if (energy_grid.empty()) errors.push_back("energy grid must not be empty");
    if (!std::is_sorted(energy_grid.begin(), energy_grid.end()))
        errors.push_back("energy grid must be sorted");
    for (double e : energy_grid)
        if (std::abs(e) > 0.5 * model.lambda) {
            errors.push_back("energy grid leaves the band-center region |E| <= 0.5 lambda");
            break;
        }
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return warnings;
}

// ------------------------------ main MC sweep -------------------------------

namespace {

struct SweepRecord {
    bool skipped = false;
    std::vector<CMatrix> s_ab;    // per energy, Lambda1 x Lambda2
    std::vector<CVector> s1_diag;
    std::vector<CVector> s2_diag;
};

}  // namespace

TransmissionCurve run_ensemble(const EnsembleConfig& cfg) {
    cfg.validate();
    const ModelConfig& mc = cfg.model;
    const Index n_e = static_cast<Index>(cfg.energy_grid.size());
    const Index l1 = mc.n_channels_1();
    const Index l2 = mc.n_channels_2();
    const Index reals = cfg.n_realizations;

    // Transition-side frames are part of the deterministic effective model and
    // stay fixed across realizations; only the big-space frames are resampled.
    Rng frame_rng = make_rng(cfg.master_seed, streams::coupling_frames);
    const Matrix rf1 = random_orthonormal_frame(mc.k_trans, mc.k_trans, frame_rng);
    const Matrix rf2 = random_orthonormal_frame(mc.k_trans, mc.k_trans, frame_rng);

    Matrix fixed_l1, fixed_l2;
    if (!cfg.resample_frames) {
        Rng left_rng = make_rng(cfg.master_seed, streams::fixed_left_frames);
        fixed_l1 = random_orthonormal_frame(mc.n_dim, mc.k_trans, left_rng);
        fixed_l2 = random_orthonormal_frame(mc.n_dim, mc.k_trans, left_rng);
    }

    std::vector<SweepRecord> records(static_cast<size_t>(reals));
    parallel_for(reals, effective_workers(cfg.worker_hint, reals), [&](Index r) {
        SweepRecord& rec = records[static_cast<size_t>(r)];
        Rng rng = make_rng(cfg.master_seed, streams::realization,
                           static_cast<std::uint64_t>(r));
        RealizationModel model;
        model.h1 = sample_goe(mc.n_dim, mc.lambda, rng);
        model.h2 = sample_goe(mc.n_dim, mc.lambda, rng);
        model.htr = mc.htr;
        model.w1 = sample_channel_matrix(mc.n_dim, mc.channel_strengths_1, rng);
        model.w2 = sample_channel_matrix(mc.n_dim, mc.channel_strengths_2, rng);
        if (cfg.resample_frames) {
            model.v1 = make_coupling(random_orthonormal_frame(mc.n_dim, mc.k_trans, rng),
                                     mc.sv_1, rf1);
            model.v2 = make_coupling(random_orthonormal_frame(mc.n_dim, mc.k_trans, rng),
                                     mc.sv_2, rf2);
        } else {
            model.v1 = make_coupling(fixed_l1, mc.sv_1, rf1);
            model.v2 = make_coupling(fixed_l2, mc.sv_2, rf2);
        }

        rec.s_ab.resize(static_cast<size_t>(n_e));
        rec.s1_diag.resize(static_cast<size_t>(n_e));
        rec.s2_diag.resize(static_cast<size_t>(n_e));
        try {
            for (Index e = 0; e < n_e; ++e) {
                EnergyScattering sc =
                    scattering_at(model, cfg.energy_grid[static_cast<size_t>(e)]);
                if (unitarity_defect(sc.full.s) > kGateTolerance ||
                    symmetry_defect(sc.full.s) > kGateTolerance) {
                    rec.skipped = true;
                    return;
                }
                rec.s_ab[static_cast<size_t>(e)] = sc.full.ab_block();
                rec.s1_diag[static_cast<size_t>(e)] = sc.s1.diagonal();
                rec.s2_diag[static_cast<size_t>(e)] = sc.s2.diagonal();
            }
        } catch (const SingularPropagator&) {
            rec.skipped = true;
        }
    });

    TransmissionCurve curve;
    curve.energies = cfg.energy_grid;
    for (const auto& rec : records) (rec.skipped ? curve.n_skipped : curve.n_used)++;
    if (curve.n_used < 2)
        throw SingularPropagator("fewer than 2 usable realizations");
    if (static_cast<double>(curve.n_skipped) >
        0.01 * static_cast<double>(reals))
        throw SingularPropagator("skipped realization fraction exceeds 1%");
    const double n = static_cast<double>(curve.n_used);

    curve.p_mc.assign(static_cast<size_t>(n_e), Matrix::Zero(l1, l2));
    curve.p_err.assign(static_cast<size_t>(n_e), Matrix::Zero(l1, l2));
    curve.s_mean.assign(static_cast<size_t>(n_e), CMatrix::Zero(l1, l2));
    curve.t1.resize(static_cast<size_t>(n_e));
    curve.t2.resize(static_cast<size_t>(n_e));

    for (Index e = 0; e < n_e; ++e) {
        auto& p = curve.p_mc[static_cast<size_t>(e)];
        auto& sm = curve.s_mean[static_cast<size_t>(e)];
        CVector d1 = CVector::Zero(l1), d2 = CVector::Zero(l2);
        for (const auto& rec : records) {
            if (rec.skipped) continue;
            const CMatrix& s = rec.s_ab[static_cast<size_t>(e)];
            sm += s;
            p += s.cwiseAbs2();
            d1 += rec.s1_diag[static_cast<size_t>(e)];
            d2 += rec.s2_diag[static_cast<size_t>(e)];
        }
        sm /= n;
        p /= n;
        auto& err = curve.p_err[static_cast<size_t>(e)];
        for (const auto& rec : records) {
            if (rec.skipped) continue;
            Matrix dev = rec.s_ab[static_cast<size_t>(e)].cwiseAbs2() - p;
            err += dev.cwiseProduct(dev);
        }
        err = (err / (n * (n - 1.0))).cwiseSqrt();

        std::vector<Complex> avg1(static_cast<size_t>(l1)), avg2(static_cast<size_t>(l2));
        for (Index a = 0; a < l1; ++a) avg1[static_cast<size_t>(a)] = d1(a) / n;
        for (Index b = 0; b < l2; ++b) avg2[static_cast<size_t>(b)] = d2(b) / n;
        curve.t1[static_cast<size_t>(e)] = transmission_from_average(avg1);
        curve.t2[static_cast<size_t>(e)] = transmission_from_average(avg2);
    }

    // Deterministic analytic side, built from the same transition-side frames.
    const Matrix z1 = z_rows_from(mc.sv_1, rf1, mc.lambda);
    const Matrix z2 = z_rows_from(mc.sv_2, rf2, mc.lambda);
    curve.resonances = resonance_set(effective_hamiltonian(mc.htr, z1, z2));
    curve.p_analytic.assign(static_cast<size_t>(n_e), Matrix::Zero(l1, l2));
    curve.y.resize(static_cast<size_t>(n_e));
    curve.y_isolated.resize(static_cast<size_t>(n_e));
    curve.y_cross.resize(static_cast<size_t>(n_e));
    for (Index e = 0; e < n_e; ++e) {
        const double energy = cfg.energy_grid[static_cast<size_t>(e)];
        const auto [diag, cross] = interference_decomposition(curve.resonances, energy);
        const double y = transport_factor_resonant(curve.resonances, energy);
        curve.y[static_cast<size_t>(e)] = y;
        curve.y_isolated[static_cast<size_t>(e)] = diag;
        curve.y_cross[static_cast<size_t>(e)] = cross;
        const auto& t1 = curve.t1[static_cast<size_t>(e)];
        const auto& t2 = curve.t2[static_cast<size_t>(e)];
        auto& pa = curve.p_analytic[static_cast<size_t>(e)];
        for (Index a = 0; a < l1; ++a)
            for (Index b = 0; b < l2; ++b)
                pa(a, b) = (t1.t_values[static_cast<size_t>(a)] / t1.sum_t) * y *
                           (t2.t_values[static_cast<size_t>(b)] / t2.sum_t);
    }
    return curve;
}

// ------------------------------ check reports -------------------------------

VanishingAmplitudeReport vanishing_amplitude_check(const TransmissionCurve& curve) {
    VanishingAmplitudeReport report;
    const Index l1 = curve.p_mc.empty() ? 0 : curve.p_mc.front().rows();
    const Index l2 = curve.p_mc.empty() ? 0 : curve.p_mc.front().cols();
    report.rho = Matrix::Zero(l1, l2);
    double num_total = 0.0, den_total = 0.0;
    for (Index a = 0; a < l1; ++a) {
        for (Index b = 0; b < l2; ++b) {
            double num = 0.0, den = 0.0;
            for (size_t e = 0; e < curve.energies.size(); ++e) {
                num += std::norm(curve.s_mean[e](a, b));
                den += curve.p_mc[e](a, b);
            }
            report.rho(a, b) = den > 0.0 ? num / den : 0.0;
            num_total += num;
            den_total += den;
        }
    }
    const double mean_p = den_total / static_cast<double>(std::max<Index>(l1 * l2, 1)) /
                          static_cast<double>(std::max<size_t>(curve.energies.size(), 1));
    report.applicable = mean_p > 1e-18;
    report.max_rho = report.rho.size() > 0 ? report.rho.maxCoeff() : 0.0;
    report.pooled_rho = den_total > 0.0 ? num_total / den_total : 0.0;
    report.pass = !report.applicable || report.max_rho < report.threshold;
    return report;
}

FactorizationReport factorization_check(const EnsembleConfig& cfg) {
    cfg.validate();
    const ModelConfig& mc = cfg.model;
    const Index n_ch = mc.n_channels_1();
    const Index n_e = static_cast<Index>(cfg.energy_grid.size());
    const Index reals = cfg.n_realizations;

    struct Record {
        bool skipped = false;
        std::vector<Matrix> abs2;    // per energy
        std::vector<CVector> diag;
    };
    std::vector<Record> records(static_cast<size_t>(reals));
    parallel_for(reals, effective_workers(cfg.worker_hint, reals), [&](Index r) {
        Record& rec = records[static_cast<size_t>(r)];
        Rng rng = make_rng(cfg.master_seed, streams::factorization,
                           static_cast<std::uint64_t>(r));
        Matrix h = sample_goe(mc.n_dim, mc.lambda, rng).matrix;
        ChannelMatrix w = sample_channel_matrix(mc.n_dim, mc.channel_strengths_1, rng);
        rec.abs2.resize(static_cast<size_t>(n_e));
        rec.diag.resize(static_cast<size_t>(n_e));
        try {
            for (Index e = 0; e < n_e; ++e) {
                CMatrix s1 = backscatter(h, w, cfg.energy_grid[static_cast<size_t>(e)]);
                if (unitarity_defect(s1) > kGateTolerance ||
                    symmetry_defect(s1) > kGateTolerance) {
                    rec.skipped = true;
                    return;
                }
                rec.abs2[static_cast<size_t>(e)] = s1.cwiseAbs2();
                rec.diag[static_cast<size_t>(e)] = s1.diagonal();
            }
        } catch (const SingularPropagator&) {
            rec.skipped = true;
        }
    });

    Index used = 0;
    for (const auto& rec : records) used += rec.skipped ? 0 : 1;
    if (used < 2) throw SingularPropagator("fewer than 2 usable realizations");
    const double n = static_cast<double>(used);

    FactorizationReport report;
    report.deviation = Matrix::Zero(n_ch, n_ch);
    Matrix ratio_sum = Matrix::Zero(n_ch, n_ch);
    std::vector<double> t_sum(static_cast<size_t>(n_ch), 0.0);
    for (Index e = 0; e < n_e; ++e) {
        Matrix abs2 = Matrix::Zero(n_ch, n_ch);
        CVector diag = CVector::Zero(n_ch);
        for (const auto& rec : records) {
            if (rec.skipped) continue;
            abs2 += rec.abs2[static_cast<size_t>(e)];
            diag += rec.diag[static_cast<size_t>(e)];
        }
        abs2 /= n;
        std::vector<Complex> avg(static_cast<size_t>(n_ch));
        for (Index a = 0; a < n_ch; ++a) avg[static_cast<size_t>(a)] = diag(a) / n;
        TransmissionCoefficients t = transmission_from_average(avg);
        for (Index a = 0; a < n_ch; ++a) t_sum[static_cast<size_t>(a)] += t.t_values[static_cast<size_t>(a)];
        for (Index a = 0; a < n_ch; ++a)
            for (Index ap = 0; ap < n_ch; ++ap) {
                if (a == ap) continue;
                const double pred = t.t_values[static_cast<size_t>(a)] *
                                    t.t_values[static_cast<size_t>(ap)] / t.sum_t;
                ratio_sum(a, ap) += abs2(a, ap) / pred;
            }
    }
    double dev_sum = 0.0;
    for (Index a = 0; a < n_ch; ++a) {
        for (Index ap = 0; ap < n_ch; ++ap) {
            if (a == ap) {
                report.deviation(a, ap) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const double dev = ratio_sum(a, ap) / static_cast<double>(n_e) - 1.0;
            report.deviation(a, ap) = dev;
            report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(dev));
            dev_sum += dev;
        }
    }
    report.mean_deviation =
        n_ch > 1 ? dev_sum / static_cast<double>(n_ch * (n_ch - 1)) : 0.0;
    report.t_mean.resize(static_cast<size_t>(n_ch));
    for (Index a = 0; a < n_ch; ++a) {
        report.t_mean[static_cast<size_t>(a)] =
            t_sum[static_cast<size_t>(a)] / static_cast<double>(n_e);
        report.sum_t += report.t_mean[static_cast<size_t>(a)];
    }
    report.pass = report.max_abs_deviation < report.threshold;
    return report;
}

GreenCenterReport green_center_check(const EnsembleConfig& cfg) {
    cfg.validate();
    const ModelConfig& mc = cfg.model;
    const Index n_dim = mc.n_dim;
    const Index reals = cfg.n_realizations;
    bool has_center = false;
    for (double e : cfg.energy_grid) has_center |= e == 0.0;
    if (!has_center)
        throw ValidationError({"green_center_check requires E = 0 in the energy grid"});

    struct Record {
        bool skipped = false;
        CVector diag;
        CVector superdiag;
    };
    std::vector<Record> records(static_cast<size_t>(reals));
    parallel_for(reals, effective_workers(cfg.worker_hint, reals), [&](Index r) {
        Record& rec = records[static_cast<size_t>(r)];
        Rng rng = make_rng(cfg.master_seed, streams::green_center,
                           static_cast<std::uint64_t>(r));
        Matrix h = sample_goe(mc.n_dim, mc.lambda, rng).matrix;
        ChannelMatrix w = sample_channel_matrix(mc.n_dim, mc.channel_strengths_1, rng);
        CMatrix d = (-h).cast<Complex>();
        d += (kI * kPi) * (w.rows.transpose() * w.rows).cast<Complex>();
        Eigen::PartialPivLU<CMatrix> lu(d);
        CMatrix g = lu.solve(CMatrix::Identity(n_dim, n_dim));
        if (!((d * g - CMatrix::Identity(n_dim, n_dim)).cwiseAbs().maxCoeff() < 1e-8)) {
            rec.skipped = true;
            return;
        }
        rec.diag = g.diagonal();
        rec.superdiag = g.diagonal(1);
    });

    GreenCenterReport report;
    Index used = 0;
    Complex diag_total{0.0, 0.0};
    CVector super_total = CVector::Zero(n_dim - 1);
    for (const auto& rec : records) {
        if (rec.skipped) continue;
        ++used;
        diag_total += rec.diag.sum() / static_cast<double>(n_dim);
        super_total += rec.superdiag;
    }
    if (used < 2) throw SingularPropagator("fewer than 2 usable realizations");
    const double n = static_cast<double>(used);
    report.n = used;
    report.diag_mean = diag_total / n;
    report.deviation = std::abs(report.diag_mean + kI / mc.lambda);
    report.tolerance = 0.05 / mc.lambda;
    report.diag_pass = report.deviation < report.tolerance;

    if (n_dim > 1) {
        CVector super_mean = super_total / n;
        report.offdiag_abs_mean = super_mean.cwiseAbs().mean();
        // Pooled per-entry scatter across realizations.
        double ss = 0.0;
        for (const auto& rec : records) {
            if (rec.skipped) continue;
            ss += (rec.superdiag - super_mean).squaredNorm();
        }
        const double per_entry_var = ss / (n * (n - 1.0)) / static_cast<double>(n_dim - 1);
        report.offdiag_threshold = 3.0 * std::sqrt(per_entry_var);
        report.offdiag_pass = report.offdiag_abs_mean < report.offdiag_threshold;
    } else {
        report.offdiag_pass = true;
    }
    return report;
}

CorrelatorReport correlator_check(const EnsembleConfig& cfg, Index n_probes) {
    cfg.validate();
    const ModelConfig& mc = cfg.model;
    const Index n_ch = mc.n_channels_1();
    const Index reals = cfg.n_realizations;
    const double energy = 0.0;

    Rng probe_rng = make_rng(cfg.master_seed, streams::probe_frame);
    const Matrix probe = random_orthonormal_frame(mc.n_dim, n_probes, probe_rng);

    struct Record {
        bool skipped = false;
        CMatrix u;      // n_ch x n_probes
        CVector diag;   // backscatter diagonal
    };
    std::vector<Record> records(static_cast<size_t>(reals));
    parallel_for(reals, effective_workers(cfg.worker_hint, reals), [&](Index r) {
        Record& rec = records[static_cast<size_t>(r)];
        Rng rng = make_rng(cfg.master_seed, streams::correlator,
                           static_cast<std::uint64_t>(r));
        Matrix h = sample_goe(mc.n_dim, mc.lambda, rng).matrix;
        ChannelMatrix w = sample_channel_matrix(mc.n_dim, mc.channel_strengths_1, rng);
        CMatrix d = (-h).cast<Complex>();
        d.diagonal().array() += energy;
        d += (kI * kPi) * (w.rows.transpose() * w.rows).cast<Complex>();
        CMatrix rhs(mc.n_dim, n_ch + n_probes);
        rhs.leftCols(n_ch) = w.rows.transpose().cast<Complex>();
        rhs.rightCols(n_probes) = probe.cast<Complex>();
        Eigen::PartialPivLU<CMatrix> lu(d);
        CMatrix x = lu.solve(rhs);
        if (!((d * x - rhs).cwiseAbs().maxCoeff() < 1e-8)) {
            rec.skipped = true;
            return;
        }
        CMatrix wc = w.rows.cast<Complex>();
        rec.u = wc * x.rightCols(n_probes);
        rec.diag =
            (CMatrix::Identity(n_ch, n_ch) - (2.0 * kPi * kI) * (wc * x.leftCols(n_ch)))
                .diagonal();
    });

    Index used = 0;
    for (const auto& rec : records) used += rec.skipped ? 0 : 1;
    if (used < 2) throw SingularPropagator("fewer than 2 usable realizations");
    const double n = static_cast<double>(used);

    CVector diag_mean = CVector::Zero(n_ch);
    std::vector<CMatrix> xmat(static_cast<size_t>(n_ch),
                              CMatrix::Zero(n_probes, n_probes));
    for (const auto& rec : records) {
        if (rec.skipped) continue;
        diag_mean += rec.diag;
        for (Index a = 0; a < n_ch; ++a)
            xmat[static_cast<size_t>(a)] +=
                kTwoPi * (rec.u.row(a).transpose() * rec.u.row(a).conjugate());
    }
    diag_mean /= n;
    for (auto& m : xmat) m /= n;

    std::vector<Complex> avg(static_cast<size_t>(n_ch));
    for (Index a = 0; a < n_ch; ++a) avg[static_cast<size_t>(a)] = diag_mean(a);
    TransmissionCoefficients t = transmission_from_average(avg);

    CorrelatorReport report;
    report.n = used;
    report.x_diag = Matrix::Zero(n_ch, n_probes);
    report.x_pred.resize(static_cast<size_t>(n_ch));
    double ratio_sum = 0.0, off_sum = 0.0, pred_sum = 0.0;
    Index off_count = 0;
    for (Index a = 0; a < n_ch; ++a) {
        const double pred =
            (1.0 / mc.lambda) * t.t_values[static_cast<size_t>(a)] / t.sum_t;
        report.x_pred[static_cast<size_t>(a)] = pred;
        pred_sum += pred;
        for (Index m = 0; m < n_probes; ++m) {
            report.x_diag(a, m) = xmat[static_cast<size_t>(a)](m, m).real();
            ratio_sum += report.x_diag(a, m) / pred;
        }
        for (Index m = 0; m < n_probes; ++m)
            for (Index mp = 0; mp < n_probes; ++mp) {
                if (m == mp) continue;
                off_sum += std::abs(xmat[static_cast<size_t>(a)](m, mp));
                ++off_count;
            }
    }
    report.ratio_mean = ratio_sum / static_cast<double>(n_ch * n_probes);
    const double pred_mean = pred_sum / static_cast<double>(n_ch);
    report.offdiag_over_pred =
        off_count > 0 ? off_sum / static_cast<double>(off_count) / pred_mean : 0.0;

    // Jackknife the pooled ratio over realizations.
    std::vector<const Record*> live;
    live.reserve(static_cast<size_t>(used));
    for (const auto& rec : records)
        if (!rec.skipped) live.push_back(&rec);
    auto pooled_x = [&](const Record& rec) {
        double s = 0.0;
        for (Index a = 0; a < n_ch; ++a)
            for (Index m = 0; m < n_probes; ++m)
                s += kTwoPi * std::norm(rec.u(a, m)) /
                     report.x_pred[static_cast<size_t>(a)];
        return Complex(s / static_cast<double>(n_ch * n_probes), 0.0);
    };
    report.ratio_std_error = jackknife_error(
        used, [&](Index i) { return pooled_x(*live[static_cast<size_t>(i)]); },
        [](Complex v) { return v.real(); });

    // The off-diagonal magnitude of a zero-mean complex average scales as
    // sigma/sqrt(n); compare against three times that scale, estimated from
    // the diagonal strength.
    const double sigma_est =
        std::sqrt(std::max(report.x_diag.mean(), 0.0) * pred_mean) / pred_mean;
    report.offdiag_3se = 3.0 * sigma_est / std::sqrt(n);
    report.offdiag_pass = report.offdiag_over_pred < report.offdiag_3se;
    return report;
}

}  // namespace rmtrans
