#include "rmtrans/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rmtrans/config.hpp"
#include "rmtrans/error.hpp"
#include "rmtrans/output.hpp"
#include "rmtrans/rng.hpp"
#include "rmtrans/transition.hpp"

namespace rmtrans {

namespace {

struct Gate {
    bool ok = true;
    void expect(std::ostream& log, const std::string& name, bool pass, double value,
                double bound) {
        log << (pass ? "PASS " : "FAIL ") << name << "  (" << value
            << (pass ? " within " : " exceeds ") << bound << ")\n";
        ok &= pass;
    }
};

}  // namespace

bool run_invariant_suite(std::ostream& log, std::uint64_t seed) {
    Gate gate;
    Rng rng(derive_seed(seed, 99));

    // Sampling invariants.
    {
        GoeSample g = sample_goe(48, 1.0, rng);
        const double asym = (g.matrix - g.matrix.transpose()).cwiseAbs().maxCoeff();
        gate.expect(log, "goe symmetry", asym == 0.0, asym, 0.0);

        ChannelMatrix w = sample_channel_matrix(48, std::vector<double>(6, 0.4), rng);
        Matrix gram = w.rows * w.rows.transpose();
        for (Index a = 0; a < 6; ++a) gram(a, a) -= 0.4;
        const double gram_err = gram.cwiseAbs().maxCoeff();
        gate.expect(log, "channel gram", gram_err < 1e-12, gram_err, 1e-12);

        WidthMatrix wm = width_matrix(w);
        const double trace_err = std::abs(wm.gamma.trace() - kTwoPi * 6 * 0.4);
        gate.expect(log, "width trace", trace_err < 1e-12, trace_err, 1e-12);
        Eigen::SelfAdjointEigenSolver<Matrix> es(wm.gamma, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        gate.expect(log, "width psd", min_eig > -1e-10 * wm.gamma.trace(), min_eig, 0.0);
    }

    // Coupling factorization round trip.
    {
        CouplingBlock synth = synthesize_coupling(12, {0.3, 0.1, 0.05}, rng);
        CouplingBlock rec = decompose_coupling(synth.v_matrix);
        const double resid = (rec.v_matrix - synth.v_matrix).cwiseAbs().maxCoeff();
        gate.expect(log, "coupling round trip", resid < 1e-12, resid, 1e-12);
        double sv_err = 0.0;
        std::vector<double> got = rec.singular_values;
        std::vector<double> want = {0.3, 0.1, 0.05};
        for (size_t i = 0; i < want.size(); ++i) sv_err = std::max(sv_err, std::abs(got[i] - want[i]));
        gate.expect(log, "singular values", sv_err < 1e-10, sv_err, 1e-10);
    }

    // Scattering identities on a handful of small realizations.
    {
        ModelConfig mc;
        mc.n_dim = 40;
        mc.k_trans = 3;
        mc.lambda = 1.0;
        mc.channel_strengths_1.assign(6, 1.0 / kPi);
        mc.channel_strengths_2.assign(6, 1.0 / kPi);
        mc.sv_1 = {0.1, 0.1, 0.1};
        mc.sv_2 = {0.1, 0.1, 0.1};
        mc.htr = htr_from_eigenvalues({-0.1, 0.0, 0.1});
        double udef = 0.0, sdef = 0.0, schur = 0.0, assembled = 0.0;
        for (int i = 0; i < 5; ++i) {
            RealizationModel model = sample_realization(mc, rng);
            for (double energy : {-0.15, 0.0, 0.1}) {
                ScatteringMatrix s = s_matrix_direct(model, energy);
                udef = std::max(udef, unitarity_defect(s.s));
                sdef = std::max(sdef, symmetry_defect(s.s));
                CMatrix ab = s_ab_resummed(model, energy);
                schur = std::max(schur, (ab - s.ab_block()).cwiseAbs().maxCoeff());
                EnergyScattering sweep = scattering_at(model, energy);
                assembled = std::max(assembled,
                                     (sweep.full.s - s.s).cwiseAbs().maxCoeff());
            }
        }
        gate.expect(log, "s-matrix unitarity", udef < 1e-10, udef, 1e-10);
        gate.expect(log, "s-matrix symmetry", sdef < 1e-10, sdef, 1e-10);
        gate.expect(log, "resummed block identity", schur < 1e-10, schur, 1e-10);
        gate.expect(log, "sweep assembly identity", assembled < 1e-10, assembled, 1e-10);
    }

    // Transport factor identities.
    {
        Rng trng(derive_seed(seed, 100));
        const Index k = 4;
        Matrix rf1 = random_orthonormal_frame(k, k, trng);
        Matrix rf2 = random_orthonormal_frame(k, k, trng);
        Matrix z1 = z_rows_from({0.12, 0.1, 0.08, 0.05}, rf1, 1.0);
        Matrix z2 = z_rows_from({0.11, 0.09, 0.07, 0.05}, rf2, 1.0);
        Matrix htr = htr_from_eigenvalues({-0.15, -0.05, 0.05, 0.15});
        EffectiveHamiltonian heff = effective_hamiltonian(htr, z1, z2);
        ResonanceSet res = resonance_set(heff);

        double ident = 0.0, split = 0.0;
        for (double energy : {-0.2, -0.07, 0.0, 0.02, 0.18}) {
            const double direct = transport_factor_direct(htr, z1, z2, energy);
            const double resonant = transport_factor_resonant(res, energy);
            const auto [diag, cross] = interference_decomposition(res, energy);
            ident = std::max(ident, std::abs(direct - resonant));
            split = std::max(split, std::abs(diag + cross - resonant));
        }
        gate.expect(log, "transport identity", ident < 1e-10, ident, 1e-10);
        gate.expect(log, "interference split", split < 1e-10, split, 1e-10);

        double width_sum = 0.0;
        for (Index l = 0; l < k; ++l) width_sum -= res.eigenvalues(l).imag();
        const double expected = z1.squaredNorm() + z2.squaredNorm();
        const double werr = std::abs(width_sum - expected);
        gate.expect(log, "width sum rule", werr < 1e-10, werr, 1e-10);

        // Single resonance with symmetric entry and exit couplings peaks at 1/4.
        Matrix eps = Matrix::Zero(1, 1);
        Matrix zs(1, 1);
        zs(0, 0) = 0.1;
        EffectiveHamiltonian h1 = effective_hamiltonian(eps, zs, zs);
        ResonanceSet r1 = resonance_set(h1);
        const double peak = transport_factor_resonant(r1, 0.0);
        gate.expect(log, "single-resonance peak", std::abs(peak - 0.25) < 1e-12,
                    peak, 0.25);
    }

    log << (gate.ok ? "invariant suite: all PASS\n" : "invariant suite: FAIL\n");
    return gate.ok;
}

int run(const RunSpec& spec, std::ostream& log) {
    try {
        std::string text;
        if (!spec.config_path.empty()) {
            std::ifstream in(spec.config_path);
            if (!in) {
                log << "error: cannot open config file '" << spec.config_path << "'\n";
                return 2;
            }
            std::stringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
        std::vector<std::pair<std::string, std::string>> overrides;
        if (!spec.preset.empty()) overrides.emplace_back("preset", spec.preset);
        overrides.insert(overrides.end(), spec.overrides.begin(), spec.overrides.end());

        ParsedConfig cfg = parse_config(text, overrides);
        for (const auto& w : cfg.warnings) log << "warning: " << w << "\n";

        if (spec.check_only) return run_invariant_suite(log, cfg.ensemble.master_seed) ? 0 : 1;

        log << "running " << cfg.ensemble.n_realizations << " realizations, n_dim "
            << cfg.ensemble.model.n_dim << ", " << cfg.ensemble.energy_grid.size()
            << " energies, preset " << cfg.preset << "\n";
        TransmissionCurve curve = run_ensemble(cfg.ensemble);
        log << "sweep done: " << curve.n_used << " used, " << curve.n_skipped
            << " skipped\n";

        CheckResults checks;
        checks.vanishing = vanishing_amplitude_check(curve);
        checks.factorization = factorization_check(cfg.ensemble);
        checks.green_center = green_center_check(cfg.ensemble);
        checks.correlator = correlator_check(cfg.ensemble, cfg.ensemble.model.k_trans);

        log << (checks.vanishing.pass ? "PASS" : "FAIL") << " vanishing amplitude: max rho "
            << checks.vanishing.max_rho
            << (checks.vanishing.applicable ? "" : " (not applicable)") << "\n";
        log << (checks.factorization.pass ? "PASS" : "FAIL")
            << " factorization: max |dev| " << checks.factorization.max_abs_deviation
            << " (sum T " << checks.factorization.sum_t << ")\n";
        log << (checks.green_center.diag_pass && checks.green_center.offdiag_pass ? "PASS"
                                                                                  : "FAIL")
            << " green center: |mean + i/lambda| " << checks.green_center.deviation
            << " vs " << checks.green_center.tolerance << "\n";
        log << (checks.correlator.offdiag_pass ? "PASS" : "FAIL")
            << " correlator structure: measured/predicted " << checks.correlator.ratio_mean
            << " +- " << checks.correlator.ratio_std_error << ", offdiag "
            << checks.correlator.offdiag_over_pred << "\n";

        namespace fs = std::filesystem;
        fs::create_directories(spec.output_dir);
        if (spec.write_csv) {
            std::ofstream csv(fs::path(spec.output_dir) / "transmission.csv");
            write_transmission_csv(csv, curve);
            log << "wrote " << (fs::path(spec.output_dir) / "transmission.csv").string()
                << "\n";
        }
        if (spec.write_json) {
            std::ofstream js(fs::path(spec.output_dir) / "run.json");
            js << run_json(cfg, curve, checks);
            log << "wrote " << (fs::path(spec.output_dir) / "run.json").string() << "\n";
        }
        return checks.all_pass() ? 0 : 1;
    } catch (const ParseError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace rmtrans
