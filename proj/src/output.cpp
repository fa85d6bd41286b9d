#include "rmtrans/output.hpp"

#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace rmtrans {

namespace {

using Json = nlohmann::ordered_json;

Json vector_json(const std::vector<double>& v) { return Json(v); }

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_transmission_csv(std::ostream& out, const TransmissionCurve& curve) {
    out << "E,pair,p_mc,p_err,p_analytic,Y,Y_isolated,Y_cross\n";
    const size_t n_e = curve.energies.size();
    for (size_t e = 0; e < n_e; ++e) {
        const Matrix& p = curve.p_mc[e];
        const Matrix& perr = curve.p_err[e];
        const Matrix& pan = curve.p_analytic[e];
        for (Index a = 0; a < p.rows(); ++a) {
            for (Index b = 0; b < p.cols(); ++b) {
                out << format_g17(curve.energies[e]) << ",a" << a << "-b" << b << ','
                    << format_g17(p(a, b)) << ',' << format_g17(perr(a, b)) << ','
                    << format_g17(pan(a, b)) << ',' << format_g17(curve.y[e]) << ','
                    << format_g17(curve.y_isolated[e]) << ','
                    << format_g17(curve.y_cross[e]) << '\n';
            }
        }
    }
}

std::string run_json(const ParsedConfig& cfg, const TransmissionCurve& curve,
                     const CheckResults& checks) {
    const ModelConfig& mc = cfg.ensemble.model;
    Json j;

    Json jc;
    jc["preset"] = cfg.preset;
    jc["n_dim"] = mc.n_dim;
    jc["k_trans"] = mc.k_trans;
    jc["lambda"] = mc.lambda;
    jc["channel_strengths_1"] = mc.channel_strengths_1;
    jc["channel_strengths_2"] = mc.channel_strengths_2;
    {
        Json h = Json::array();
        for (Index i = 0; i < mc.htr.rows(); ++i) {
            Json row = Json::array();
            for (Index k = 0; k < mc.htr.cols(); ++k) row.push_back(mc.htr(i, k));
            h.push_back(row);
        }
        jc["htr"] = h;
    }
    jc["sv_1"] = mc.sv_1;
    jc["sv_2"] = mc.sv_2;
    jc["seed"] = mc.seed;
    jc["n_realizations"] = cfg.ensemble.n_realizations;
    jc["energy_grid"] = cfg.ensemble.energy_grid;
    jc["resample_frames"] = cfg.ensemble.resample_frames;
    j["config"] = jc;
    j["warnings"] = cfg.warnings;

    Json jr;
    jr["n_used"] = curve.n_used;
    jr["n_skipped"] = curve.n_skipped;
    jr["energies"] = vector_json(curve.energies);
    jr["y"] = vector_json(curve.y);
    jr["y_isolated"] = vector_json(curve.y_isolated);
    jr["y_cross"] = vector_json(curve.y_cross);
    {
        Json res;
        Json re = Json::array(), im = Json::array();
        for (Index l = 0; l < curve.resonances.eigenvalues.size(); ++l) {
            re.push_back(curve.resonances.eigenvalues(l).real());
            im.push_back(curve.resonances.eigenvalues(l).imag());
        }
        res["eigenvalues_re"] = re;
        res["eigenvalues_im"] = im;
        res["frame_condition"] = curve.resonances.condition;
        res["ill_conditioned"] = curve.resonances.ill_conditioned;
        jr["resonances"] = res;
    }
    {
        Json t1 = Json::array(), t2 = Json::array();
        for (const auto& t : curve.t1) t1.push_back(t.t_values);
        for (const auto& t : curve.t2) t2.push_back(t.t_values);
        jr["t1"] = t1;
        jr["t2"] = t2;
    }
    {
        Json pairs = Json::array();
        const Index l1 = curve.p_mc.empty() ? 0 : curve.p_mc.front().rows();
        const Index l2 = curve.p_mc.empty() ? 0 : curve.p_mc.front().cols();
        for (Index a = 0; a < l1; ++a) {
            for (Index b = 0; b < l2; ++b) {
                Json p;
                p["a"] = a;
                p["b"] = b;
                Json pmc = Json::array(), perr = Json::array(), pan = Json::array();
                for (size_t e = 0; e < curve.energies.size(); ++e) {
                    pmc.push_back(curve.p_mc[e](a, b));
                    perr.push_back(curve.p_err[e](a, b));
                    pan.push_back(curve.p_analytic[e](a, b));
                }
                p["p_mc"] = pmc;
                p["p_err"] = perr;
                p["p_analytic"] = pan;
                pairs.push_back(p);
            }
        }
        jr["pairs"] = pairs;
    }
    j["results"] = jr;

    Json jk;
    {
        Json v;
        v["applicable"] = checks.vanishing.applicable;
        v["max_rho"] = checks.vanishing.max_rho;
        v["pooled_rho"] = checks.vanishing.pooled_rho;
        v["threshold"] = checks.vanishing.threshold;
        v["pass"] = checks.vanishing.pass;
        jk["vanishing_amplitude"] = v;
    }
    {
        Json f;
        f["max_abs_deviation"] = checks.factorization.max_abs_deviation;
        f["mean_deviation"] = checks.factorization.mean_deviation;
        f["sum_t"] = checks.factorization.sum_t;
        f["threshold"] = checks.factorization.threshold;
        f["pass"] = checks.factorization.pass;
        jk["factorization"] = f;
    }
    {
        Json g;
        g["diag_mean_re"] = checks.green_center.diag_mean.real();
        g["diag_mean_im"] = checks.green_center.diag_mean.imag();
        g["deviation"] = checks.green_center.deviation;
        g["tolerance"] = checks.green_center.tolerance;
        g["diag_pass"] = checks.green_center.diag_pass;
        g["offdiag_abs_mean"] = checks.green_center.offdiag_abs_mean;
        g["offdiag_threshold"] = checks.green_center.offdiag_threshold;
        g["offdiag_pass"] = checks.green_center.offdiag_pass;
        jk["green_center"] = g;
    }
    {
        Json c;
        c["ratio_mean"] = checks.correlator.ratio_mean;
        c["ratio_std_error"] = checks.correlator.ratio_std_error;
        c["offdiag_over_pred"] = checks.correlator.offdiag_over_pred;
        c["offdiag_3se"] = checks.correlator.offdiag_3se;
        c["offdiag_pass"] = checks.correlator.offdiag_pass;
        jk["correlator"] = c;
    }
    jk["all_pass"] = checks.all_pass();
    j["checks"] = jk;

    return j.dump(2) + "\n";
}

}  // namespace rmtrans
