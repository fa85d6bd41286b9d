#include "rmtrans/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "rmtrans/error.hpp"

namespace rmtrans {

namespace {

struct RawConfig {
    std::optional<std::string> preset;
    std::optional<Index> n_dim;
    std::optional<Index> k_trans;
    std::optional<double> lambda;
    std::optional<std::vector<double>> channel_strengths_1;
    std::optional<std::vector<double>> channel_strengths_2;
    std::optional<std::vector<double>> htr_eigenvalues;
    std::optional<std::vector<double>> htr_matrix;   // row-major k x k
    std::optional<std::vector<double>> sv_1;
    std::optional<std::vector<double>> sv_2;
    std::optional<std::uint64_t> seed;
    std::optional<Index> n_realizations;
    std::optional<double> energy_min;
    std::optional<double> energy_max;
    std::optional<Index> energy_points;
    std::optional<bool> resample_frames;
    std::optional<unsigned> workers;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& tok, int line) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + tok + "'");
    }
    if (pos != tok.size()) throw ParseError(line, "trailing characters in number '" + tok + "'");
    return v;
}

long long parse_integer(const std::string& tok, int line) {
    size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + tok + "'");
    }
    if (pos != tok.size())
        throw ParseError(line, "trailing characters in integer '" + tok + "'");
    return v;
}

bool parse_bool(const std::string& tok, int line) {
    std::string t = tok;
    std::transform(t.begin(), t.end(), t.begin(), ::tolower);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    throw ParseError(line, "expected a boolean, got '" + tok + "'");
}

// Whitespace/comma separated reals; "N*x" repeats x N times.
std::vector<double> parse_list(const std::string& value, int line) {
    std::string normalized = value;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::istringstream in(normalized);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        const auto star = tok.find('*');
        if (star != std::string::npos) {
            const long long count = parse_integer(tok.substr(0, star), line);
            if (count < 0 || count > 100000) throw ParseError(line, "bad repeat count in '" + tok + "'");
            const double v = parse_real(tok.substr(star + 1), line);
            out.insert(out.end(), static_cast<size_t>(count), v);
        } else {
            out.push_back(parse_real(tok, line));
        }
    }
    if (out.empty()) throw ParseError(line, "empty list");
    return out;
}

void apply_key(RawConfig& raw, const std::string& key, const std::string& value, int line) {
    if (key == "preset") {
        if (value != "isolated" && value != "overlapping" && value != "custom")
            throw ParseError(line, "unknown preset '" + value + "'");
        raw.preset = value;
    } else if (key == "n_dim") {
        raw.n_dim = static_cast<Index>(parse_integer(value, line));
    } else if (key == "k_trans") {
        raw.k_trans = static_cast<Index>(parse_integer(value, line));
    } else if (key == "lambda") {
        raw.lambda = parse_real(value, line);
    } else if (key == "channel_strengths_1") {
        raw.channel_strengths_1 = parse_list(value, line);
    } else if (key == "channel_strengths_2") {
        raw.channel_strengths_2 = parse_list(value, line);
    } else if (key == "htr_eigenvalues") {
        raw.htr_eigenvalues = parse_list(value, line);
    } else if (key == "htr_matrix") {
        raw.htr_matrix = parse_list(value, line);
    } else if (key == "sv_1") {
        raw.sv_1 = parse_list(value, line);
    } else if (key == "sv_2") {
        raw.sv_2 = parse_list(value, line);
    } else if (key == "seed") {
        raw.seed = static_cast<std::uint64_t>(parse_integer(value, line));
    } else if (key == "n_realizations" || key == "realizations") {
        raw.n_realizations = static_cast<Index>(parse_integer(value, line));
    } else if (key == "energy_min") {
        raw.energy_min = parse_real(value, line);
    } else if (key == "energy_max") {
        raw.energy_max = parse_real(value, line);
    } else if (key == "energy_points") {
        raw.energy_points = static_cast<Index>(parse_integer(value, line));
    } else if (key == "resample_frames") {
        raw.resample_frames = parse_bool(value, line);
    } else if (key == "workers") {
        raw.workers = static_cast<unsigned>(parse_integer(value, line));
    } else {
        throw ParseError(line, "unknown key '" + key + "'");
    }
}

RawConfig parse_document(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError(line_no, "expected 'key: value'");
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (value.empty()) throw ParseError(line_no, "empty value for key '" + key + "'");
        apply_key(raw, key, value, line_no);
    }
    return raw;
}

std::vector<double> broadcast(std::vector<double> values, Index k, const char* name,
                              std::vector<std::string>& errors) {
    if (static_cast<Index>(values.size()) == 1 && k > 1)
        values.assign(static_cast<size_t>(k), values.front());
    if (static_cast<Index>(values.size()) != k)
        errors.push_back(std::string(name) + " must have k_trans entries (or one value)");
    return values;
}

}  // namespace

std::vector<std::string> preset_names() { return {"isolated", "overlapping", "custom"}; }

ParsedConfig parse_config(const std::string& text) { return parse_config(text, {}); }

ParsedConfig parse_config(const std::string& text,
                          const std::vector<std::pair<std::string, std::string>>& overrides) {
    RawConfig raw = parse_document(text);
    for (const auto& [key, value] : overrides) apply_key(raw, key, value, 0);

    ParsedConfig out;
    out.preset = raw.preset.value_or("isolated");

    EnsembleConfig& cfg = out.ensemble;
    ModelConfig& mc = cfg.model;
    mc.n_dim = raw.n_dim.value_or(400);
    mc.k_trans = raw.k_trans.value_or(3);
    mc.lambda = raw.lambda.value_or(1.0);

    std::vector<std::string> errors;
    const double matched = mc.lambda / kPi;   // unit transmission at band center
    mc.channel_strengths_1 =
        raw.channel_strengths_1.value_or(std::vector<double>(25, matched));
    mc.channel_strengths_2 =
        raw.channel_strengths_2.value_or(std::vector<double>(25, matched));
    mc.sv_1 = raw.sv_1 ? broadcast(*raw.sv_1, mc.k_trans, "sv_1", errors)
                       : std::vector<double>(static_cast<size_t>(mc.k_trans), 0.1 * mc.lambda);
    mc.sv_2 = raw.sv_2 ? broadcast(*raw.sv_2, mc.k_trans, "sv_2", errors)
                       : std::vector<double>(static_cast<size_t>(mc.k_trans), 0.1 * mc.lambda);
    mc.seed = raw.seed.value_or(42);

    if (out.preset == "custom") {
        if (!raw.htr_eigenvalues && !raw.htr_matrix)
            errors.push_back("preset 'custom' requires htr_eigenvalues or htr_matrix");
        if (!raw.sv_1 || !raw.sv_2)
            errors.push_back("preset 'custom' requires explicit sv_1 and sv_2");
    } else if (raw.htr_eigenvalues || raw.htr_matrix) {
        errors.push_back("htr_* keys require preset 'custom'");
    }

    if (raw.htr_matrix) {
        const Index k = mc.k_trans;
        if (static_cast<Index>(raw.htr_matrix->size()) != k * k) {
            errors.push_back("htr_matrix must have k_trans^2 entries");
        } else {
            Matrix h(k, k);
            for (Index i = 0; i < k; ++i)
                for (Index j = 0; j < k; ++j)
                    h(i, j) = (*raw.htr_matrix)[static_cast<size_t>(i * k + j)];
            mc.htr = h;
        }
    } else if (raw.htr_eigenvalues) {
        if (static_cast<Index>(raw.htr_eigenvalues->size()) != mc.k_trans)
            errors.push_back("htr_eigenvalues must have k_trans entries");
        else
            mc.htr = htr_from_eigenvalues(*raw.htr_eigenvalues);
    } else if (out.preset != "custom") {
        // Preset spectrum: equidistant levels centered on the band center,
        // spaced by 10 (isolated) or 0.5 (overlapping) typical widths
        // gamma_typ = (mean sv_1^2 + mean sv_2^2) / lambda.
        double v1sq = 0.0, v2sq = 0.0;
        for (double s : mc.sv_1) v1sq += s * s;
        for (double s : mc.sv_2) v2sq += s * s;
        v1sq /= static_cast<double>(std::max<size_t>(mc.sv_1.size(), 1));
        v2sq /= static_cast<double>(std::max<size_t>(mc.sv_2.size(), 1));
        const double gamma_typ = (v1sq + v2sq) / mc.lambda;
        const double spacing = (out.preset == "isolated" ? 10.0 : 0.5) * gamma_typ;
        std::vector<double> levels(static_cast<size_t>(mc.k_trans));
        for (Index m = 0; m < mc.k_trans; ++m)
            levels[static_cast<size_t>(m)] =
                spacing * (static_cast<double>(m) -
                           0.5 * static_cast<double>(mc.k_trans - 1));
        mc.htr = htr_from_eigenvalues(levels);
    }
    if (mc.htr.size() == 0) mc.htr = Matrix::Zero(mc.k_trans, mc.k_trans);

    cfg.n_realizations = raw.n_realizations.value_or(200);
    const double emin = raw.energy_min.value_or(-0.2 * mc.lambda);
    const double emax = raw.energy_max.value_or(0.2 * mc.lambda);
    const Index npts = raw.energy_points.value_or(41);
    if (npts < 1) errors.push_back("energy_points must be >= 1");
    if (emax < emin) errors.push_back("energy_max must be >= energy_min");
    if (npts >= 1 && emax >= emin) {
        cfg.energy_grid.resize(static_cast<size_t>(npts));
        for (Index i = 0; i < npts; ++i)
            cfg.energy_grid[static_cast<size_t>(i)] =
                npts == 1 ? emin
                          : emin + (emax - emin) * static_cast<double>(i) /
                                static_cast<double>(npts - 1);
    }
    cfg.resample_frames = raw.resample_frames.value_or(true);
    cfg.master_seed = mc.seed;
    cfg.worker_hint = raw.workers.value_or(0);

    if (!errors.empty()) throw ValidationError(std::move(errors));
    out.warnings = cfg.validate();   // throws ValidationError on hard violations
    return out;
}

}  // namespace rmtrans
