#include "sketchbench/bounds.hpp"

#include "sketchbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sketchbench::bounds {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidParam, what); }

// Ceiling that ignores rounding noise just above an integer.
std::size_t ceil_count(double x) {
    if (!std::isfinite(x) || x < 0.0) invalid("sample count formula evaluated to " + std::to_string(x));
    return std::size_t(std::ceil(x - 1e-12 * x));
}

double sr_of(const linalg::SpectrumInfo& s) { return s.sigma_perp_norm() > 0.0 ? s.sigma_perp_stable_rank() : 0.0; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

} // namespace

std::string_view to_string(BoundClass c) noexcept {
    switch (c) {
    case BoundClass::entries: return "entries";
    case BoundClass::columns: return "columns";
    case BoundClass::bounded: return "bounded";
    case BoundClass::moment: return "moment";
    case BoundClass::coordinate: return "coordinate";
    case BoundClass::leverage: return "leverage";
    case BoundClass::alpha_subexp: return "alpha_subexp";
    case BoundClass::log_concave: return "log_concave";
    }
    return "?";
}

BoundClass parse_class(std::string_view name) {
    for (BoundClass c : {BoundClass::entries, BoundClass::columns, BoundClass::bounded, BoundClass::moment,
                         BoundClass::coordinate, BoundClass::leverage, BoundClass::alpha_subexp,
                         BoundClass::log_concave}) {
        if (to_string(c) == name) return c;
    }
    invalid("unknown bound class '" + std::string(name) + "'");
}

double BoundParams::constant(std::string_view name) const {
    auto it = constants.find(name);
    if (it == constants.end()) return 1.0;
    if (!(it->second > 0.0)) invalid("constant " + std::string(name) + " must be positive");
    return it->second;
}

double BoundParams::tail(std::string_view name) const {
    auto it = tails.find(name);
    if (it == tails.end()) invalid("missing tail parameter " + std::string(name));
    if (!(it->second > 0.0)) invalid("tail parameter " + std::string(name) + " must be positive");
    return it->second;
}

void BoundParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) invalid("epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) invalid("delta must lie in (0, 1)");
    for (const auto& [name, v] : constants)
        if (!(v > 0.0)) invalid("constant " + name + " must be positive");
}

double v_delta(double delta) {
    if (!(delta > 0.0 && delta < 4.0)) invalid("delta out of range");
    return std::sqrt(std::log(4.0 / delta));
}

double gauss_bound(std::size_t k, std::size_t p, double delta, double sigma_perp_norm, double sr_perp) {
    if (p < 4) invalid("oversampling p must be at least 4, got " + std::to_string(p));
    if (!(delta > 0.0 && delta < 1.0)) invalid("delta must lie in (0, 1)");
    if (k == 0) invalid("k must be positive");
    if (sigma_perp_norm < 0.0 || sr_perp < 0.0) invalid("spectrum quantities must be nonnegative");
    const double ell = double(k + p);
    const double pp1 = double(p) + 1.0;
    const double big_delta = std::sqrt(2.0 * std::log(2.0 / delta));
    const double prefactor = std::pow(4.0 / delta, 1.0 / double(p));
    return sigma_perp_norm * prefactor *
           (std::sqrt(3.0 * double(k) / pp1) + std::numbers::e * std::sqrt(ell) / pp1 * (big_delta + std::sqrt(sr_perp)));
}

std::size_t sample_size(BoundClass cls, std::size_t k, std::size_t n, const BoundParams& p) {
    p.validate();
    if (k == 0) invalid("k must be positive");
    const double dk = double(k);
    const double eps2 = p.epsilon * p.epsilon;
    const double vd = v_delta(p.delta);
    const double root = std::sqrt(dk) + vd;
    switch (cls) {
    case BoundClass::entries:
        return ceil_count(p.constant("C_ES") * std::pow(p.tail("K_E"), 4) / eps2 * root * root);
    case BoundClass::columns:
        return ceil_count(p.constant("C_CS") * std::pow(p.tail("K_C"), 4) / eps2 * root * root);
    case BoundClass::bounded: {
        const double kk = p.tail("K_k");
        return ceil_count(2.0 * kk * kk / eps2 * std::log(4.0 * dk / p.delta));
    }
    case BoundClass::leverage: {
        const double gamma = p.tail("gamma");
        if (gamma > 1.0) invalid("gamma must lie in (0, 1]");
        return ceil_count(2.0 * (dk / gamma) / eps2 * std::log(4.0 * dk / p.delta));
    }
    case BoundClass::coordinate:
        if (n == 0) invalid("n must be positive");
        return ceil_count(2.0 * double(n) * p.tail("mu") / eps2 * std::log(2.0 * dk / p.delta));
    case BoundClass::moment:
        return ceil_count(p.tail("K_M") * p.constant("C_BCS") / (eps2 * p.delta * p.delta) * std::log(dk));
    case BoundClass::alpha_subexp: {
        if (n == 0) invalid("n must be positive");
        const double m = p.tail("M");
        const double alpha = p.tail("alpha");
        if (alpha > 2.0) invalid("alpha must lie in (0, 2]");
        const double inner = dk + m * m * (std::sqrt(dk * std::log(double(n))) + std::pow(2.0 / alpha, 2.0 / alpha));
        return ceil_count(p.constant("C_SUBEXP") * inner * std::log(dk));
    }
    case BoundClass::log_concave:
        if (n == 0) invalid("n must be positive");
        return ceil_count(p.constant("C_LOGCONCAVE") * (dk + std::log(double(n))) * std::log(dk));
    }
    invalid("unknown class");
}

BoundReport term_bound(BoundClass cls, const BoundParams& p, const linalg::SpectrumInfo& spectrum,
                       std::size_t ell, std::size_t q) {
    p.validate();
    if (ell == 0) invalid("ell must be positive");
    BoundReport r;
    r.cls = cls;
    r.k = spectrum.k;
    r.ell = ell;
    r.q = q;
    r.epsilon = p.epsilon;
    r.delta = p.delta;
    r.asymptotic = cls == BoundClass::alpha_subexp || cls == BoundClass::log_concave;
    r.ell_required = sample_size(cls, spectrum.k, spectrum.vk.rows(), p);
    r.undersampled = ell < r.ell_required;

    const double sp = spectrum.sigma_perp_norm();
    const double sp2 = sp * sp;
    const double sr = sr_of(spectrum);
    const double dl = double(ell);
    const double dk = double(spectrum.k);
    const double vd = v_delta(p.delta);
    const double one_m_eps = 1.0 - p.epsilon;
    const double damp = std::pow(spectrum.gamma_k(), 4.0 * double(q));

    switch (cls) {
    case BoundClass::entries:
        r.term_bound = p.constant("C_EB") * p.tail("K_E") * sp / (one_m_eps * std::sqrt(dl)) *
                       (std::sqrt(sr) + std::sqrt(dk) + vd);
        r.approx_error_bound = sp2 + damp * r.term_bound * r.term_bound;
        break;
    case BoundClass::columns: {
        const double kc = p.tail("K_C");
        r.term_bound = sp / (one_m_eps * std::sqrt(dl)) *
                       (std::sqrt(dl) + p.constant("C_CB") * kc * kc * (std::sqrt(sr) + vd));
        r.approx_error_bound = sp2 + damp * r.term_bound * r.term_bound;
        break;
    }
    case BoundClass::bounded:
    case BoundClass::coordinate:
    case BoundClass::leverage: {
        const double kp = p.tail("K_perp");
        if (kp < 1.0) invalid("K_perp must be at least 1");
        // Both displays are kept as printed: K_perp^2 / 3 in the term bound,
        // K_perp^2 in the error bound.
        const double beta = sr > 0.0 ? std::log(16.0 * sr / p.delta) : 0.0;
        r.term_bound = sp / std::sqrt(one_m_eps * dl) * std::sqrt(3.0 * dl + kp * kp / 3.0 * beta);
        r.approx_error_bound = sp2 + damp * sp2 / (one_m_eps * dl) * (3.0 * dl + kp * kp * beta);
        break;
    }
    case BoundClass::moment:
    case BoundClass::alpha_subexp:
    case BoundClass::log_concave:
        r.term_bound = sp / (one_m_eps * p.delta) * (1.0 + 2.0 * std::sqrt(sr));
        r.approx_error_bound = sp2 + damp * r.term_bound * r.term_bound;
        break;
    }
    return r;
}

WidthEstimate mc_gaussian_width(const DenseMatrix& h, std::size_t samples, const SeedSpec& seed) {
    if (samples < 1000) invalid("Gaussian width needs at least 1000 samples");
    if (h.empty()) return {};
    RandomStream rs(seed);
    std::vector<double> g(h.rows());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
        for (double& x : g) x = rs.normal();
        const double v = norm2(matvec_t(h, g));
        const double d = v - mean;
        mean += d / double(t + 1);
        m2 += d * (v - mean);
    }
    const double var = m2 / double(samples - 1);
    return {mean, std::sqrt(var / double(samples))};
}

double nystrom_bound(const BoundParams& p, std::span<const double> eigen_perp, std::size_t ell) {
    p.validate();
    if (ell == 0) invalid("ell must be positive");
    double lmax = 0.0;
    double trace = 0.0;
    for (double l : eigen_perp) {
        if (l < 0.0) invalid("trailing eigenvalues must be nonnegative");
        lmax = std::max(lmax, l);
        trace += l;
    }
    if (lmax == 0.0) return 0.0;
    const double kc = p.tail("K_C");
    const double dl = double(ell);
    const double root_l = std::sqrt(lmax);
    const double inner =
        std::sqrt(dl) * root_l + p.constant("C_CB") * kc * kc * (std::sqrt(trace) + v_delta(p.delta) * root_l);
    const double one_m_eps = 1.0 - p.epsilon;
    return lmax + inner * inner / (one_m_eps * one_m_eps * dl);
}

std::map<std::string, double, std::less<>> load_constants(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::map<std::string, double, std::less<>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected name = value");
        const std::string name = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (name.empty() || used == 0 || used != value.size()) throw ParseError(lineno, "bad entry '" + line + "'");
        out[name] = v;
    }
    return out;
}

void save_constants(const std::filesystem::path& path, const std::map<std::string, double, std::less<>>& values) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    char buf[64];
    for (const auto& [name, v] : values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << name << " = " << buf << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::map<std::string, double, std::less<>> calibrate_constants(std::span<const double> realized_t,
                                                               const linalg::SpectrumInfo& spectrum,
                                                               std::size_t ell, const BoundParams& params) {
    if (realized_t.empty()) throw Error(ErrorCode::EmptyInput, "no trials to calibrate against");
    params.validate();
    const double sp = spectrum.sigma_perp_norm();
    if (!(sp > 0.0)) invalid("calibration needs a nonzero trailing spectrum");
    const double sr = sr_of(spectrum);
    const double dl = double(ell);
    const double vd = v_delta(params.delta);
    const double one_m_eps = 1.0 - params.epsilon;
    const double ke = params.tails.count("K_E") ? params.tail("K_E") : 1.0;
    const double kc = params.tails.count("K_C") ? params.tail("K_C") : 1.0;

    std::vector<double> c_eb, c_cb;
    for (double t : realized_t) {
        if (!std::isfinite(t)) continue;
        const double scaled = t * one_m_eps * std::sqrt(dl) / sp;
        c_eb.push_back(scaled / (ke * (std::sqrt(sr) + std::sqrt(double(spectrum.k)) + vd)));
        c_cb.push_back(std::max(0.0, (scaled - std::sqrt(dl)) / (kc * kc * (std::sqrt(sr) + vd))));
    }
    if (c_eb.empty()) throw Error(ErrorCode::EmptyInput, "no finite trial values");
    // Allow floor(delta * N) exceedances.
    const std::size_t allowed = std::size_t(std::floor(params.delta * double(c_eb.size())));
    const std::size_t idx = c_eb.size() - 1 - std::min(allowed, c_eb.size() - 1);
    std::sort(c_eb.begin(), c_eb.end());
    std::sort(c_cb.begin(), c_cb.end());
    std::map<std::string, double, std::less<>> out;
    out["C_EB"] = c_eb[idx];
    // A zero constant is not allowed; the columns bound already covers these trials with sqrt(ell).
    out["C_CB"] = std::max(c_cb[idx], std::numeric_limits<double>::min());
    return out;
}

} // namespace sketchbench::bounds
