#include "sketchbench/report.hpp"

#include "sketchbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>

namespace sketchbench::experiment {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    fn(out);
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

} // namespace

void write_csv(std::ostream& out, const std::vector<Aggregate>& aggregates) {
    if (aggregates.empty()) throw Error(ErrorCode::EmptyInput, "no aggregate rows to write");
    out << "distribution,ell,trials,mean_re,std_re,failures\n";
    for (const auto& a : aggregates) {
        out << csv_field(a.distribution) << ',' << a.ell << ',' << a.trials << ',' << num(a.mean_re) << ','
            << num(a.std_re) << ',' << a.failures << '\n';
    }
}

void emit_csv(const std::vector<Aggregate>& aggregates, const std::filesystem::path& path) {
    if (aggregates.empty()) throw Error(ErrorCode::EmptyInput, "no aggregate rows to write");
    write_file(path, [&](std::ostream& out) { write_csv(out, aggregates); });
}

void write_raw_csv(std::ostream& out, const SweepConfig& config, const std::vector<SweepRecord>& records) {
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "no records to write");
    out << "distribution,ell,trial,seed,relative_error,status,T,sigma_min_omega1,eta,eps_cov,"
           "projection_residual_sq,factored_residual_sq,rhs,bound_holds,error\n";
    for (const auto& r : records) {
        out << csv_field(dist::to_string(config.distributions[r.distribution_id])) << ',' << r.ell << ','
            << r.trial << ',' << r.seed << ',' << (r.failed ? "" : num(r.relative_error)) << ','
            << (r.failed ? "failed" : "ok") << ',';
        if (r.structural) {
            const auto& s = *r.structural;
            out << num(s.t) << ',' << num(s.sigma_min_omega1) << ',' << num(s.eta) << ',' << num(s.eps_cov) << ',';
            if (s.applicable) {
                out << num(s.projection_residual_sq) << ',' << num(s.factored_residual_sq) << ',' << num(s.rhs) << ','
                    << (s.bound_holds ? "true" : "false");
            } else {
                out << ",,,n/a";
            }
        } else {
            out << ",,,,,,,";
        }
        out << ',' << csv_field(r.error) << '\n';
    }
}

void emit_raw_csv(const SweepConfig& config, const std::vector<SweepRecord>& records,
                  const std::filesystem::path& path) {
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "no records to write");
    write_file(path, [&](std::ostream& out) { write_raw_csv(out, config, records); });
}

void write_bounds_csv(std::ostream& out, const std::vector<bounds::BoundReport>& reports) {
    if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no bound reports to write");
    out << "class,k,ell,delta,epsilon,term_bound,error_bound\n";
    for (const auto& r : reports) {
        out << bounds::to_string(r.cls) << ',' << r.k << ',' << r.ell << ',' << num(r.delta) << ',' << num(r.epsilon)
            << ',' << num(r.term_bound) << ',' << num(r.approx_error_bound) << '\n';
    }
}

void write_svg(std::ostream& out, const std::vector<Aggregate>& aggregates, bool log_y) {
    if (aggregates.empty()) throw Error(ErrorCode::EmptyInput, "no aggregate rows to plot");

    std::vector<std::string> names;
    std::map<std::string, std::vector<const Aggregate*>> series;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& a : aggregates) {
        if (!series.count(a.distribution)) names.push_back(a.distribution);
        series[a.distribution].push_back(&a);
        if (!std::isfinite(a.mean_re)) continue;
        xmin = std::min(xmin, double(a.ell));
        xmax = std::max(xmax, double(a.ell));
        const double lo = a.mean_re - a.std_re;
        const double hi = a.mean_re + a.std_re;
        ymin = std::min(ymin, log_y ? (lo > 0.0 ? lo : a.mean_re) : lo);
        ymax = std::max(ymax, hi);
    }
    if (xmin > xmax) {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (log_y) {
        ymin = std::max(ymin, 1e-300);
        ymax = std::max(ymax, ymin * 10.0);
    } else if (ymax == ymin) {
        ymax = ymin + 1.0;
    }
    auto ty = [&](double y) { return log_y ? std::log10(std::max(y, ymin)) : y; };
    const double y0 = ty(ymin), y1 = ty(ymax);

    constexpr double width = 720, height = 480, left = 80, right = 200, top = 30, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << short_num(xv)
            << "</text>\n";
        const double tv = y0 + (y1 - y0) * i / 4.0;
        const double yv = log_y ? std::pow(10.0, tv) : tv;
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << short_num(yv)
            << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">samples (ell)</text>\n";
    out << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << top + ph / 2 << ")\">relative error" << (log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t s = 0; s < names.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        const auto& pts = series[names[s]];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto* a : pts)
            if (std::isfinite(a->mean_re)) out << px(double(a->ell)) << ',' << py(a->mean_re) << ' ';
        out << "\"/>\n";
        for (const auto* a : pts) {
            if (!std::isfinite(a->mean_re)) continue;
            const double x = px(double(a->ell));
            const double sd = std::isfinite(a->std_re) ? a->std_re : 0.0;
            const double lo = py(a->mean_re - sd), hi = py(a->mean_re + sd);
            out << "<line x1=\"" << x << "\" y1=\"" << lo << "\" x2=\"" << x << "\" y2=\"" << hi << "\" stroke=\""
                << color << "\"/>\n";
            out << "<line x1=\"" << x - 3 << "\" y1=\"" << lo << "\" x2=\"" << x + 3 << "\" y2=\"" << lo
                << "\" stroke=\"" << color << "\"/>\n";
            out << "<line x1=\"" << x - 3 << "\" y1=\"" << hi << "\" x2=\"" << x + 3 << "\" y2=\"" << hi
                << "\" stroke=\"" << color << "\"/>\n";
            out << "<circle cx=\"" << x << "\" cy=\"" << py(a->mean_re) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
        const double ly = top + 14 + 18 * double(s);
        out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 32 << "\" y2=\""
            << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\">" << xml_escape(names[s]) << "</text>\n";
    }
    out << "</svg>\n";
}

void emit_svg(const std::vector<Aggregate>& aggregates, const std::filesystem::path& path, bool log_y) {
    if (aggregates.empty()) throw Error(ErrorCode::EmptyInput, "no aggregate rows to plot");
    write_file(path, [&](std::ostream& out) { write_svg(out, aggregates, log_y); });
}

} // namespace sketchbench::experiment
