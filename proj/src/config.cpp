#include "sketchbench/config.hpp"

#include "sketchbench/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace sketchbench::experiment {

namespace pt = boost::property_tree;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T v{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        config_error(key + ": expected a number, got '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    config_error(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::size_t> parse_counts(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
        out.push_back(parse_number<std::size_t>(key, item));
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

SweepConfig parse_config(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        config_error(e.what());
    }

    SweepConfig c;
    const std::set<std::string> sections = {"matrix", "algorithm", "sweep", "output"};
    for (const auto& [section, body] : tree) {
        if (!sections.count(section)) {
            config_error(body.empty() ? "key '" + section + "' outside any section" : "unknown section [" + section + "]");
        }
        for (const auto& [key, node] : body) {
            const std::string name = section + "." + key;
            const std::string v = node.get_value<std::string>();
            try {
                if (section == "matrix") {
                    if (key == "kind") c.matrix.kind = testmat::parse_recipe_kind(v);
                    else if (key == "m") c.matrix.m = parse_number<std::size_t>(name, v);
                    else if (key == "n") c.matrix.n = parse_number<std::size_t>(name, v);
                    else if (key == "r") c.matrix.r = parse_number<std::size_t>(name, v);
                    else if (key == "d") c.matrix.d = parse_number<double>(name, v);
                    else if (key == "density") c.matrix.density = parse_number<double>(name, v);
                    else if (key == "path") c.matrix.path = v;
                    else if (key == "header") c.matrix.header = parse_bool(name, v);
                    else if (key == "seed") c.matrix.seed = parse_number<std::uint64_t>(name, v);
                    else config_error("unknown key " + name);
                } else if (section == "algorithm") {
                    if (key == "name") {
                        if (v == "rsvd") c.algorithm = Algorithm::rsvd;
                        else if (v == "nystrom") c.algorithm = Algorithm::nystrom;
                        else config_error(name + ": expected rsvd or nystrom, got '" + v + "'");
                    } else if (key == "q") c.q = parse_number<std::size_t>(name, v);
                    else if (key == "stabilized") c.stabilized = parse_bool(name, v);
                    else config_error("unknown key " + name);
                } else if (section == "sweep") {
                    if (key == "k") c.k = parse_number<std::size_t>(name, v);
                    else if (key == "distributions") c.distributions = dist::parse_list(v);
                    else if (key == "ell") c.ell_grid = parse_counts(name, v);
                    else if (key == "trials") c.trials = parse_number<std::size_t>(name, v);
                    else if (key == "master_seed") c.master_seed = parse_number<std::uint64_t>(name, v);
                    else config_error("unknown key " + name);
                } else {
                    if (key == "csv") c.csv_path = v;
                    else if (key == "svg") c.svg_path = v;
                    else if (key == "log_y") c.log_y = parse_bool(name, v);
                    else if (key == "raw") c.raw_path = v;
                    else if (key == "bounds") c.bounds = parse_bool(name, v);
                    else if (key == "delta") c.delta = parse_number<double>(name, v);
                    else config_error("unknown key " + name);
                }
            } catch (const Error& e) {
                if (e.code() == ErrorCode::ConfigError) throw;
                config_error(name + ": " + e.what());
            }
        }
    }
    validate(c);
    return c;
}

SweepConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string print_config(const SweepConfig& c) {
    std::ostringstream out;
    out << "[matrix]\n";
    out << "kind = " << testmat::to_string(c.matrix.kind) << '\n';
    switch (c.matrix.kind) {
    case testmat::RecipeKind::controlled_gap:
        out << "m = " << c.matrix.m << '\n' << "n = " << c.matrix.n << '\n' << "r = " << c.matrix.r << '\n';
        out << "density = " << fmt(c.matrix.density) << '\n' << "seed = " << c.matrix.seed << '\n';
        break;
    case testmat::RecipeKind::fast_decay:
    case testmat::RecipeKind::fast_decay_psd:
        out << "n = " << c.matrix.n << '\n' << "r = " << c.matrix.r << '\n' << "d = " << fmt(c.matrix.d) << '\n';
        out << "seed = " << c.matrix.seed << '\n';
        break;
    case testmat::RecipeKind::rbf_laplacian:
        out << "path = " << c.matrix.path << '\n' << "header = " << (c.matrix.header ? "true" : "false") << '\n';
        break;
    case testmat::RecipeKind::load:
        out << "path = " << c.matrix.path << '\n';
        break;
    }
    out << "\n[algorithm]\n";
    out << "name = " << (c.algorithm == Algorithm::rsvd ? "rsvd" : "nystrom") << '\n';
    if (c.algorithm == Algorithm::rsvd) {
        out << "q = " << c.q << '\n' << "stabilized = " << (c.stabilized ? "true" : "false") << '\n';
    }
    out << "\n[sweep]\n";
    out << "k = " << c.k << '\n';
    out << "distributions = ";
    for (std::size_t i = 0; i < c.distributions.size(); ++i) out << (i ? ", " : "") << dist::to_string(c.distributions[i]);
    out << '\n' << "ell = ";
    for (std::size_t i = 0; i < c.ell_grid.size(); ++i) out << (i ? ", " : "") << c.ell_grid[i];
    out << '\n' << "trials = " << c.trials << '\n' << "master_seed = " << c.master_seed << '\n';
    out << "\n[output]\n";
    if (!c.csv_path.empty()) out << "csv = " << c.csv_path << '\n';
    if (!c.svg_path.empty()) out << "svg = " << c.svg_path << '\n';
    out << "log_y = " << (c.log_y ? "true" : "false") << '\n';
    if (!c.raw_path.empty()) out << "raw = " << c.raw_path << '\n';
    out << "bounds = " << (c.bounds ? "true" : "false") << '\n';
    out << "delta = " << fmt(c.delta) << '\n';
    return out.str();
}

void validate(const SweepConfig& c) {
    if (c.distributions.empty()) config_error("sweep.distributions is empty");
    if (c.ell_grid.empty()) config_error("sweep.ell is empty");
    if (c.trials < 1) config_error("sweep.trials must be at least 1");
    if (c.k < 1) config_error("sweep.k must be at least 1");
    for (std::size_t ell : c.ell_grid) {
        if (ell == 0) config_error("sweep.ell entries must be positive");
        if ((c.bounds || c.algorithm == Algorithm::nystrom) && ell < c.k) {
            config_error("sweep.ell entry " + std::to_string(ell) + " is below k=" + std::to_string(c.k));
        }
    }
    if (c.bounds && c.algorithm != Algorithm::rsvd) config_error("bounds mode needs algorithm rsvd");
    if (!(c.delta > 0.0 && c.delta < 1.0)) config_error("output.delta must lie in (0, 1)");
    if ((c.matrix.kind == testmat::RecipeKind::rbf_laplacian || c.matrix.kind == testmat::RecipeKind::load) &&
        c.matrix.path.empty()) {
        config_error("matrix.path is required for kind " + std::string(testmat::to_string(c.matrix.kind)));
    }
}

} // namespace sketchbench::experiment
