#include "pcg/cli.hpp"

#include "pcg/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace pcg {

namespace {

const std::vector<std::string> kKeys{"experiment", "dim", "p", "family", "count", "mc_budget", "seed", "out", "emit", "alpha"};
const std::set<std::string> kEmitKinds{"csv", "json", "plotdata"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    in >> out;
    if (value.empty() || in.fail() || !in.eof()) {
        throw ConfigError(fmt::format("malformed value '{}' for {}", value, key));
    }
    return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
    if (!value.empty() && value.find_first_not_of("+-0123456789") == std::string::npos) {
        return parse_number<long long>(key, value);
    }
    throw ConfigError(fmt::format("malformed value '{}' for {} (expected an integer)", value, key));
}

std::string format_config_double(double x) { return fmt::format("{:.17g}", x); }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
    out << content;
    if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

}  // namespace

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "experiment") {
        cfg.experiment = value;
    } else if (key == "dim") {
        const auto d = parse_integer(key, value);
        if (d < 0 || d > 1'000'000) throw ConfigError(fmt::format("dimension {} outside the dimension cap [2, {}]", d, kMaxExperimentDimension));
        cfg.corpus.dim = static_cast<int>(d);
    } else if (key == "p") {
        cfg.corpus.p = parse_number<double>(key, value);
    } else if (key == "family") {
        try {
            const auto [family, param] = parse_family(value);
            cfg.corpus.family = family;
            cfg.corpus.param = param;
        } catch (const InvalidBodyError& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "count") {
        const auto c = parse_integer(key, value);
        if (c < 0 || c > 1'000'000'000) throw ConfigError(fmt::format("count {} out of range", c));
        cfg.corpus.count = static_cast<int>(c);
    } else if (key == "mc_budget") {
        cfg.mc_budget = static_cast<long>(parse_integer(key, value));
    } else if (key == "seed") {
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError(fmt::format("malformed value '{}' for seed (expected a non-negative integer)", value));
        }
        cfg.corpus.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "out") {
        if (value.empty()) throw ConfigError("out must not be empty");
        cfg.output_dir = value;
    } else if (key == "emit") {
        std::set<std::string> kinds;
        std::stringstream in(value);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            if (!kEmitKinds.count(item)) throw ConfigError(fmt::format("unknown emit kind '{}' (csv, json, plotdata)", item));
            kinds.insert(item);
        }
        cfg.emit = std::move(kinds);
    } else if (key == "alpha") {
        if (value == "default") {
            cfg.alpha.reset();
        } else {
            cfg.alpha = parse_number<double>(key, value);
        }
    } else {
        throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", number));
        apply_config_value(cfg, trim(t.substr(0, eq)), t.substr(eq + 1));
    }
}

std::string serialize_config(const RunConfig& cfg) {
    std::string emit;
    for (const auto& k : cfg.emit) emit += (emit.empty() ? "" : ",") + k;
    std::string out;
    out += fmt::format("experiment = {}\n", cfg.experiment);
    out += fmt::format("dim = {}\n", cfg.corpus.dim);
    out += fmt::format("p = {}\n", format_config_double(cfg.corpus.p));
    out += fmt::format("family = {}\n", cfg.corpus.param != 0.0
                                            ? fmt::format("{}({})", to_string(cfg.corpus.family),
                                                          format_config_double(cfg.corpus.param))
                                            : to_string(cfg.corpus.family));
    out += fmt::format("count = {}\n", cfg.corpus.count);
    out += fmt::format("mc_budget = {}\n", cfg.mc_budget);
    out += fmt::format("seed = {}\n", cfg.corpus.seed);
    out += fmt::format("out = {}\n", cfg.output_dir);
    out += fmt::format("emit = {}\n", emit);
    out += fmt::format("alpha = {}\n", cfg.alpha ? format_config_double(*cfg.alpha) : std::string("default"));
    return out;
}

void RunConfig::validate() const {
    const auto& names = experiment_names();
    if (experiment.empty()) throw ConfigError("missing experiment (--experiment)");
    if (std::find(names.begin(), names.end(), experiment) == names.end()) {
        throw ConfigError(fmt::format("unknown experiment '{}'", experiment));
    }
    try {
        corpus.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (mc_budget < kMinBudget || mc_budget > kMaxBudget) {
        throw ConfigError(fmt::format("mc_budget {} outside the budget cap [{}, {}]", mc_budget, kMinBudget, kMaxBudget));
    }
    if (alpha && !(*alpha > 1.0 / corpus.p - 0.5)) {
        throw ConfigError(fmt::format("alpha = {} must exceed 1/p - 1/2 = {}", *alpha, 1.0 / corpus.p - 0.5));
    }
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"pcg: computational p-convex geometry experiments", "pcg"};
    std::map<std::string, std::string> flags;
    std::string config_file;
    const std::vector<std::pair<std::string, std::string>> options{
        {"experiment", "--experiment"}, {"dim", "--dim"},   {"p", "--p"},       {"family", "--family"},
        {"count", "--count"},           {"mc_budget", "--mc-budget"}, {"seed", "--seed"}, {"out", "--out"},
        {"emit", "--emit"},             {"alpha", "--alpha"},
    };
    for (const auto& [key, flag] : options) app.add_option(flag, flags[key], "config key " + key);
    app.add_option("--config", config_file, "key = value config file");
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    RunConfig cfg;
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", config_file));
        std::stringstream buf;
        buf << in.rdbuf();
        apply_config_text(cfg, buf.str());
    }
    for (const auto& [key, flag] : options) {
        if (app.get_option(flag)->count() > 0) apply_config_value(cfg, key, flags[key]);
    }
    cfg.validate();
    return cfg;
}

std::vector<std::string> emit_report(const ExperimentReport& report, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
    const std::string stem = fmt::format("{}_{}", report.name, report.seed);
    std::vector<std::string> written;
    if (cfg.emit.count("json")) {
        write_file(dir / (stem + ".json"), report_json(report));
        written.push_back((dir / (stem + ".json")).string());
    }
    if (cfg.emit.count("csv")) {
        write_file(dir / (stem + ".csv"), report_csv(report));
        written.push_back((dir / (stem + ".csv")).string());
    }
    if (cfg.emit.count("plotdata")) {
        write_file(dir / (stem + ".plot.csv"), report_plot_csv(report));
        written.push_back((dir / (stem + ".plot.csv")).string());
    }
    return written;
}

int run_cli(const std::vector<std::string>& args) {
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const CLI::CallForHelp&) {
        std::cout << "usage: pcg --experiment NAME [--dim N] [--p P] [--family F] [--count C] [--mc-budget B]\n"
                     "           [--seed S] [--out DIR] [--emit csv,json,plotdata] [--alpha A] [--config FILE]\n"
                     "experiments:";
        for (const auto& n : experiment_names()) std::cout << ' ' << n;
        std::cout << "\nfamilies: lp_ball random_pconv(m) slab_pair(eps) cap_body(eps) random_ellipsoid(cond) "
                     "random_polytope(v)\n";
        return exit_ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    try {
        const ExperimentReport report = run_experiment(cfg.experiment, cfg.corpus, cfg.options());
        for (const auto& path : emit_report(report, cfg)) std::cout << "wrote " << path << '\n';
        const auto& s = report.summary;
        std::cout << fmt::format("{}: n={} p={} instances={} failed={} min={} max={} mean={} fitted={} ({})\n",
                                 report.name, report.dimension, report.p, report.rows.size(), s.failed,
                                 format_number(s.min_ratio), format_number(s.max_ratio), format_number(s.mean_ratio),
                                 format_number(s.fitted_constant), s.fitted_rule);
        if (!report.violations.empty()) {
            for (const auto& v : report.violations) std::cerr << "assertion failed: " << v << '\n';
            return exit_assertion;
        }
        return exit_ok;
    } catch (const ResourceError& e) {
        std::cerr << "resource cap exceeded: " << e.what() << '\n';
        return exit_resource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace pcg
