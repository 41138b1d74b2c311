// nesskit — stationary states, heat fluxes and entropy production for an
// N-level system weakly coupled to two bosonic thermal reservoirs.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nesskit/config.hpp"
#include "nesskit/errors.hpp"
#include "nesskit/report.hpp"
#include "nesskit/run.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::string sweep_spec;
    std::string times_spec;
    std::vector<std::string> tol_overrides;
    double g_override = std::numeric_limits<double>::quiet_NaN();
};

std::vector<double> parse_range(const std::string& spec, bool count_form,
                                const std::string& flag) {
    // a:b:step (sweep) or t0:t1:n (times)
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3)
        throw nesskit::config_error(flag + " expects three colon-separated fields, got '"
                                    + spec + "'");
    double a, b, c;
    try {
        a = std::stod(parts[0]);
        b = std::stod(parts[1]);
        c = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw nesskit::config_error(flag + " fields must be numeric: '" + spec + "'");
    }
    std::vector<double> grid;
    if (count_form) {
        const int n = static_cast<int>(c);
        if (n < 1 || c != n)
            throw nesskit::config_error(flag + " count must be a positive integer");
        if (n == 1) {
            grid.push_back(a);
            return grid;
        }
        for (int i = 0; i < n; ++i)
            grid.push_back(a + (b - a) * i / (n - 1.0));
        return grid;
    }
    if (!(c > 0.0))
        throw nesskit::config_error(flag + " step must be positive");
    for (double x = a; x <= b + 1e-12 * std::abs(c); x += c) grid.push_back(x);
    return grid;
}

nesskit::RunConfig load_config(const CommonOptions& opt) {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in)
        throw nesskit::config_error("cannot read config file '" + opt.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    nesskit::RunConfig cfg = nesskit::parse_config(buf.str());

    if (!std::isnan(opt.g_override)) cfg.g = opt.g_override;
    if (!opt.sweep_spec.empty())
        cfg.sweep_grid = parse_range(opt.sweep_spec, false, "--sweep");
    if (!opt.times_spec.empty())
        cfg.time_grid = parse_range(opt.times_spec, true, "--times");
    for (const std::string& kv : opt.tol_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw nesskit::config_error("--tol expects NAME=VALUE, got '" + kv + "'");
        const std::string name = kv.substr(0, eq);
        if (!nesskit::is_known_tolerance(name))
            throw nesskit::config_error("unknown tolerance '" + name + "'");
        try {
            cfg.tolerances[name] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw nesskit::config_error("tolerance value must be numeric: '" + kv + "'");
        }
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"NESS, heat fluxes and entropy production for an N-level system "
                 "coupled to two bosonic reservoirs"};
    app.require_subcommand(1);

    CommonOptions opt;
    const std::vector<std::string> commands = {"check", "lso", "ness", "thermo", "dynamics"};
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "Path to the JSON configuration")
            ->required();
        sub->add_option("--out", opt.out_dir, "Output directory (default: current)");
        sub->add_option("--g", opt.g_override, "Override the coupling constant");
        sub->add_option("--sweep", opt.sweep_spec, "Delta-beta sweep grid a:b:step");
        sub->add_option("--times", opt.times_spec, "Trajectory time grid t0:t1:n");
        sub->add_option("--tol", opt.tol_overrides, "Tolerance override NAME=VALUE")
            ->take_all();
    }

    auto emit_config_error = [](const std::string& message) {
        nesskit::JsonValue err = nesskit::JsonValue::object();
        nesskit::JsonValue body = nesskit::JsonValue::object();
        body.set("code", 2);
        body.set("kind", "config");
        body.set("message", message);
        err.set("error", std::move(body));
        std::cerr << err.dump();
        return 2;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_config_error(std::string("command line: ") + e.what());
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const nesskit::RunConfig cfg = load_config(opt);
        return nesskit::run_command(command, cfg, opt.out_dir, std::cerr);
    } catch (const nesskit::config_error& e) {
        return emit_config_error(e.what());
    }
}
