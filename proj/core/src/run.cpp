#include "nesskit/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "nesskit/dynamics.hpp"
#include "nesskit/errors.hpp"
#include "nesskit/levelshift.hpp"
#include "nesskit/ness.hpp"
#include "nesskit/report.hpp"
#include "nesskit/thermo.hpp"
#include "nesskit/thresholds.hpp"

namespace nesskit {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw numerical_error("cannot open output file " + path.string());
    out << content;
}

double tolerance(const RunConfig& cfg, const std::string& name, double fallback) {
    auto it = cfg.tolerances.find(name);
    return it == cfg.tolerances.end() ? fallback : it->second;
}

int sweep_threads() {
    if (const char* env = std::getenv("NESSKIT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0; // hardware concurrency
}

const char* flag_name(ConditionFlag f) {
    switch (f) {
        case ConditionFlag::Pass: return "pass";
        case ConditionFlag::Fail: return "fail";
        default: return "not-evaluable";
    }
}

std::string csv_row(const std::vector<double>& values) {
    std::string row;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) row += ',';
        row += format_double(values[i]);
    }
    row += '\n';
    return row;
}

void cmd_check(const RunConfig& cfg, const fs::path& out) {
    const ConditionReport rep = check_conditions(
        cfg.particle, cfg.reservoir_1, cfg.reservoir_2, cfg.g, cfg.mu,
        cfg.delta0, cfg.im_delta,
        tolerance(cfg, "quadrature_abs", 1e-10),
        tolerance(cfg, "bohr_degeneracy", 1e-10));

    JsonValue root = JsonValue::object();
    root.set("fgr_gamma0", rep.fgr_gamma0);
    root.set("fgr_applicable", rep.fgr_applicable);
    root.set("sa_integral", rep.sa_integral);
    JsonValue norms = JsonValue::array();
    norms.push(rep.cond_b_norms[0]);
    norms.push(rep.cond_b_norms[1]);
    root.set("cond_b_norms", std::move(norms));
    root.set("g0", rep.g0);
    root.set("g0_infinite", rep.g0_infinite);
    root.set("g1", rep.g1);
    root.set("alpha_exponent", rep.alpha_exponent);
    root.set("mu", rep.mu);
    root.set("cone_a", rep.cone_a);
    root.set("epsilon_g_rho", rep.epsilon_g_rho);
    root.set("rho", rep.rho);
    root.set("abs_delta_beta", rep.abs_delta_beta);
    root.set("min_beta", rep.min_beta);
    root.set("bohr_degenerate", rep.bohr_degenerate);
    JsonValue flags = JsonValue::object();
    flags.set("A", flag_name(rep.condition_a));
    flags.set("B", flag_name(rep.condition_b));
    flags.set("C", flag_name(rep.condition_c));
    flags.set("D", flag_name(rep.condition_d));
    flags.set("E", "reported-only");
    root.set("flags", std::move(flags));
    root.set("note", "threshold values are up to an unspecified multiplicative constant (C = 1)");
    write_file(out / "check.json", root.dump());

    if (rep.condition_d == ConditionFlag::Fail)
        throw physics_error("Condition (D) fails: fgr_gamma0 = 0 (uncoupled level pair)");
    if (rep.condition_d == ConditionFlag::NotEvaluable)
        throw physics_error("Condition (D) not applicable for a single-level system");
}

JsonValue certificate_to_json(const SpectralCertificate& cert) {
    JsonValue jc = JsonValue::object();
    JsonValue evs = JsonValue::array();
    for (int i = 0; i < cert.eigenvalues.size(); ++i)
        evs.push(complex_to_json(cert.eigenvalues(i)));
    jc.set("eigenvalues", std::move(evs));
    jc.set("zero_count", cert.zero_count);
    jc.set("zero_tol", cert.zero_tol);
    jc.set("gap", cert.gap);
    jc.set("upper_half", cert.upper_half);
    jc.set("simple_kernel", cert.simple_kernel);
    return jc;
}

void cmd_lso(const RunConfig& cfg, const fs::path& out) {
    const LevelShiftSet set = build_level_shift_set(
        cfg.particle, cfg.reservoir_1, cfg.reservoir_2, cfg.particle.beta_p(),
        tolerance(cfg, "zero_eigenvalue", 1e-10));

    double g1 = std::numeric_limits<double>::quiet_NaN();
    if (cfg.particle.dim() >= 2 && cfg.reservoir_1.form_factor.is_power_gaussian()
        && cfg.reservoir_2.form_factor.is_power_gaussian()) {
        g1 = coupling_thresholds(cfg.particle, cfg.reservoir_1, cfg.reservoir_2,
                                 cfg.mu, cfg.delta0).g1;
    }
    const ResonanceForecast forecast = resonance_forecast(
        cfg.particle, cfg.reservoir_1, cfg.reservoir_2, cfg.g,
        cfg.particle.beta_p(), cfg.tau_prime, g1);

    JsonValue root = JsonValue::object();
    root.set("beta_p", set.beta_p);
    root.set("gamma_10", matrix_to_json(set.gamma_10));
    root.set("gamma_20", matrix_to_json(set.gamma_20));
    root.set("lambda_zero", matrix_to_json(set.lambda_zero));
    root.set("certificate", certificate_to_json(set.certificate));

    JsonValue widths = JsonValue::array();
    for (const auto& e : set.nonzero) {
        JsonValue w = JsonValue::object();
        w.set("upper", e.upper);
        w.set("lower", e.lower);
        w.set("bohr_frequency", e.e);
        w.set("im_lambda", e.width ? JsonValue(*e.width) : JsonValue());
        w.set("real_part_computed", false);
        widths.push(std::move(w));
    }
    root.set("nonzero_widths", std::move(widths));

    JsonValue jf = JsonValue::object();
    JsonValue groups = JsonValue::array();
    for (const auto& grp : forecast.groups) {
        JsonValue jg = JsonValue::object();
        jg.set("e", grp.e);
        JsonValue rs = JsonValue::array();
        for (const Complex& z : grp.resonances) rs.push(complex_to_json(z));
        jg.set("resonances", std::move(rs));
        jg.set("refused", grp.refused);
        groups.push(std::move(jg));
    }
    jf.set("groups", std::move(groups));
    jf.set("gap_bound", forecast.gap_bound);
    jf.set("coupling_above_threshold", forecast.coupling_above_threshold);
    jf.set("constant_c", "unspecified, taken 1");
    root.set("resonance_forecast", std::move(jf));

    write_file(out / "lso.json", root.dump());

    if (!set.certificate.simple_kernel)
        throw physics_error("spectral certificate failed: degenerate kernel");
}

void cmd_ness(const RunConfig& cfg, const fs::path& out) {
    const NessSolution sol = solve_ness(cfg.particle, cfg.reservoir_1, cfg.reservoir_2);

    JsonValue root = JsonValue::object();
    root.set("beta_p", cfg.particle.beta_p());
    root.set("gamma", vector_to_json(sol.gamma));
    root.set("populations", vector_to_json(sol.populations));
    root.set("zeta", vector_to_json(sol.zeta));
    root.set("zeta_star", vector_to_json(sol.zeta_star));
    JsonValue residuals = JsonValue::object();
    residuals.set("lambda0_zeta", sol.residual_zeta);
    residuals.set("lambda0_adjoint_zeta_star", sol.residual_zeta_star);
    root.set("residuals", std::move(residuals));
    write_file(out / "ness.json", root.dump());

    std::string csv;
    const int n = cfg.particle.dim();
    for (int i = 0; i < n; ++i) csv += "gamma_" + std::to_string(i) + ",";
    for (int i = 0; i < n; ++i) csv += "pop_" + std::to_string(i) + ",";
    csv += "residual_zeta,residual_zeta_star\n";
    std::vector<double> row;
    for (int i = 0; i < n; ++i) row.push_back(sol.gamma(i));
    for (int i = 0; i < n; ++i) row.push_back(sol.populations(i));
    row.push_back(sol.residual_zeta);
    row.push_back(sol.residual_zeta_star);
    csv += csv_row(row);
    write_file(out / "ness.csv", csv);
}

void cmd_thermo(const RunConfig& cfg, const fs::path& out) {
    const ThermoReport rep = thermo_report(cfg.particle, cfg.reservoir_1, cfg.reservoir_2, cfg.g);

    JsonValue root = JsonValue::object();
    root.set("eta_prime_1", rep.eta_prime_1);
    root.set("eta_prime_2", rep.eta_prime_2);
    root.set("flux_sum", rep.flux_sum);
    root.set("ep_leading", rep.ep_leading);
    root.set("g", rep.g);
    root.set("linear_coefficient",
             rep.linear_coefficient ? JsonValue(*rep.linear_coefficient) : JsonValue());
    root.set("phi_0", 0.0); // flux into the particle system vanishes at stationarity
    write_file(out / "thermo.json", root.dump());

    if (!cfg.sweep_grid.empty()) {
        const SweepResult sw = sweep(cfg.particle, cfg.reservoir_1, cfg.reservoir_2,
                                     cfg.sweep_grid, cfg.g, sweep_threads());
        std::string csv = "delta_beta,eta_prime_1,eta_prime_2,ep_leading\n";
        for (const auto& row : sw.rows)
            csv += csv_row({row.delta_beta, row.eta_prime_1, row.eta_prime_2, row.ep_leading});
        write_file(out / "thermo_sweep.csv", csv);
    }
}

void cmd_dynamics(const RunConfig& cfg, const fs::path& out) {
    if (cfg.time_grid.empty())
        throw config_error("dynamics requires a time grid (--times or options.times)");
    const RateMatrix rm = build_generator(cfg.particle, cfg.reservoir_1, cfg.reservoir_2);
    const int n = cfg.particle.dim();
    Eigen::VectorXd p0 = cfg.initial_state
        ? *cfg.initial_state
        : Eigen::VectorXd::Constant(n, 1.0 / n);
    const Trajectory tr = evolve(rm, p0, cfg.g, cfg.time_grid);

    std::string csv = "t";
    for (int i = 0; i < n; ++i) csv += ",p_" + std::to_string(i);
    csv += ",flux_1,flux_2\n";
    for (size_t it = 0; it < tr.times.size(); ++it) {
        std::vector<double> row{tr.times[it]};
        for (int i = 0; i < n; ++i) row.push_back(tr.populations(static_cast<int>(it), i));
        row.push_back(tr.fluxes(static_cast<int>(it), 0));
        row.push_back(tr.fluxes(static_cast<int>(it), 1));
        csv += csv_row(row);
    }
    write_file(out / "dynamics.csv", csv);
}

void write_error(std::ostream& diag, int code, const char* kind, const std::string& message) {
    JsonValue err = JsonValue::object();
    JsonValue body = JsonValue::object();
    body.set("code", code);
    body.set("kind", kind);
    body.set("message", message);
    err.set("error", std::move(body));
    diag << err.dump();
}

} // namespace

int run_command(const std::string& command, const RunConfig& cfg,
                const std::string& out_dir, std::ostream& diagnostics) {
    try {
        const fs::path out(out_dir);
        fs::create_directories(out);

        JsonValue meta = JsonValue::object();
        meta.set("tool", "nesskit");
        meta.set("command", command);
        write_file(out / "run_meta.json", meta.dump());

        if (command == "check")
            cmd_check(cfg, out);
        else if (command == "lso")
            cmd_lso(cfg, out);
        else if (command == "ness")
            cmd_ness(cfg, out);
        else if (command == "thermo")
            cmd_thermo(cfg, out);
        else if (command == "dynamics")
            cmd_dynamics(cfg, out);
        else
            throw config_error("unknown command '" + command + "'");
        return 0;
    } catch (const config_error& e) {
        write_error(diagnostics, 2, "config", e.what());
        return 2;
    } catch (const physics_error& e) {
        write_error(diagnostics, 3, "physics", e.what());
        return 3;
    } catch (const numerical_error& e) {
        write_error(diagnostics, 4, "numerical", e.what());
        return 4;
    }
}

} // namespace nesskit
