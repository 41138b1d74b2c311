#include "nesskit/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "nesskit/errors.hpp"
#include "nesskit/report.hpp"

namespace nesskit {

namespace {

using nlohmann::json;

const std::set<std::string>& known_tolerances() {
    static const std::set<std::string> names = {
        "quadrature_abs", "bohr_degeneracy", "zero_eigenvalue"};
    return names;
}

class Collector {
public:
    void add(const std::string& msg) { errors_.push_back(msg); }
    bool ok() const { return errors_.empty(); }
    [[noreturn]] void raise() const {
        std::string joined = "invalid configuration:";
        for (const auto& e : errors_) joined += "\n  - " + e;
        throw config_error(joined);
    }
    void raise_if_any() const {
        if (!ok()) raise();
    }

private:
    std::vector<std::string> errors_;
};

bool number_or_pair(const json& v, Complex& out) {
    if (v.is_number()) {
        out = Complex(v.get<double>(), 0.0);
        return true;
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        out = Complex(v[0].get<double>(), v[1].get<double>());
        return true;
    }
    return false;
}

std::optional<FormFactor> parse_form_factor(const json& j, const std::string& where,
                                            Collector& errs) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        errs.add(where + ": form_factor must be an object with a string 'type'");
        return std::nullopt;
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "power_gaussian") {
        if (!j.contains("alpha") || !j["alpha"].is_number()
            || !j.contains("scale") || !j["scale"].is_number()
            || !j.contains("coupling") || !j["coupling"].is_array()) {
            errs.add(where + ": power_gaussian needs numeric 'alpha', 'scale' and a "
                             "'coupling' matrix");
            return std::nullopt;
        }
        const json& rows = j["coupling"];
        const size_t n = rows.size();
        Eigen::MatrixXcd b(n, n);
        for (size_t r = 0; r < n; ++r) {
            if (!rows[r].is_array() || rows[r].size() != n) {
                errs.add(where + ": coupling must be a square matrix");
                return std::nullopt;
            }
            for (size_t c = 0; c < n; ++c) {
                Complex z;
                if (!number_or_pair(rows[r][c], z)) {
                    errs.add(where + ": coupling entries must be numbers or [re, im] pairs");
                    return std::nullopt;
                }
                b(static_cast<int>(r), static_cast<int>(c)) = z;
            }
        }
        try {
            return FormFactor::power_gaussian(j["alpha"].get<double>(),
                                              j["scale"].get<double>(), std::move(b));
        } catch (const config_error& e) {
            errs.add(where + ": " + e.what());
            return std::nullopt;
        }
    }
    if (type == "angular_moments") {
        if (!j.contains("moments") || !j["moments"].is_array()) {
            errs.add(where + ": angular_moments needs a 'moments' matrix");
            return std::nullopt;
        }
        const json& rows = j["moments"];
        const size_t n = rows.size();
        Eigen::MatrixXd s(n, n);
        for (size_t r = 0; r < n; ++r) {
            if (!rows[r].is_array() || rows[r].size() != n) {
                errs.add(where + ": moments must be a square matrix");
                return std::nullopt;
            }
            for (size_t c = 0; c < n; ++c) {
                if (!rows[r][c].is_number()) {
                    errs.add(where + ": moment entries must be numbers");
                    return std::nullopt;
                }
                s(static_cast<int>(r), static_cast<int>(c)) = rows[r][c].get<double>();
            }
        }
        try {
            return FormFactor::angular_moments(std::move(s));
        } catch (const config_error& e) {
            errs.add(where + ": " + e.what());
            return std::nullopt;
        }
    }
    errs.add(where + ": unknown form_factor type '" + type
             + "' (expected power_gaussian or angular_moments)");
    return std::nullopt;
}

std::vector<double> parse_grid(const json& v, const std::string& where, Collector& errs) {
    std::vector<double> grid;
    if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number()) {
                errs.add(where + ": grid entries must be numbers");
                return {};
            }
            grid.push_back(x.get<double>());
        }
        return grid;
    }
    errs.add(where + ": expected an array of numbers");
    return {};
}

} // namespace

bool is_known_tolerance(const std::string& name) {
    return known_tolerances().count(name) > 0;
}

RunConfig parse_config(const std::string& json_text) {
    Collector errs;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("invalid configuration: JSON parse failure: ") + e.what());
    }
    if (!doc.is_object()) {
        throw config_error("invalid configuration: top level must be an object");
    }

    // particle
    std::optional<ParticleSystem> particle;
    if (!doc.contains("particle") || !doc["particle"].is_object()) {
        errs.add("missing 'particle' object");
    } else {
        const json& p = doc["particle"];
        if (!p.contains("energies") || !p["energies"].is_array() || p["energies"].empty()) {
            errs.add("particle: 'energies' must be a nonempty array");
        } else {
            Eigen::VectorXd e(p["energies"].size());
            bool ok = true;
            for (size_t i = 0; i < p["energies"].size(); ++i) {
                if (!p["energies"][i].is_number()) {
                    errs.add("particle: energies must be numbers");
                    ok = false;
                    break;
                }
                e(static_cast<int>(i)) = p["energies"][i].get<double>();
            }
            double beta_p = 0.0;
            if (p.contains("beta_p")) {
                if (!p["beta_p"].is_number()) {
                    errs.add("particle: beta_p must be a number");
                    ok = false;
                } else {
                    beta_p = p["beta_p"].get<double>();
                }
            }
            if (ok) {
                try {
                    particle.emplace(std::move(e), beta_p);
                } catch (const config_error& ex) {
                    errs.add(std::string("particle: ") + ex.what());
                }
            }
        }
    }

    // reservoirs
    std::optional<ReservoirSpec> res1, res2;
    if (!doc.contains("reservoirs") || !doc["reservoirs"].is_array()) {
        errs.add("missing 'reservoirs' array");
    } else if (doc["reservoirs"].size() != 2) {
        errs.add("exactly two reservoirs supported (got "
                 + std::to_string(doc["reservoirs"].size()) + ")");
    } else {
        for (int i = 0; i < 2; ++i) {
            const json& r = doc["reservoirs"][static_cast<size_t>(i)];
            const std::string where = "reservoirs[" + std::to_string(i) + "]";
            if (!r.is_object() || !r.contains("beta") || !r["beta"].is_number()
                || !r.contains("form_factor")) {
                errs.add(where + ": needs numeric 'beta' and a 'form_factor'");
                continue;
            }
            auto ff = parse_form_factor(r["form_factor"], where, errs);
            if (!ff) continue;
            try {
                ReservoirSpec spec(r["beta"].get<double>(), std::move(*ff));
                if (i == 0)
                    res1.emplace(std::move(spec));
                else
                    res2.emplace(std::move(spec));
            } catch (const config_error& ex) {
                errs.add(where + ": " + ex.what());
            }
        }
    }

    double g = 0.1;
    if (doc.contains("coupling_constant")) {
        if (!doc["coupling_constant"].is_number())
            errs.add("coupling_constant must be a real number");
        else
            g = doc["coupling_constant"].get<double>();
    }
    double mu = 1.5;
    if (doc.contains("mu")) {
        if (!doc["mu"].is_number() || !(doc["mu"].get<double>() > 0.5))
            errs.add("mu must be a real number > 1/2");
        else
            mu = doc["mu"].get<double>();
    }

    RunConfig* out = nullptr;
    std::optional<RunConfig> cfg;
    if (particle && res1 && res2) {
        const int n = particle->dim();
        for (const auto* r : {&*res1, &*res2}) {
            if (r->form_factor.dim() != n)
                errs.add("form factor dimension " + std::to_string(r->form_factor.dim())
                         + " does not match the energy count " + std::to_string(n));
        }
        if (errs.ok()) {
            cfg.emplace(RunConfig{std::move(*particle), std::move(*res1), std::move(*res2)});
            out = &*cfg;
            out->g = g;
            out->mu = mu;
        }
    }

    if (doc.contains("options")) {
        const json& o = doc["options"];
        if (!o.is_object()) {
            errs.add("options must be an object");
        } else {
            auto positive_angle = [&](const char* key, double& slot) {
                if (!o.contains(key)) return;
                if (!o[key].is_number() || !(o[key].get<double>() > 0.0)
                    || !(o[key].get<double>() < 1.5707963267948966)) {
                    errs.add(std::string("options.") + key + " must lie in (0, pi/2)");
                } else if (out) {
                    slot = o[key].get<double>();
                }
            };
            double sink = 0.0;
            positive_angle("delta0", out ? out->delta0 : sink);
            positive_angle("im_delta", out ? out->im_delta : sink);
            if (o.contains("tau_prime")) {
                if (!o["tau_prime"].is_number() || !(o["tau_prime"].get<double>() > 0.0))
                    errs.add("options.tau_prime must be positive");
                else if (out)
                    out->tau_prime = o["tau_prime"].get<double>();
            }
            if (o.contains("sweep")) {
                auto grid = parse_grid(o["sweep"], "options.sweep", errs);
                if (out) out->sweep_grid = std::move(grid);
            }
            if (o.contains("times")) {
                auto grid = parse_grid(o["times"], "options.times", errs);
                for (size_t i = 0; i + 1 < grid.size(); ++i)
                    if (!(grid[i + 1] > grid[i])) {
                        errs.add("options.times must be strictly increasing");
                        break;
                    }
                if (!grid.empty() && grid.front() < 0.0)
                    errs.add("options.times must be nonnegative");
                if (out) out->time_grid = std::move(grid);
            }
            if (o.contains("initial_state")) {
                auto v = parse_grid(o["initial_state"], "options.initial_state", errs);
                if (out && !v.empty()) {
                    Eigen::VectorXd p0(v.size());
                    for (size_t i = 0; i < v.size(); ++i) p0(static_cast<int>(i)) = v[i];
                    if (p0.size() != out->particle.dim())
                        errs.add("options.initial_state length must match the energy count");
                    else if (p0.minCoeff() < 0.0 || std::abs(p0.sum() - 1.0) > 1e-12)
                        errs.add("options.initial_state must be a probability vector");
                    else
                        out->initial_state = std::move(p0);
                }
            }
            if (o.contains("tolerances")) {
                if (!o["tolerances"].is_object()) {
                    errs.add("options.tolerances must be an object");
                } else {
                    for (const auto& [key, val] : o["tolerances"].items()) {
                        if (!is_known_tolerance(key))
                            errs.add("unknown tolerance '" + key + "'");
                        else if (!val.is_number() || !(val.get<double>() > 0.0))
                            errs.add("tolerance '" + key + "' must be a positive number");
                        else if (out)
                            out->tolerances[key] = val.get<double>();
                    }
                }
            }
        }
    }

    errs.raise_if_any();
    return std::move(*cfg);
}

std::string serialize_config(const RunConfig& cfg) {
    JsonValue root = JsonValue::object();

    JsonValue particle = JsonValue::object();
    particle.set("energies", vector_to_json(cfg.particle.energies()));
    particle.set("beta_p", cfg.particle.beta_p());
    root.set("particle", std::move(particle));

    JsonValue reservoirs = JsonValue::array();
    for (const ReservoirSpec* r : {&cfg.reservoir_1, &cfg.reservoir_2}) {
        JsonValue jr = JsonValue::object();
        jr.set("beta", r->beta);
        JsonValue ff = JsonValue::object();
        if (r->form_factor.is_power_gaussian()) {
            const auto& pg = r->form_factor.power_gaussian_form();
            ff.set("type", "power_gaussian");
            ff.set("alpha", pg.exponent);
            ff.set("scale", pg.scale);
            ff.set("coupling", matrix_to_json(pg.coupling));
        } else {
            ff.set("type", "angular_moments");
            JsonValue rows = JsonValue::array();
            const auto& m = r->form_factor.angular_moment_table().moments;
            for (int a = 0; a < m.rows(); ++a) {
                JsonValue row = JsonValue::array();
                for (int b = 0; b < m.cols(); ++b) row.push(m(a, b));
                rows.push(std::move(row));
            }
            ff.set("moments", std::move(rows));
        }
        jr.set("form_factor", std::move(ff));
        reservoirs.push(std::move(jr));
    }
    root.set("reservoirs", std::move(reservoirs));

    root.set("coupling_constant", cfg.g);
    root.set("mu", cfg.mu);

    JsonValue options = JsonValue::object();
    options.set("delta0", cfg.delta0);
    options.set("im_delta", cfg.im_delta);
    options.set("tau_prime", cfg.tau_prime);
    if (!cfg.sweep_grid.empty()) {
        JsonValue grid = JsonValue::array();
        for (double x : cfg.sweep_grid) grid.push(x);
        options.set("sweep", std::move(grid));
    }
    if (!cfg.time_grid.empty()) {
        JsonValue grid = JsonValue::array();
        for (double x : cfg.time_grid) grid.push(x);
        options.set("times", std::move(grid));
    }
    if (cfg.initial_state)
        options.set("initial_state", vector_to_json(*cfg.initial_state));
    if (!cfg.tolerances.empty()) {
        JsonValue tols = JsonValue::object();
        for (const auto& [k, v] : cfg.tolerances) tols.set(k, v);
        options.set("tolerances", std::move(tols));
    }
    root.set("options", std::move(options));
    return root.dump(2);
}

} // namespace nesskit
