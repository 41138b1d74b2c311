#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nesskit/model.hpp"

namespace nesskit {

// Validated run configuration. The canonical concrete syntax is JSON; the
// schema is documented in the README and is the actual contract.
struct RunConfig {
    ParticleSystem particle;
    ReservoirSpec reservoir_1;
    ReservoirSpec reservoir_2;
    double g = 0.1;
    double mu = 1.5;

    // optional knobs, all with defaults
    double delta0 = 0.78539816339744831;  // pi/4
    double im_delta = 0.52359877559829887; // pi/6
    double tau_prime = 0.1;
    std::vector<double> sweep_grid;      // delta-beta grid
    std::vector<double> time_grid;       // trajectory times
    std::optional<Eigen::VectorXd> initial_state;
    std::map<std::string, double> tolerances;
};

// Parses and validates a JSON document; collects every validation error and
// throws config_error with the full list (one per line).
RunConfig parse_config(const std::string& json_text);

// Canonical serialization: fixed key order, LF, 17-significant-digit floats.
// parse(serialize(parse(doc))) == parse(doc), and serialize is idempotent on
// its own output.
std::string serialize_config(const RunConfig& cfg);

// Recognized --tol names; unknown names are config errors.
bool is_known_tolerance(const std::string& name);

} // namespace nesskit
