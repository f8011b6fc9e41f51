#pragma once

#include "prodstate/serialize.hpp"

#include <string>

namespace prodstate {

/// Instance generator. kind is one of planted-product, planted-mps, planted-discrete, clique, random-mixed.
/// The returned document carries the generator parameters, the instance and its planted ground truth.
Json generate(const std::string& kind, const Json& params, std::uint64_t seed);

struct ExperimentConfig {
    std::string algorithm;  ///< highfid, cover, estimate-opt, discrete, mps, polyopt, hardness
    Json instance;          ///< generated document or bare object file
    std::string backend = "exact";
    double noise = 0.0;
    std::uint64_t seed = 0;
    Json params = Json::object();
    int jobs = 1;

    void validate() const;
};

/// Dispatch to the named algorithm. Wall time and start time live under "timing"; everything else is
/// a deterministic function of the config.
Json run(const ExperimentConfig& cfg);

/// The hidden state of an instance document (a generated document or a bare state file).
QuantumState instance_state(const Json& instance);

/// Best product fidelity found by multistart alternating ascent (a lower bound on OPT).
double product_opt_ascent(const QuantumState& s, int starts, std::uint64_t seed);

} // namespace prodstate
