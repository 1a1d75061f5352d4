#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ringshape/harness.hpp"

namespace ringshape {

// A fully materialized experiment: schemes with loaded codes and built
// constellations, resolved SNR grids, stopping rule, covariance settings.
struct ExperimentConfig {
    std::string name;
    std::uint64_t seed = 1;
    bool quick = false;
    SweepSpec sweep; // cov left empty; resolved by ensure_covariance

    // Shared channel description (all schemes use the same channel).
    OfdmParams ofdm;
    ChannelProfile profile;
    double nu_max_hz = 0.0;
    PulseModel pulse = PulseModel::windowed_sinc();
    ChannelOperatorMode op_mode = ChannelOperatorMode::per_symbol_circular;
    ChannelKnowledge knowledge = ChannelKnowledge::genie;

    int cov_draws = 5000;
    std::string cov_cache_dir; // empty = alongside the output

    std::uint64_t config_hash = 0; // FNV of the config file bytes
    std::vector<std::pair<std::string, std::string>> ldpc_files; // (resolved path, content hash hex)
};

// Parses and validates a JSON experiment file (schema version 1). `quick`
// swaps in the reduced stopping rule / SNR grid the file provides.
ExperimentConfig load_experiment(const std::string& path, bool quick,
                                 std::optional<std::uint64_t> seed_override);

// Deterministic cache filename for this experiment's channel statistics.
std::string covariance_cache_path(const ExperimentConfig& cfg, const std::string& dir);

// Loads the covariance cache, computing and saving it first if absent or
// stale. No-op (returns null) when no scheme needs estimates.
std::shared_ptr<const CovariancePair> ensure_covariance(const ExperimentConfig& cfg,
                                                        const std::string& dir, ExecMode exec,
                                                        std::ostream* log);

// Result sidecar (config hash, seed, code hashes); no volatile fields, so
// identical runs produce identical sidecars.
std::string sidecar_json(const ExperimentConfig& cfg);

} // namespace ringshape
