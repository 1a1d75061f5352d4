#include "ringshape/config.hpp"

#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "ringshape/errors.hpp"
#include "ringshape/util.hpp"

namespace ringshape {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

std::vector<double> snr_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError("config: " + where + " must be a nonempty array");
    std::vector<double> v;
    for (const auto& e : j) v.push_back(e.get<double>());
    return v;
}

StoppingRule stopping_from(const json& j) {
    StoppingRule r;
    r.min_bit_errors = j.value("min_bit_errors", std::int64_t{100});
    r.max_frames = j.value("max_frames", std::int64_t{1000});
    r.batch_size = j.value("batch_size", 32);
    if (r.min_bit_errors < 1) throw ConfigError("config: min_bit_errors must be >= 1");
    if (r.max_frames < 1) throw ConfigError("config: max_frames must be >= 1");
    return r;
}

} // namespace

ExperimentConfig load_experiment(const std::string& path, bool quick,
                                 std::optional<std::uint64_t> seed_override) {
    const json j = parse_file(path);
    if (j.value("version", 0) != 1) throw ConfigError("config: unsupported schema version");

    ExperimentConfig cfg;
    cfg.name = j.value("name", fs::path(path).stem().string());
    cfg.seed = seed_override ? *seed_override : j.value("seed", std::uint64_t{1});
    cfg.quick = quick;
    cfg.config_hash = fnv64_file(path);

    const json& jo = j.at("ofdm");
    cfg.ofdm.subcarriers = jo.at("subcarriers").get<int>();
    cfg.ofdm.symbols = jo.at("symbols").get<int>();
    cfg.ofdm.subcarrier_spacing = jo.at("subcarrier_spacing_hz").get<double>();

    PilotPattern pilots;
    const json& jp = j.at("pilots");
    pilots.symbol_indices = jp.at("symbol_indices").get<std::vector<int>>();
    pilots.comb_stride = jp.value("comb_stride", 2);
    pilots.comb_offset = jp.value("comb_offset", 0);
    pilots.seed = jp.value("seed", std::uint64_t{0x9d107});
    const double pilot_boost = jp.value("boost", 1.0);

    const json& jc = j.at("channel");
    if (jc.at("profile").is_string()) {
        const std::string prof = jc.at("profile").get<std::string>();
        if (prof == "veh-a") {
            cfg.profile = ChannelProfile::veh_a();
        } else if (prof == "single-path") {
            cfg.profile = ChannelProfile::single_path();
        } else {
            throw ConfigError("config: unknown channel profile " + prof);
        }
    } else {
        cfg.profile.delays_ns = jc.at("profile").at("delays_ns").get<std::vector<double>>();
        cfg.profile.powers_db = jc.at("profile").at("powers_db").get<std::vector<double>>();
    }
    cfg.nu_max_hz = jc.value("nu_max_hz", 0.0);
    cfg.pulse = PulseModel::windowed_sinc(jc.value("pulse_span", 16));
    const std::string op = jc.value("operator", std::string("per-symbol-circular"));
    if (op == "per-symbol-circular") {
        cfg.op_mode = ChannelOperatorMode::per_symbol_circular;
    } else if (op == "literal") {
        cfg.op_mode = ChannelOperatorMode::literal;
    } else {
        throw ConfigError("config: unknown channel operator " + op);
    }
    const std::string know = jc.value("knowledge", std::string("genie"));
    if (know == "genie") {
        cfg.knowledge = ChannelKnowledge::genie;
    } else if (know == "estimated") {
        cfg.knowledge = ChannelKnowledge::estimated;
    } else {
        throw ConfigError("config: unknown channel knowledge " + know);
    }

    if (j.contains("covariance")) {
        cfg.cov_draws = j.at("covariance").value("draws", 5000);
        cfg.cov_cache_dir = j.at("covariance").value("cache_dir", std::string{});
    }

    std::vector<double> base_snr = snr_list(j.at("snr_db"), "snr_db");
    cfg.sweep.stopping = stopping_from(j.value("stopping", json::object()));
    std::map<std::string, std::vector<double>> quick_scheme_snr;
    if (quick) {
        if (!j.contains("quick")) throw ConfigError("config: no quick tier in this file");
        const json& jq = j.at("quick");
        cfg.sweep.stopping = stopping_from(jq);
        if (jq.contains("snr_db")) base_snr = snr_list(jq.at("snr_db"), "quick.snr_db");
        if (jq.contains("scheme_snr_db")) {
            for (auto it = jq.at("scheme_snr_db").begin(); it != jq.at("scheme_snr_db").end(); ++it) {
                quick_scheme_snr[it.key()] = snr_list(it.value(), "quick.scheme_snr_db");
            }
        }
    }

    const fs::path base_dir = fs::path(path).parent_path();
    std::map<std::string, std::shared_ptr<const LdpcCode>> code_cache;

    if (!j.contains("schemes") || !j.at("schemes").is_array() || j.at("schemes").empty())
        throw ConfigError("config: schemes array missing or empty");
    for (const auto& js : j.at("schemes")) {
        SchemeRun run;
        run.label = js.at("label").get<std::string>();
        if (run.label.find(',') != std::string::npos)
            throw ConfigError("config: scheme label must not contain commas");

        LinkConfig& link = run.link;
        link.ofdm = cfg.ofdm;
        link.pilots = pilots;
        link.pilot_boost = pilot_boost;
        link.profile = cfg.profile;
        link.nu_max_hz = cfg.nu_max_hz;
        link.pulse = cfg.pulse;
        link.op_mode = cfg.op_mode;
        link.knowledge = cfg.knowledge;
        link.base_seed = derive_seed(cfg.seed, Fnv64().add(run.label).value(), 77);
        link.spec = build_augmented_qam(js.at("constellation").get<int>());
        if (js.contains("shaping") && !js.at("shaping").is_null()) {
            link.shaping = ShapingCode::make(js.at("shaping").at("z").get<int>(),
                                             js.at("shaping").at("sparsity").get<int>());
        }

        std::string code_path = js.at("ldpc").get<std::string>();
        if (fs::path(code_path).is_relative()) code_path = (base_dir / code_path).string();
        auto it = code_cache.find(code_path);
        if (it == code_cache.end()) {
            auto code = std::make_shared<const LdpcCode>(load_parity_check(code_path));
            it = code_cache.emplace(code_path, std::move(code)).first;
            cfg.ldpc_files.emplace_back(code_path, to_hex(fnv64_file(code_path)));
        }
        link.ldpc = it->second;

        run.snr_db = base_snr;
        if (js.contains("snr_db")) run.snr_db = snr_list(js.at("snr_db"), "scheme snr_db");
        if (auto qi = quick_scheme_snr.find(run.label); qi != quick_scheme_snr.end())
            run.snr_db = qi->second;

        link.validate();
        cfg.sweep.schemes.push_back(std::move(run));
    }

    return cfg;
}

std::string covariance_cache_path(const ExperimentConfig& cfg, const std::string& dir) {
    const std::uint64_t h = covariance_profile_hash(cfg.profile, cfg.nu_max_hz, cfg.ofdm,
                                                    cfg.pulse, cfg.op_mode, cfg.cov_draws);
    return (fs::path(dir) / ("cov_" + to_hex(h) + ".bin")).string();
}

std::shared_ptr<const CovariancePair> ensure_covariance(const ExperimentConfig& cfg,
                                                        const std::string& dir, ExecMode exec,
                                                        std::ostream* log) {
    if (cfg.knowledge != ChannelKnowledge::estimated) return nullptr;
    const std::string cache = covariance_cache_path(cfg, dir);
    const std::uint64_t expect = covariance_profile_hash(cfg.profile, cfg.nu_max_hz, cfg.ofdm,
                                                         cfg.pulse, cfg.op_mode, cfg.cov_draws);
    if (fs::exists(cache)) {
        CovariancePair cov = load_covariance(cache);
        if (cov.profile_hash == expect && cov.draws == cfg.cov_draws) {
            return std::make_shared<const CovariancePair>(std::move(cov));
        }
        if (log) *log << "covariance cache " << cache << " is stale; recomputing\n";
    } else if (log) {
        *log << "computing channel covariances (" << cfg.cov_draws << " draws) -> " << cache
             << "\n";
    }
    // Draw seed is the profile hash itself, so the cache content depends
    // only on the channel description, never on the sweep seed.
    CovariancePair cov = compute_covariances(cfg.profile, cfg.nu_max_hz, cfg.ofdm, cfg.pulse,
                                             cfg.op_mode, cfg.cov_draws, expect, exec);
    cov.profile_hash = expect;
    fs::create_directories(fs::path(cache).parent_path());
    save_covariance(cov, cache);
    return std::make_shared<const CovariancePair>(std::move(cov));
}

std::string sidecar_json(const ExperimentConfig& cfg) {
    json j;
    j["schema"] = 1;
    j["name"] = cfg.name;
    j["config_hash"] = to_hex(cfg.config_hash);
    j["seed"] = cfg.seed;
    j["quick"] = cfg.quick;
    json codes = json::object();
    for (const auto& [p, h] : cfg.ldpc_files) codes[p] = h;
    j["ldpc_files"] = codes;
    j["stopping"] = {{"min_bit_errors", cfg.sweep.stopping.min_bit_errors},
                     {"max_frames", cfg.sweep.stopping.max_frames},
                     {"batch_size", cfg.sweep.stopping.batch_size}};
    return j.dump(2) + "\n";
}

} // namespace ringshape
