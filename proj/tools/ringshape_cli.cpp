#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <omp.h>

#include "ringshape/config.hpp"
#include "ringshape/errors.hpp"

namespace fs = std::filesystem;
using namespace ringshape;

namespace {

// RINGSHAPE_THREADS overrides the worker count; 1 selects the serial
// reference path.
ExecMode resolve_exec(bool force_serial) {
    int workers = 0;
    if (const char* env = std::getenv("RINGSHAPE_THREADS")) {
        workers = std::atoi(env);
        if (workers < 1) throw ConfigError("RINGSHAPE_THREADS must be a positive integer");
        omp_set_num_threads(workers);
    }
    if (force_serial || workers == 1) return ExecMode::serial;
    return ExecMode::parallel;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

int cmd_simulate(const std::string& config_path, bool quick, std::optional<std::uint64_t> seed,
                 std::string out_dir, bool serial) {
    const ExecMode exec = resolve_exec(serial);
    ExperimentConfig cfg = load_experiment(config_path, quick, seed);
    fs::create_directories(out_dir);

    const std::string csv_path =
        (fs::path(out_dir) / (cfg.name + (quick ? "_quick" : "") + ".csv")).string();
    const std::string meta_path = csv_path + ".meta.json";
    const std::string meta = sidecar_json(cfg);

    std::vector<PointResult> known;
    if (fs::exists(csv_path)) {
        std::ifstream meta_in(meta_path);
        std::string old_meta((std::istreambuf_iterator<char>(meta_in)),
                             std::istreambuf_iterator<char>());
        if (!meta_in || old_meta != meta) {
            throw ConfigError("output " + csv_path +
                              " exists for a different config/seed; remove it or pick another --out");
        }
        std::ifstream csv_in(csv_path);
        known = parse_csv(csv_in).points;
        if (!known.empty())
            std::cerr << "resuming: " << known.size() << " point(s) already in " << csv_path
                      << "\n";
    }

    const std::string cov_dir = cfg.cov_cache_dir.empty() ? out_dir : cfg.cov_cache_dir;
    cfg.sweep.cov = ensure_covariance(cfg, cov_dir, exec, &std::cerr);
    cfg.sweep.exec = exec;

    write_text(meta_path, meta);
    const SweepResult result = run_sweep(cfg.sweep, known, [&](const SweepResult& partial) {
        write_text(csv_path, to_csv(partial));
        const PointResult& p = partial.points.back();
        std::cerr << p.scheme << " @ " << p.snr_db << " dB: ber=" << p.ber()
                  << " frames=" << p.frames << " (" << p.stop << ")\n";
    });
    write_text(csv_path, to_csv(result));
    std::cout << to_csv(result);
    std::cerr << "wrote " << csv_path << "\n";
    return 0;
}

int cmd_covariance(const std::string& config_path, int draws, const std::string& out_file,
                   bool serial) {
    const ExecMode exec = resolve_exec(serial);
    ExperimentConfig cfg = load_experiment(config_path, false, std::nullopt);
    if (draws > 0) cfg.cov_draws = draws;
    const std::uint64_t h = covariance_profile_hash(cfg.profile, cfg.nu_max_hz, cfg.ofdm,
                                                    cfg.pulse, cfg.op_mode, cfg.cov_draws);
    CovariancePair cov = compute_covariances(cfg.profile, cfg.nu_max_hz, cfg.ofdm, cfg.pulse,
                                             cfg.op_mode, cfg.cov_draws, h, exec);
    cov.profile_hash = h;
    save_covariance(cov, out_file);
    std::cerr << "wrote " << out_file << " (" << cfg.cov_draws << " draws)\n";
    return 0;
}

int cmd_constellation(int order, const std::string& out_file) {
    const ConstellationSpec spec = build_augmented_qam(order);
    if (out_file.empty()) {
        dump_constellation(spec, std::cout);
    } else {
        std::ofstream out(out_file);
        if (!out) throw IoError("cannot write " + out_file);
        dump_constellation(spec, out);
        if (!out) throw IoError("write failed for " + out_file);
    }
    return 0;
}

int cmd_plot(const std::vector<std::string>& csv_files, const std::string& out_file) {
    std::vector<PlotCurve> curves;
    for (const auto& file : csv_files) {
        std::ifstream in(file);
        if (!in) throw IoError("cannot open " + file);
        const SweepResult res = parse_csv(in);
        for (const auto& p : res.points) {
            auto it = std::find_if(curves.begin(), curves.end(), [&](const PlotCurve& c) {
                return c.label == p.scheme;
            });
            if (it == curves.end()) {
                curves.push_back({p.scheme, {}});
                it = curves.end() - 1;
            }
            it->points.emplace_back(p.snr_db, p.ber());
        }
    }
    emit_plot(curves, out_file);
    std::cerr << "wrote " << out_file << "\n";
    return 0;
}

int cmd_rates(const std::string& config_path) {
    const ExperimentConfig cfg = load_experiment(config_path, false, std::nullopt);
    std::cout << "scheme,rate_gross,rate_net,pi_outer,p_avg,papr,shaping_bits_per_block\n";
    for (const auto& s : cfg.sweep.schemes) {
        const RatePair r = effective_rate(s.link);
        const double pio = s.link.pi_outer();
        // unshaped transmissions never leave the inner ring, so their PAPR
        // is the plain-grid one
        double peak_to_avg;
        if (s.link.shaping) {
            peak_to_avg = papr(s.link.spec, pio);
        } else {
            double peak = 0.0;
            for (auto p : s.link.spec.inner) peak = std::max(peak, std::norm(p));
            peak_to_avg = peak / s.link.spec.inner_power;
        }
        std::cout << s.label << ',' << r.gross << ',' << r.net << ',' << pio << ','
                  << s.link.p_avg() << ',' << peak_to_avg << ','
                  << (s.link.shaping ? s.link.shaping->bits_per_block : 0) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"OFDM link simulator with ring-shaped signaling"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", out_file;
    std::vector<std::string> csv_files;
    bool quick = false, serial = false;
    std::uint64_t seed_value = 0;
    bool seed_set = false;
    int draws = 0, order = 4;

    auto* sim = app.add_subcommand("simulate", "Run a BER sweep from a config file");
    sim->add_option("config", config_path, "experiment JSON")->required();
    sim->add_flag("--quick", quick, "use the config's quick tier");
    sim->add_option("--seed", seed_value, "override the config seed")->each([&](const std::string&) {
        seed_set = true;
    });
    sim->add_option("--out", out_dir, "output directory (default: out)");
    sim->add_flag("--serial", serial, "force the serial reference path");

    auto* cov = app.add_subcommand("covariance", "Regenerate the channel covariance cache");
    cov->add_option("config", config_path, "experiment JSON")->required();
    cov->add_option("--draws", draws, "Monte-Carlo draws (default: config value)");
    cov->add_option("--out", out_file, "output cache file")->required();
    cov->add_flag("--serial", serial, "force the serial reference path");

    auto* con = app.add_subcommand("constellation", "Dump an augmented constellation table");
    con->add_option("order", order, "4 or 16")->required();
    con->add_option("--out", out_file, "output file (default: stdout)");

    auto* plt = app.add_subcommand("plot", "Render BER curves from result CSVs to SVG");
    plt->add_option("csv", csv_files, "input CSV files")->required()->expected(-1);
    plt->add_option("--out", out_file, "output SVG file")->required();

    auto* rat = app.add_subcommand("rates", "Print effective rates and PAPR per scheme");
    rat->add_option("config", config_path, "experiment JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(config_path, quick,
                                seed_set ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                                out_dir, serial);
        }
        if (cov->parsed()) return cmd_covariance(config_path, draws, out_file, serial);
        if (con->parsed()) return cmd_constellation(order, out_file);
        if (plt->parsed()) return cmd_plot(csv_files, out_file);
        if (rat->parsed()) return cmd_rates(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
