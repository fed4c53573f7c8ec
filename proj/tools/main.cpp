// Command-line front end: dispersion-matrix design, BER sweeps, analytical
// bound and capacity curves, and paired detector benchmarks. Every run writes
// its primary artifact plus a JSON metadata sidecar, and any invocation is
// reproducible from (config, seed) alone for any --workers value.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <string>
#include <thread>

#include "stskotfs/analysis.hpp"
#include "stskotfs/channel.hpp"
#include "stskotfs/detectors.hpp"
#include "stskotfs/dispersion.hpp"
#include "stskotfs/errors.hpp"
#include "stskotfs/harness.hpp"
#include "stskotfs/io.hpp"

using namespace stskotfs;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string dm_path;
    std::uint64_t seed = 0;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

ValidatedConfig load_config(const CommonArgs& args) {
    return validate_config(parse_config_file(args.config_path));
}

/// DM set from --dm when given, otherwise one deterministic random candidate.
DispersionMatrixSet load_or_generate_dm(const CommonArgs& args, const ValidatedConfig& cfg) {
    if (!args.dm_path.empty()) {
        DispersionMatrixSet set = read_dm_set(args.dm_path);
        if (static_cast<int>(set.matrices.size()) != cfg.q ||
            set.matrices.front().rows() != cfg.n_t || set.matrices.front().cols() != cfg.t_c)
            fail(ErrorKind::DimensionMismatch,
                 args.dm_path + " does not match the configuration (Q, N_t, T_c)");
        return set;
    }
    return generate_dm_set(cfg, Rng::derive(args.seed, 0, 0xd7));
}

void write_sidecar(const std::string& out_path, const nlohmann::json& extra,
                   const ValidatedConfig& cfg, std::uint64_t seed) {
    nlohmann::json j = extra;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    j["config_hash"] = hash_hex;
    j["config"] = cfg.canonical_string();
    j["seed"] = seed;
    std::ofstream out(out_path + ".json");
    if (!out) fail(ErrorKind::IoFailure, "cannot write " + out_path + ".json");
    out << j.dump(2) << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"STSK-OTFS multiple-access link simulator and analysis toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string detectors_text = "mld";
    std::string snr_text = "0:2:20";
    std::uint64_t max_trials = 1'000'000;
    std::uint64_t target_errors = 200;
    int design_trials = 50;
    int channel_draws = 200;
    int noise_draws = 50;
    std::string dump_channel_path;

    const auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--config", args.config_path, "system config file")->required();
        cmd->add_option("--out", args.out_path, "output artifact path")
            ->required(needs_out);
        cmd->add_option("--seed", args.seed, "master seed, echoed into all outputs");
        cmd->add_option("--workers", args.workers,
                        "worker threads (the only source of the thread count; "
                        "OMP_NUM_THREADS is ignored)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--dm", args.dm_path, "dispersion-matrix file from design-dm");
    };

    CLI::App* design = app.add_subcommand("design-dm", "random search for a dispersion set");
    add_common(design, true);
    design->add_option("--trials", design_trials, "candidate sets to draw")
        ->check(CLI::PositiveNumber);

    CLI::App* simulate = app.add_subcommand("simulate-ber", "Monte Carlo BER sweep");
    add_common(simulate, true);
    simulate->add_option("--detectors", detectors_text, "comma list: mld,ircd:T2,prcgd:T1");
    simulate->add_option("--snr", snr_text, "SNR grid start:step:stop in dB");
    simulate->add_option("--trials", max_trials, "max trials per SNR point");
    simulate->add_option("--errors", target_errors, "target bit errors per point");

    CLI::App* bound = app.add_subcommand("bound", "analytical BER union bound");
    add_common(bound, true);
    bound->add_option("--snr", snr_text, "SNR grid start:step:stop in dB");
    bound->add_option("--dump-channel", dump_channel_path,
                      "write the pinned path profile for audits");

    CLI::App* capacity = app.add_subcommand("capacity", "DCMC capacity estimate");
    add_common(capacity, true);
    capacity->add_option("--snr", snr_text, "SNR grid start:step:stop in dB");
    capacity->add_option("--channel-draws", channel_draws, "channel realizations per point")
        ->check(CLI::PositiveNumber);
    capacity->add_option("--noise-draws", noise_draws, "noise realizations per channel")
        ->check(CLI::PositiveNumber);

    CLI::App* bench = app.add_subcommand("bench-detectors",
                                         "paired detector comparison with complexity counters");
    add_common(bench, true);
    bench->add_option("--detectors", detectors_text, "comma list: mld,ircd:T2,prcgd:T1");
    bench->add_option("--snr", snr_text, "SNR grid start:step:stop in dB");
    bench->add_option("--trials", max_trials, "max trials per SNR point");
    bench->add_option("--errors", target_errors, "target bit errors per point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints the usage or help text
        return code == 0 ? 0 : 2;     // help/version exit 0, usage errors exit 2
    }
    omp_set_num_threads(args.workers);

    if (design->parsed()) {
        const ValidatedConfig cfg = load_config(args);
        SystemConfig su_raw = parse_config_file(args.config_path);
        su_raw.u = 1; // the design criterion is single-user
        const ValidatedConfig su_cfg = validate_config(su_raw);
        Rng profile_rng = Rng::substream(args.seed, 0, 0, 0xde5);
        const PathProfile profile = sample_paths(su_cfg, profile_rng);
        MetricOptions options;
        options.workers = args.workers;
        const auto [set, metrics] =
            design_dispersion_matrices(su_cfg, design_trials, profile, args.seed, options);
        write_dm_set(args.out_path, set);

        nlohmann::json j;
        j["command"] = "design-dm";
        j["trials"] = design_trials;
        j["lambda_d"] = metrics.lambda_d;
        j["lambda_c"] = metrics.lambda_c;
        j["pairs_evaluated"] = metrics.pairs_evaluated;
        j["exhaustive"] = metrics.exhaustive;
        j["dm_seed"] = set.seed;
        j["design_profile_delay"] = profile.delay;
        j["design_profile_doppler"] = profile.doppler;
        write_sidecar(args.out_path, j, cfg, args.seed);
        std::cout << "lambda_d = " << metrics.lambda_d << ", lambda_c = " << metrics.lambda_c
                  << " over " << metrics.pairs_evaluated << " pairs"
                  << (metrics.exhaustive ? "" : " (subsampled estimate)") << "\n"
                  << "wrote " << args.out_path << "\n";
        return 0;
    }

    if (simulate->parsed() || bench->parsed()) {
        const ValidatedConfig cfg = load_config(args);
        const DispersionMatrixSet dms = load_or_generate_dm(args, cfg);
        const auto detectors = parse_detector_list(detectors_text);
        SweepOptions options;
        options.stop.target_errors = target_errors;
        options.stop.max_trials = max_trials;
        options.seed = args.seed;
        options.workers = args.workers;
        const std::vector<double> grid = parse_snr_grid(snr_text);
        const RunReport report = run_ber_sweep(cfg, dms, detectors, grid, options);

        nlohmann::json j;
        j["dm_seed"] = dms.seed;
        j["wall_seconds"] = report.wall_seconds;
        if (simulate->parsed()) {
            write_ber_csv(args.out_path, report);
            j["command"] = "simulate-ber";
            write_sidecar(args.out_path, j, cfg, args.seed);
            write_run_report_json(args.out_path + ".report.json", report);
        } else {
            // complexity counters next to the paired BER results; the analytic
            // order uses the measured mean pattern count per detection
            std::ostringstream csv;
            csv << "snr_db,detector,trials,bit_errors,ber,candidates_tested,dap_evaluations,"
                   "analytic_order\n";
            for (size_t s = 0; s < grid.size(); ++s)
                for (size_t d = 0; d < detectors.size(); ++d) {
                    const BerPoint& point = report.points[d][s];
                    DetectionResult measured;
                    measured.candidates_tested = point.candidates_tested;
                    measured.dap_evaluations =
                        point.trials ? point.dap_evaluations / point.trials : 0;
                    const ComplexityReport complexity = complexity_report(
                        measured, cfg, detectors[d].kind,
                        detectors[d].iterations > 0
                            ? detectors[d].iterations
                            : static_cast<int>(dap_space_size(cfg)));
                    char buffer[320];
                    std::snprintf(buffer, sizeof(buffer), "%.12g,%s,%llu,%llu,%.12g,%llu,%llu,%.12g\n",
                                  point.snr_db, point.detector.c_str(),
                                  static_cast<unsigned long long>(point.trials),
                                  static_cast<unsigned long long>(point.bit_errors), point.ber,
                                  static_cast<unsigned long long>(point.candidates_tested),
                                  static_cast<unsigned long long>(point.dap_evaluations),
                                  complexity.analytic_order);
                    csv << buffer;
                }
            std::ofstream out(args.out_path);
            if (!out) fail(ErrorKind::IoFailure, "cannot write " + args.out_path);
            out << csv.str();
            j["command"] = "bench-detectors";
            write_sidecar(args.out_path, j, cfg, args.seed);
            write_run_report_json(args.out_path + ".report.json", report);
        }
        std::cout << "wrote " << args.out_path << "\n";
        return 0;
    }

    if (bound->parsed()) {
        const ValidatedConfig cfg = load_config(args);
        const DispersionMatrixSet dms = load_or_generate_dm(args, cfg);
        Rng profile_rng = Rng::substream(args.seed, 0, 0, 0xb07d);
        const PathProfile profile = sample_paths(cfg, profile_rng);
        Curve curve = union_bound_ber(cfg, dms, profile, parse_snr_grid(snr_text), args.workers);
        curve.profile_seed = args.seed;
        curve.seed = args.seed;
        write_curve_csv(args.out_path, curve);
        if (!dump_channel_path.empty()) write_channel_dump(dump_channel_path, profile);

        nlohmann::json j;
        j["command"] = "bound";
        j["dm_seed"] = dms.seed;
        j["profile_delay"] = profile.delay;
        j["profile_doppler"] = profile.doppler;
        write_sidecar(args.out_path, j, cfg, args.seed);
        std::cout << "wrote " << args.out_path << "\n";
        return 0;
    }

    if (capacity->parsed()) {
        const ValidatedConfig cfg = load_config(args);
        const DispersionMatrixSet dms = load_or_generate_dm(args, cfg);
        CapacityOptions options;
        options.n_channel_draws = channel_draws;
        options.n_noise_draws = noise_draws;
        options.seed = args.seed;
        options.workers = args.workers;
        const Curve curve = dcmc_capacity(cfg, dms, parse_snr_grid(snr_text), options);
        write_curve_csv(args.out_path, curve);

        nlohmann::json j;
        j["command"] = "capacity";
        j["dm_seed"] = dms.seed;
        j["channel_draws"] = channel_draws;
        j["noise_draws"] = noise_draws;
        write_sidecar(args.out_path, j, cfg, args.seed);
        std::cout << "wrote " << args.out_path << "\n";
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& error) {
        nlohmann::json j;
        j["error"] = to_string(error.kind());
        j["message"] = error.what();
        std::cerr << j.dump() << "\n";
        return 1;
    } catch (const std::exception& error) {
        nlohmann::json j;
        j["error"] = "Unexpected";
        j["message"] = error.what();
        std::cerr << j.dump() << "\n";
        return 1;
    }
}
