#include "stskotfs/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "stskotfs/errors.hpp"

namespace stskotfs {

DetectorSpec parse_detector_spec(const std::string& text) {
    DetectorSpec spec;
    spec.label = text;
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string param = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (name == "mld") {
        spec.kind = DetectorKind::Mld;
    } else if (name == "factorized-mld" || name == "fmld") {
        spec.kind = DetectorKind::FactorizedMld;
    } else if (name == "ircd") {
        spec.kind = DetectorKind::Ircd;
    } else if (name == "prcgd") {
        spec.kind = DetectorKind::Prcgd;
    } else {
        fail(ErrorKind::InvalidParameter, "unknown detector '" + name + "'");
    }
    if (!param.empty()) {
        if (spec.kind != DetectorKind::Ircd && spec.kind != DetectorKind::Prcgd)
            fail(ErrorKind::InvalidParameter, "detector '" + name + "' takes no parameter");
        try {
            size_t pos = 0;
            spec.iterations = std::stoi(param, &pos);
            if (pos != param.size() || spec.iterations < 1) throw std::invalid_argument(param);
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidParameter, "bad iteration count '" + param + "'");
        }
    }
    return spec;
}

std::vector<DetectorSpec> parse_detector_list(const std::string& text) {
    std::vector<DetectorSpec> specs;
    size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) specs.push_back(parse_detector_spec(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (specs.empty()) fail(ErrorKind::InvalidParameter, "empty detector list");
    return specs;
}

namespace {

struct SweepContext {
    const ValidatedConfig& cfg;
    const DispersionMatrixSet& dm_set;
    const std::vector<DetectorSpec>& detectors;
    Constellation constellation;
    ResourceAllocation alloc;
    StMapper mapper;
    std::vector<SparseSymbolVector> codewords; ///< cached for exhaustive detectors
    const SweepOptions& options;

    SweepContext(const ValidatedConfig& config, const DispersionMatrixSet& dms,
                 const std::vector<DetectorSpec>& specs, const SweepOptions& opts)
        : cfg(config),
          dm_set(dms),
          detectors(specs),
          constellation(build_constellation(config.v, config.constellation)),
          alloc(build_resource_allocation(config)),
          mapper(build_st_mapper(config)),
          options(opts) {
        const bool needs_codebook =
            std::any_of(specs.begin(), specs.end(),
                        [](const DetectorSpec& s) { return s.kind == DetectorKind::Mld; });
        if (needs_codebook) codewords = materialize_codebook(Codebook(config, constellation));
    }
};

struct TrialCounts {
    std::uint64_t bit_errors = 0;
    bool frame_error = false;
    bool solve_failure = false;
    std::uint64_t candidates = 0;
    std::uint64_t dap_evaluations = 0;
};

int resolved_iterations(const DetectorSpec& spec, const ValidatedConfig& cfg) {
    if (spec.iterations > 0) return spec.iterations;
    if (spec.kind == DetectorKind::Prcgd) return 2;
    if (spec.kind == DetectorKind::Ircd)
        return static_cast<int>(std::min<std::uint64_t>(dap_space_size(cfg), 1u << 24));
    return 0;
}

/// One paired trial: every detector sees the identical bits, channel and noise.
void run_trial(const SweepContext& ctx, int snr_index, std::uint64_t trial_index, double gamma,
               std::vector<TrialCounts>& out) {
    const ValidatedConfig& cfg = ctx.cfg;
    Rng rng = Rng::substream(ctx.options.seed, static_cast<std::uint64_t>(snr_index), trial_index);

    BitVector bits(cfg.total_bits);
    for (auto& bit : bits) bit = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    const SparseSymbolVector k = encode_frame(bits, cfg, ctx.constellation);

    PathProfile profile =
        ctx.options.pinned_indices
            ? profile_with_indices(cfg, ctx.options.pinned_indices->first,
                                   ctx.options.pinned_indices->second, rng)
            : sample_paths(cfg, rng);
    const EquivalentChannel channel =
        assemble_equivalent_model(profile, cfg, ctx.alloc, ctx.mapper, ctx.dm_set, false);
    const Eigen::VectorXcd y = add_noise(channel.transmit(k), gamma, rng);

    const double eps0_default = static_cast<double>(cfg.y_dim()) / gamma;
    for (size_t d = 0; d < ctx.detectors.size(); ++d) {
        const DetectorSpec& spec = ctx.detectors[d];
        TrialCounts& counts = out[d];
        DetectionResult result;
        try {
            switch (spec.kind) {
                case DetectorKind::Mld:
                    result = mld(y, channel, ctx.codewords);
                    break;
                case DetectorKind::FactorizedMld:
                    result = factorized_mld(y, channel, cfg, ctx.constellation);
                    break;
                case DetectorKind::Prcgd:
                    result = prcgd(y, channel, cfg, ctx.constellation,
                                   resolved_iterations(spec, cfg),
                                   spec.eps0 < 0 ? eps0_default : spec.eps0, gamma);
                    break;
                case DetectorKind::Ircd:
                    result = ircd(y, channel, cfg, ctx.constellation,
                                  resolved_iterations(spec, cfg), gamma);
                    break;
            }
        } catch (const Error& error) {
            if (error.kind() != ErrorKind::SolveFailure) throw;
            counts.solve_failure = true;
            counts.bit_errors = cfg.total_bits;
            counts.frame_error = true;
            continue;
        }
        const BitVector decoded = demap_bits(result.dap, result.apm, cfg, ctx.constellation);
        std::uint64_t errors = 0;
        for (int b = 0; b < cfg.total_bits; ++b) errors += bits[b] != decoded[b];
        counts.bit_errors = errors;
        counts.frame_error = errors > 0;
        counts.candidates = result.candidates_tested;
        counts.dap_evaluations = result.dap_evaluations;
    }
}

RunReport sweep_impl(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                     const std::vector<DetectorSpec>& detectors,
                     const std::vector<double>& snr_grid_db, const SweepOptions& options,
                     bool parallel) {
    if (detectors.empty()) fail(ErrorKind::InvalidParameter, "detector list is empty");
    if (options.stop.batch_size < 1 || options.stop.max_trials < 1)
        fail(ErrorKind::InvalidParameter, "stop rule needs positive batch size and trial cap");

    const auto t_start = std::chrono::steady_clock::now();
    SweepContext ctx(cfg, dm_set, detectors, options);
    const size_t n_detectors = detectors.size();

    RunReport report;
    report.cfg = cfg;
    report.config_hash = cfg.hash();
    report.dm_seed = dm_set.seed;
    report.seed = options.seed;
    report.detectors = detectors;
    report.points.assign(n_detectors, {});
    report.solve_failures.assign(n_detectors, 0);

    const int threads = parallel ? std::max(1, options.workers) : 1;
    std::vector<std::vector<TrialCounts>> batch_results;

    for (int snr_index = 0; snr_index < static_cast<int>(snr_grid_db.size()); ++snr_index) {
        const double gamma = db_to_linear(snr_grid_db[snr_index]);
        std::vector<std::uint64_t> bit_errors(n_detectors, 0);
        std::vector<std::uint64_t> frame_errors(n_detectors, 0);
        std::vector<std::uint64_t> failures(n_detectors, 0);
        std::vector<std::uint64_t> candidates(n_detectors, 0);
        std::vector<std::uint64_t> dap_evals(n_detectors, 0);
        std::uint64_t trials_done = 0;

        while (true) {
            const std::uint64_t batch =
                std::min<std::uint64_t>(options.stop.batch_size,
                                        options.stop.max_trials - trials_done);
            batch_results.assign(batch, std::vector<TrialCounts>(n_detectors));

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads) if (threads > 1)
            for (std::int64_t t = 0; t < static_cast<std::int64_t>(batch); ++t)
                run_trial(ctx, snr_index, trials_done + static_cast<std::uint64_t>(t), gamma,
                          batch_results[t]);

            for (std::uint64_t t = 0; t < batch; ++t)
                for (size_t d = 0; d < n_detectors; ++d) {
                    const TrialCounts& counts = batch_results[t][d];
                    bit_errors[d] += counts.bit_errors;
                    frame_errors[d] += counts.frame_error;
                    failures[d] += counts.solve_failure;
                    candidates[d] += counts.candidates;
                    dap_evals[d] += counts.dap_evaluations;
                    report.total_candidates += counts.candidates;
                    report.total_dap_evaluations += counts.dap_evaluations;
                }
            trials_done += batch;

            for (size_t d = 0; d < n_detectors; ++d)
                if (failures[d] * 1000 > trials_done)
                    fail(ErrorKind::SolveFailure,
                         "detector " + detectors[d].label + " failed on more than 0.1% of trials");

            const bool all_reached =
                std::all_of(bit_errors.begin(), bit_errors.end(), [&](std::uint64_t e) {
                    return e >= options.stop.target_errors;
                });
            if (all_reached || trials_done >= options.stop.max_trials) break;
        }

        for (size_t d = 0; d < n_detectors; ++d) {
            BerPoint point;
            point.snr_db = snr_grid_db[snr_index];
            point.trials = trials_done;
            point.bit_errors = bit_errors[d];
            point.frame_errors = frame_errors[d];
            point.ber = static_cast<double>(bit_errors[d]) /
                        (static_cast<double>(trials_done) * cfg.total_bits);
            point.detector = detectors[d].label;
            point.seed = options.seed;
            point.candidates_tested = candidates[d];
            point.dap_evaluations = dap_evals[d];
            report.points[d].push_back(point);
            report.solve_failures[d] += failures[d];
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace

RunReport run_ber_sweep(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                        const std::vector<DetectorSpec>& detectors,
                        const std::vector<double>& snr_grid_db, const SweepOptions& options) {
    return sweep_impl(cfg, dm_set, detectors, snr_grid_db, options, true);
}

RunReport run_ber_sweep_serial(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                               const std::vector<DetectorSpec>& detectors,
                               const std::vector<double>& snr_grid_db,
                               const SweepOptions& options) {
    return sweep_impl(cfg, dm_set, detectors, snr_grid_db, options, false);
}

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::SimoOtfs: return "simo-otfs";
        case BaselineKind::SmOtfs: return "sm-otfs";
        case BaselineKind::StskOfdmMa: return "stsk-ofdm-ma";
    }
    return "unknown";
}

std::pair<ValidatedConfig, DispersionMatrixSet> baseline_config(
    BaselineKind kind, const ValidatedConfig& base, const DispersionMatrixSet* base_dm) {
    SystemConfig raw;
    raw.n = base.n;
    raw.m = base.m;
    raw.n_t = base.n_t;
    raw.n_r = base.n_r;
    raw.t_c = base.t_c;
    raw.q = base.q;
    raw.v = base.v;
    raw.u = base.u;
    raw.p = base.p;
    raw.delta_f_hz = base.delta_f_hz;
    raw.f_c_hz = base.f_c_hz;
    raw.scheme = base.scheme;
    raw.l_max = base.l_max;
    raw.k_max = base.k_max;
    raw.constellation = base.constellation;

    DispersionMatrixSet dm;
    switch (kind) {
        case BaselineKind::SmOtfs: {
            if ((base.n_t & (base.n_t - 1)) != 0)
                fail(ErrorKind::IncompatibleBase, "SM-OTFS needs a power-of-two antenna count");
            raw.t_c = 1;
            raw.q = base.n_t;
            dm.matrices.reserve(base.n_t);
            for (int q = 0; q < base.n_t; ++q) {
                Eigen::MatrixXcd column = Eigen::MatrixXcd::Zero(base.n_t, 1);
                column(q, 0) = 1.0;
                dm.matrices.push_back(std::move(column));
            }
            break;
        }
        case BaselineKind::SimoOtfs: {
            raw.n_t = 1;
            raw.q = 1;
            raw.t_c = 1;
            dm.matrices.push_back(Eigen::MatrixXcd::Ones(1, 1));
            break;
        }
        case BaselineKind::StskOfdmMa: {
            if (!base_dm)
                fail(ErrorKind::IncompatibleBase, "STSK-OFDM-MA baseline preserves the base DM set");
            raw.n = 1;
            raw.k_max = 0;
            raw.l_max = std::min(base.l_max, base.m - 1);
            if (base.scheme == AllocationScheme::DopplerScheme2 && base.u > 1)
                fail(ErrorKind::IncompatibleBase, "N = 1 leaves no Doppler rows to split");
            dm = *base_dm;
            break;
        }
    }
    return {validate_config(raw), std::move(dm)};
}

BoundVsSim run_bound_vs_sim(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                            const std::vector<double>& snr_grid_db, const SweepOptions& options) {
    if (cfg.u != 1)
        fail(ErrorKind::InvalidParameter, "bound comparison is defined for single-user configs");

    Rng profile_rng = Rng::substream(options.seed, 0, 0, 0xb07d);
    const PathProfile profile = sample_paths(cfg, profile_rng);

    BoundVsSim out;
    out.pinned_delay = profile.delay;
    out.pinned_doppler = profile.doppler;
    out.bound = union_bound_ber(cfg, dm_set, profile, snr_grid_db, options.workers);
    out.bound.profile_seed = options.seed;

    SweepOptions sim_options = options;
    sim_options.pinned_indices = {{profile.delay, profile.doppler}};
    const RunReport report = run_ber_sweep(cfg, dm_set, {parse_detector_spec("mld")},
                                           snr_grid_db, sim_options);
    out.sim = report.points[0];

    out.convergence_snr_db = std::numeric_limits<double>::quiet_NaN();
    for (int s = static_cast<int>(snr_grid_db.size()) - 1; s >= 0; --s) {
        const double sim_ber = out.sim[s].ber;
        if (sim_ber <= 0.0) {
            out.convergence_snr_db = snr_grid_db[s]; // unfalsifiable point, keep scanning
            continue;
        }
        const double ratio = out.bound.points[s].value / sim_ber;
        if (ratio >= 1.0 && ratio <= 3.0)
            out.convergence_snr_db = snr_grid_db[s];
        else
            break;
    }
    return out;
}

} // namespace stskotfs
