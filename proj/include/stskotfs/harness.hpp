#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stskotfs/analysis.hpp"
#include "stskotfs/channel.hpp"
#include "stskotfs/config.hpp"
#include "stskotfs/detectors.hpp"
#include "stskotfs/dispersion.hpp"

namespace stskotfs {

/// One detector request of a sweep; `iterations` is T_1 for prcgd and T_2 for
/// ircd (0 picks the default: T_1 = 2, T_2 = Q^{M_d}). eps0 < 0 selects the
/// noise-energy default M_d*N_r*T_c/gamma.
struct DetectorSpec {
    DetectorKind kind = DetectorKind::Mld;
    int iterations = 0;
    double eps0 = -1.0;
    std::string label = "mld";
};

/// Parses the `name[:param]` mini-grammar: mld, factorized-mld, ircd:T2, prcgd:T1.
DetectorSpec parse_detector_spec(const std::string& text);
std::vector<DetectorSpec> parse_detector_list(const std::string& text);

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frame_errors = 0;
    double ber = 0.0;
    std::string detector;
    std::uint64_t seed = 0;
    std::uint64_t candidates_tested = 0; ///< summed over the point's trials
    std::uint64_t dap_evaluations = 0;
};

/// Stop once every detector holds >= target_errors bit errors, or at
/// max_trials. Decisions happen at fixed batch boundaries so reports do not
/// depend on the worker count.
struct StopRule {
    std::uint64_t target_errors = 200;
    std::uint64_t max_trials = 1'000'000;
    std::uint64_t batch_size = 2048;
};

struct SweepOptions {
    StopRule stop;
    std::uint64_t seed = 0;
    int workers = 1;
    /// When set, every trial reuses these integer delay/Doppler indices and
    /// redraws only the gains (the like-for-like mode for bound comparisons).
    std::optional<std::pair<std::vector<int>, std::vector<int>>> pinned_indices;
};

struct RunReport {
    ValidatedConfig cfg;
    std::uint64_t config_hash = 0;
    std::uint64_t dm_seed = 0;
    std::uint64_t seed = 0;
    std::vector<DetectorSpec> detectors;
    /// points[d][s] for detector d at SNR grid point s
    std::vector<std::vector<BerPoint>> points;
    std::vector<std::uint64_t> solve_failures; ///< per detector, all points
    std::uint64_t total_candidates = 0;        ///< summed over detectors and trials
    std::uint64_t total_dap_evaluations = 0;
    double wall_seconds = 0.0;
};

/// Monte Carlo BER sweep. Every detector sees the identical (y, C) per trial;
/// per-trial substreams are derived from (seed, snr index, trial index), so
/// the report is a pure function of (config, seeds) for any worker count.
RunReport run_ber_sweep(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                        const std::vector<DetectorSpec>& detectors,
                        const std::vector<double>& snr_grid_db, const SweepOptions& options);

/// Plain-loop reference implementation; must reproduce run_ber_sweep exactly.
RunReport run_ber_sweep_serial(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                               const std::vector<DetectorSpec>& detectors,
                               const std::vector<double>& snr_grid_db,
                               const SweepOptions& options);

enum class BaselineKind { SimoOtfs, SmOtfs, StskOfdmMa };

/// Parameter special cases of the same transceiver:
///   SM-OTFS:      T_c = 1, Q = N_t, dispersion matrices = columns of I_{N_t};
///   SIMO-OTFS:    N_t = 1, Q = 1, T_c = 1, A_1 = [1];
///   STSK-OFDM-MA: N = 1 (k_max = 0), everything else preserved.
/// STSK-OFDM-MA keeps the base DM set, which must be supplied.
std::pair<ValidatedConfig, DispersionMatrixSet> baseline_config(
    BaselineKind kind, const ValidatedConfig& base,
    const DispersionMatrixSet* base_dm = nullptr);

std::string to_string(BaselineKind kind);

struct BoundVsSim {
    Curve bound;
    std::vector<BerPoint> sim; ///< MLD, pinned indices, fresh gains per trial
    std::vector<int> pinned_delay, pinned_doppler;
    /// lowest grid SNR from which bound/sim stays within [1, 3] for all later
    /// points with nonzero simulated BER; NaN when no such suffix exists
    double convergence_snr_db = 0.0;
};

/// Fig.-style comparison of the simulated MLD BER against the analytical
/// union bound on one pinned set of delay/Doppler indices.
BoundVsSim run_bound_vs_sim(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                            const std::vector<double>& snr_grid_db, const SweepOptions& options);

} // namespace stskotfs
