#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stskotfs/channel.hpp"
#include "stskotfs/config.hpp"
#include "stskotfs/mapping.hpp"

namespace stskotfs {

/// Recovered activation pattern + APM symbols with the achieved residual and
/// the work counters the complexity accounting reports.
struct DetectionResult {
    std::vector<int> dap;        ///< M_d active indices, block order
    Eigen::VectorXcd apm;        ///< M_d detected constellation symbols
    double residual = 0.0;       ///< ||y - C_I K_d||^2
    std::uint64_t candidates_tested = 0; ///< full hypotheses scored
    std::uint64_t dap_evaluations = 0;   ///< least-squares solves on activation patterns
};

/// Scores with their index order, nonincreasing; ties resolve to the lowest index.
struct ReliabilityOrder {
    std::vector<int> order;
    std::vector<double> scores; ///< scores[i] belongs to order[i]
};

/// Exhaustive minimum-distance search over all 2^L codewords.
DetectionResult mld(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                    const Codebook& codebook);

/// Same search over pre-materialized codewords (they are channel-independent,
/// so sweeps cache them once and share them across trials).
DetectionResult mld(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                    const std::vector<SparseSymbolVector>& codewords);

std::vector<SparseSymbolVector> materialize_codebook(const Codebook& codebook);

/// Exhaustive joint search factorized over (activation pattern, APM vector).
/// Residual-identical to mld.
DetectionResult factorized_mld(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                               const ValidatedConfig& cfg, const Constellation& constellation);

/// Regularized soft estimate (C^H C + I/gamma_s)^{-1} C^H y with
/// gamma_s = gamma/Q, solved by LDLT. Throws SolveFailure instead of
/// regularizing further.
Eigen::VectorXcd lmmse_soft_estimate(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& c,
                                     double gamma, int q);

/// Element reliabilities |K~(j)|^2 in descending order.
ReliabilityOrder element_reliabilities(const Eigen::VectorXcd& soft);

/// Progressive residual-check greedy detector. Walks the element reliability
/// list; iteration t least-squares-tests every not-yet-tested activation
/// pattern containing element j_t, quantizes symbol-wise, keeps the local
/// argmin and exits early once the residual drops below eps0.
/// max_daps_per_iter = 0 leaves the per-iteration pattern count uncapped.
DetectionResult prcgd(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                      const ValidatedConfig& cfg, const Constellation& constellation, int t1,
                      double eps0, double gamma, int max_daps_per_iter = 0);

/// Iterative reduced-space check detector. Ranks all Q^{M_d} activation
/// patterns by the summed soft-estimate energy of their entries and
/// least-squares-tests the top t2.
DetectionResult ircd(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                     const ValidatedConfig& cfg, const Constellation& constellation, int t2,
                     double gamma);

enum class DetectorKind { Mld, FactorizedMld, Prcgd, Ircd };

std::string to_string(DetectorKind kind);

/// Measured counters next to the closed-form complexity orders evaluated at
/// the configuration, for this detector and the reference systems.
struct ComplexityReport {
    DetectorKind kind;
    std::uint64_t measured_candidates = 0;
    std::uint64_t measured_dap_evaluations = 0;
    double analytic_order = 0.0;       ///< this detector at this config
    double mld_order = 0.0;            ///< (VQ)^{M_d}
    double prcgd_best_order = 0.0;     ///< M_d*V
    double prcgd_worst_order = 0.0;    ///< Q^{M_d}*M_d*V
    double ircd_order_per_t2 = 0.0;    ///< M_d*V per tested pattern
    double simo_otfs_order = 0.0;      ///< V^{M*N}
    double sm_otfs_order = 0.0;        ///< (N_t*V)^{M*N}
    double stsk_ofdm_ma_order = 0.0;   ///< (Q*V)^{M}
};

ComplexityReport complexity_report(const DetectionResult& result, const ValidatedConfig& cfg,
                                   DetectorKind kind, int iterations = 0);

/// Number of activation patterns Q^{M_d}, guarded against overflow.
std::uint64_t dap_space_size(const ValidatedConfig& cfg);

/// Active indices of pattern `c`: block b takes offset (c / Q^(M_d-1-b)) % Q,
/// so patterns enumerate in block-0-major lexicographic order.
std::vector<int> dap_from_index(std::uint64_t c, const ValidatedConfig& cfg);

} // namespace stskotfs
