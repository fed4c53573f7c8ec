#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "stskotfs/config.hpp"
#include "stskotfs/rng.hpp"

namespace stskotfs {

struct PathProfile; // channel.hpp

/// Q spreading matrices of shape N_t x T_c, each normalized so that
/// trace(A^H A) = T_c, pairwise distinct.
struct DispersionMatrixSet {
    std::vector<Eigen::MatrixXcd> matrices;
    std::uint64_t seed = 0;
};

/// Rank / eigenvalue-product figures of a DM set over the codeword error
/// space. lambda_c is taken over the pairs attaining the minimum rank.
/// When the pair space is subsampled the metrics are estimates.
struct DesignMetrics {
    int lambda_d = 0;
    double lambda_c = 0.0;
    std::uint64_t pairs_evaluated = 0;
    bool exhaustive = true;
};

struct MetricOptions {
    std::uint64_t max_pairs = 5'000'000; ///< subsample above this many codeword pairs
    std::uint64_t subsample_seed = 0;
    int workers = 1;
};

/// Haar-like random unitary: orthonormalized complex Gaussian matrix with the
/// QR phase ambiguity fixed by a real-positive R diagonal. Deterministic in rng.
Eigen::MatrixXcd random_unitary(int dim, Rng& rng);

/// Cuts a max(N_t,T_c)-dimensional unitary down to an N_t x T_c dispersion
/// matrix: keep the first T_c columns when N_t > T_c, or the first N_t rows
/// scaled by sqrt(T_c/N_t) when T_c > N_t.
Eigen::MatrixXcd truncate_to_dm(const Eigen::MatrixXcd& u_tilde, int n_t, int t_c);

/// One random candidate set of Q distinct dispersion matrices.
DispersionMatrixSet generate_dm_set(const ValidatedConfig& cfg, std::uint64_t seed);

/// Minimum rank and minimum eigenvalue product of (D_i - D_j)(D_i - D_j)^H
/// over distinct codeword pairs of the matrix-model codebook built with
/// `profile`. Rank threshold: 1e-9 times the largest eigenvalue.
DesignMetrics evaluate_design_metrics(const DispersionMatrixSet& dm_set,
                                      const ValidatedConfig& cfg, const PathProfile& profile,
                                      const MetricOptions& options = {});

DesignMetrics evaluate_design_metrics_serial(const DispersionMatrixSet& dm_set,
                                             const ValidatedConfig& cfg,
                                             const PathProfile& profile,
                                             const MetricOptions& options = {});

/// Random search over n_trials candidate sets: keeps the maximal lambda_d,
/// ties broken by maximal lambda_c, then by lowest trial index. Deterministic
/// in (seed, n_trials) for any worker count.
std::pair<DispersionMatrixSet, DesignMetrics> design_dispersion_matrices(
    const ValidatedConfig& cfg, int n_trials, const PathProfile& profile, std::uint64_t seed,
    const MetricOptions& options = {});

} // namespace stskotfs
