#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stskotfs/channel.hpp"
#include "stskotfs/config.hpp"
#include "stskotfs/dispersion.hpp"

namespace stskotfs {

/// Fading-averaged pairwise error probability of one codeword pair, with the
/// rank and nonzero eigenvalues of the difference Gram matrix it came from.
struct PepResult {
    double value = 0.0;
    int rank = 0;
    std::vector<double> eigenvalues; ///< nonzero, descending
};

struct CurvePoint {
    double snr_db = 0.0;
    double value = 0.0;
    double stderr_value = 0.0;
};

/// A computed curve plus the metadata that pins down how to reproduce it.
struct Curve {
    std::string kind; ///< "union-bound" | "capacity" | ...
    std::vector<CurvePoint> points;
    std::uint64_t config_hash = 0;
    std::uint64_t dm_seed = 0;
    std::uint64_t profile_seed = 0;
    std::uint64_t seed = 0;
};

/// Averaged pairwise error probability
///   (1/pi) * Int_0^{pi/2} prod_j (1 + lambda_j*gamma/(4*P*sin^2 t))^{-N_r} dt
/// by fixed 64-node Gauss-Legendre quadrature over the nonzero eigenvalues of
/// the Hermitian PSD difference Gram matrix R. Eigenvalues below
/// 1e-9 * lambda_max count as zero.
PepResult pairwise_error_probability(const Eigen::MatrixXcd& r, double gamma, int paths, int n_r);

/// Same integral evaluated on precomputed eigenvalues (the per-pair
/// decomposition is hoisted out of SNR loops).
double pep_from_eigenvalues(const std::vector<double>& eigenvalues, double gamma, int paths,
                            int n_r);

/// Hamming-weighted union bound on the bit error ratio over all distinct
/// codeword pairs of the matrix-model codebook built with `profile`.
Curve union_bound_ber(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                      const PathProfile& profile, const std::vector<double>& snr_grid_db,
                      int workers = 1);

/// Plain-loop reference implementation, kept for testing the parallel kernel.
Curve union_bound_ber_serial(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                             const PathProfile& profile, const std::vector<double>& snr_grid_db);

struct DiversityResult {
    int diversity_order = 0;  ///< min rank * N_r
    double coding_gain = 0.0; ///< (min eigenvalue product at min rank)^(1/min rank)
};

DiversityResult diversity_and_coding_gain(const ValidatedConfig& cfg,
                                          const DispersionMatrixSet& dm_set,
                                          const PathProfile& profile, int workers = 1);

struct CapacityOptions {
    int n_channel_draws = 200;
    int n_noise_draws = 50;
    std::uint64_t seed = 0;
    int workers = 1;
};

/// Monte Carlo estimate of the equiprobable-input mutual information
///   (1/(M_d*T_c)) * { L - 2^-L * sum_i E[ log2 sum_j exp(Psi_ij) ] }
/// in bit/s/Hz, with a stable log-sum-exp and matched random substreams
/// across SNR points. Standard errors come from the channel-draw means.
Curve dcmc_capacity(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                    const std::vector<double>& snr_grid_db, const CapacityOptions& options);

Curve dcmc_capacity_serial(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                           const std::vector<double>& snr_grid_db,
                           const CapacityOptions& options);

double db_to_linear(double snr_db);

} // namespace stskotfs
