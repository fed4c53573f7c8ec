#include "stskotfs/dispersion.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "stskotfs/channel.hpp"
#include "stskotfs/errors.hpp"
#include "stskotfs/mapping.hpp"

namespace stskotfs {

Eigen::MatrixXcd random_unitary(int dim, Rng& rng) {
    if (dim < 1) fail(ErrorKind::InvalidParameter, "unitary dimension must be >= 1");
    Eigen::MatrixXcd ginibre(dim, dim);
    for (int col = 0; col < dim; ++col)
        for (int row = 0; row < dim; ++row) ginibre(row, col) = rng.cgaussian(1.0);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
    Eigen::MatrixXcd unitary = qr.householderQ();
    // fix the QR phase ambiguity so the sampled distribution is Haar-like
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int col = 0; col < dim; ++col) {
        const auto d = r(col, col);
        const double magnitude = std::abs(d);
        if (magnitude > 0) unitary.col(col) *= d / magnitude;
    }
    return unitary;
}

Eigen::MatrixXcd truncate_to_dm(const Eigen::MatrixXcd& u_tilde, int n_t, int t_c) {
    const int expected = std::max(n_t, t_c);
    if (u_tilde.rows() != expected || u_tilde.cols() != expected)
        fail(ErrorKind::DimensionMismatch,
             "unitary must be " + std::to_string(expected) + " x " + std::to_string(expected));
    if (n_t > t_c) return u_tilde.leftCols(t_c);
    if (t_c > n_t) return std::sqrt(double(t_c) / n_t) * u_tilde.topRows(n_t);
    return u_tilde;
}

DispersionMatrixSet generate_dm_set(const ValidatedConfig& cfg, std::uint64_t seed) {
    const int dim = std::max(cfg.n_t, cfg.t_c);
    DispersionMatrixSet set;
    set.seed = seed;
    set.matrices.reserve(cfg.q);
    std::uint64_t attempt = 0;
    while (static_cast<int>(set.matrices.size()) < cfg.q) {
        Rng rng = Rng::substream(seed, set.matrices.size(), attempt, 0x0d);
        Eigen::MatrixXcd candidate = truncate_to_dm(random_unitary(dim, rng), cfg.n_t, cfg.t_c);
        bool distinct = true;
        for (const auto& existing : set.matrices)
            distinct &= (existing - candidate).norm() > 1e-9;
        if (distinct) {
            set.matrices.push_back(std::move(candidate));
            attempt = 0;
        } else {
            ++attempt;
        }
    }
    return set;
}

namespace {

struct PairMetrics {
    int min_rank = std::numeric_limits<int>::max();
    double min_product = std::numeric_limits<double>::infinity();

    void absorb(int rank, double product) {
        if (rank < min_rank) {
            min_rank = rank;
            min_product = product;
        } else if (rank == min_rank) {
            min_product = std::min(min_product, product);
        }
    }
    void absorb(const PairMetrics& other) {
        if (other.min_rank == std::numeric_limits<int>::max()) return;
        absorb(other.min_rank, other.min_product);
    }
};

/// rank / eigenvalue product of (d_i - d_j)(d_i - d_j)^H with the 1e-9
/// relative eigenvalue threshold
std::pair<int, double> pair_rank_product(const Eigen::MatrixXcd& d_i,
                                         const Eigen::MatrixXcd& d_j) {
    const Eigen::MatrixXcd delta = d_i - d_j;
    const Eigen::MatrixXcd gram = delta * delta.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd values = eig.eigenvalues();
    const double top = values.size() ? values.maxCoeff() : 0.0;
    if (top <= 0.0) return {0, 0.0};
    const double threshold = 1e-9 * top;
    int rank = 0;
    double product = 1.0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values[i] > threshold) {
            ++rank;
            product *= values[i];
        }
    return {rank, product};
}

} // namespace

namespace detail {

/// Matrix-model codewords for every message; the caller owns lifetime issues.
struct CodewordSource {
    const ValidatedConfig& cfg;
    const DispersionMatrixSet& dm_set;
    Constellation constellation;
    ResourceAllocation alloc;
    MatrixModel model;
    std::vector<Eigen::MatrixXcd> cache;
    std::uint64_t size;

    CodewordSource(const ValidatedConfig& config, const DispersionMatrixSet& dms,
                   const PathProfile& profile)
        : cfg(config),
          dm_set(dms),
          constellation(build_constellation(config.v, config.constellation)),
          alloc(build_resource_allocation(config)),
          model(build_matrix_model(profile, config)) {
        if (config.total_bits > 24)
            fail(ErrorKind::CodebookTooLarge, "error space of 2^" +
                                                  std::to_string(config.total_bits) +
                                                  " codewords is not enumerable");
        size = 1ull << config.total_bits;
        if (size <= (1ull << 16)) {
            cache.reserve(size);
            for (std::uint64_t message = 0; message < size; ++message)
                cache.push_back(build(static_cast<std::uint32_t>(message)));
        }
    }

    Eigen::MatrixXcd build(std::uint32_t message) const {
        const SparseSymbolVector k =
            encode_frame(message_to_bits(message, cfg.total_bits), cfg, constellation);
        return model.codeword(dd_frames(k, cfg, alloc, dm_set), cfg);
    }

    const Eigen::MatrixXcd& get(std::uint32_t message, Eigen::MatrixXcd& scratch) const {
        if (!cache.empty()) return cache[message];
        scratch = build(message);
        return scratch;
    }
};

} // namespace detail

static DesignMetrics evaluate_metrics_impl(const DispersionMatrixSet& dm_set,
                                           const ValidatedConfig& cfg,
                                           const PathProfile& profile,
                                           const MetricOptions& options, bool parallel) {
    if (cfg.u != 1)
        fail(ErrorKind::InvalidParameter, "design metrics are defined for single-user configs");
    detail::CodewordSource source(cfg, dm_set, profile);
    if (source.size < 2) fail(ErrorKind::EmptyErrorSpace, "need at least two codewords");

    const std::uint64_t total_pairs = source.size * (source.size - 1) / 2;
    const bool exhaustive = total_pairs <= options.max_pairs;

    DesignMetrics metrics;
    metrics.exhaustive = exhaustive;
    metrics.pairs_evaluated = exhaustive ? total_pairs : options.max_pairs;

    // pair list: exhaustive enumeration, or a uniform draw with replacement
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sampled;
    if (!exhaustive) {
        Rng rng = Rng::substream(options.subsample_seed, 0x5a17);
        sampled.reserve(options.max_pairs);
        while (sampled.size() < options.max_pairs) {
            const auto i = static_cast<std::uint32_t>(rng.uniform_int(0, source.size - 1));
            const auto j = static_cast<std::uint32_t>(rng.uniform_int(0, source.size - 1));
            if (i != j) sampled.emplace_back(std::min(i, j), std::max(i, j));
        }
    }

    const std::int64_t n_items =
        exhaustive ? static_cast<std::int64_t>(source.size) - 1
                   : static_cast<std::int64_t>(sampled.size());
    const int threads = parallel ? std::max(1, options.workers) : 1;

    PairMetrics combined;
    if (threads == 1) {
        Eigen::MatrixXcd scratch_i, scratch_j;
        for (std::int64_t item = 0; item < n_items; ++item) {
            if (exhaustive) {
                const auto i = static_cast<std::uint32_t>(item);
                const auto& d_i = source.get(i, scratch_i);
                for (std::uint32_t j = i + 1; j < source.size; ++j) {
                    const auto [rank, product] = pair_rank_product(d_i, source.get(j, scratch_j));
                    combined.absorb(rank, product);
                }
            } else {
                const auto [rank, product] = pair_rank_product(
                    source.get(sampled[item].first, scratch_i),
                    source.get(sampled[item].second, scratch_j));
                combined.absorb(rank, product);
            }
        }
    } else {
        std::vector<PairMetrics> partials(threads);
#pragma omp parallel num_threads(threads)
        {
            const int tid = omp_get_thread_num();
            Eigen::MatrixXcd scratch_i, scratch_j;
#pragma omp for schedule(dynamic, 8)
            for (std::int64_t item = 0; item < n_items; ++item) {
                if (exhaustive) {
                    const auto i = static_cast<std::uint32_t>(item);
                    const auto& d_i = source.get(i, scratch_i);
                    for (std::uint32_t j = i + 1; j < source.size; ++j) {
                        const auto [rank, product] =
                            pair_rank_product(d_i, source.get(j, scratch_j));
                        partials[tid].absorb(rank, product);
                    }
                } else {
                    const auto [rank, product] = pair_rank_product(
                        source.get(sampled[item].first, scratch_i),
                        source.get(sampled[item].second, scratch_j));
                    partials[tid].absorb(rank, product);
                }
            }
        }
        for (const auto& partial : partials) combined.absorb(partial);
    }

    metrics.lambda_d = combined.min_rank == std::numeric_limits<int>::max() ? 0 : combined.min_rank;
    metrics.lambda_c = metrics.lambda_d > 0 ? combined.min_product : 0.0;
    return metrics;
}

DesignMetrics evaluate_design_metrics(const DispersionMatrixSet& dm_set,
                                      const ValidatedConfig& cfg, const PathProfile& profile,
                                      const MetricOptions& options) {
    return evaluate_metrics_impl(dm_set, cfg, profile, options, true);
}

DesignMetrics evaluate_design_metrics_serial(const DispersionMatrixSet& dm_set,
                                             const ValidatedConfig& cfg,
                                             const PathProfile& profile,
                                             const MetricOptions& options) {
    return evaluate_metrics_impl(dm_set, cfg, profile, options, false);
}

std::pair<DispersionMatrixSet, DesignMetrics> design_dispersion_matrices(
    const ValidatedConfig& cfg, int n_trials, const PathProfile& profile, std::uint64_t seed,
    const MetricOptions& options) {
    if (n_trials < 1) fail(ErrorKind::InvalidParameter, "n_trials must be >= 1");

    std::vector<DispersionMatrixSet> candidates(n_trials);
    std::vector<DesignMetrics> metrics(n_trials);
    const int threads = std::max(1, options.workers);

    MetricOptions inner = options;
    inner.workers = 1;

#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
    for (int trial = 0; trial < n_trials; ++trial) {
        candidates[trial] = generate_dm_set(cfg, Rng::derive(seed, trial, 0xd3));
        MetricOptions trial_options = inner;
        trial_options.subsample_seed = candidates[trial].seed;
        metrics[trial] = evaluate_metrics_impl(candidates[trial], cfg, profile, trial_options,
                                               false);
    }

    // two-stage argmax: diversity metric first, then the eigenvalue product,
    // ties resolved to the lowest trial index
    int winner = 0;
    for (int trial = 1; trial < n_trials; ++trial) {
        if (metrics[trial].lambda_d > metrics[winner].lambda_d ||
            (metrics[trial].lambda_d == metrics[winner].lambda_d &&
             metrics[trial].lambda_c > metrics[winner].lambda_c))
            winner = trial;
    }
    return {candidates[winner], metrics[winner]};
}

} // namespace stskotfs
