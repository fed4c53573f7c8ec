#include "stskotfs/analysis.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "stskotfs/errors.hpp"
#include "stskotfs/quadrature.hpp"

namespace stskotfs {

namespace {

constexpr int kQuadratureOrder = 64;

/// Deterministic pairwise tree sum; independent of how the slots were filled.
double tree_sum(std::vector<double> values) {
    if (values.empty()) return 0.0;
    size_t count = values.size();
    while (count > 1) {
        const size_t half = (count + 1) / 2;
        for (size_t i = 0; i < count / 2; ++i) values[i] = values[2 * i] + values[2 * i + 1];
        if (count % 2) values[half - 1] = values[count - 1];
        count = half;
    }
    return values[0];
}

std::vector<double> nonzero_eigenvalues(const Eigen::MatrixXcd& r) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd values = eig.eigenvalues();
    const double top = values.size() ? values.maxCoeff() : 0.0;
    std::vector<double> nonzero;
    if (top <= 0.0) return nonzero;
    const double threshold = 1e-9 * top;
    for (Eigen::Index i = values.size() - 1; i >= 0; --i)
        if (values[i] > threshold) nonzero.push_back(values[i]);
    return nonzero;
}

/// All matrix-model codewords of the frame codebook, cached.
struct MatrixCodebook {
    std::vector<Eigen::MatrixXcd> codewords;
    std::uint64_t size = 0;

    MatrixCodebook(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                   const PathProfile& profile) {
        if (cfg.total_bits > 24)
            fail(ErrorKind::CodebookTooLarge,
                 "pairwise sums over 2^" + std::to_string(cfg.total_bits) + " codewords");
        size = 1ull << cfg.total_bits;
        const Constellation constellation = build_constellation(cfg.v, cfg.constellation);
        const ResourceAllocation alloc = build_resource_allocation(cfg);
        const MatrixModel model = build_matrix_model(profile, cfg);
        codewords.reserve(size);
        for (std::uint64_t message = 0; message < size; ++message) {
            const SparseSymbolVector k = encode_frame(
                message_to_bits(static_cast<std::uint32_t>(message), cfg.total_bits), cfg,
                constellation);
            codewords.push_back(model.codeword(dd_frames(k, cfg, alloc, dm_set), cfg));
        }
    }
};

} // namespace

double db_to_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

double pep_from_eigenvalues(const std::vector<double>& eigenvalues, double gamma, int paths,
                            int n_r) {
    const auto& rule = gauss_legendre(kQuadratureOrder, 0.0, M_PI / 2.0);
    double integral = 0.0;
    for (size_t node = 0; node < rule.nodes.size(); ++node) {
        const double sin2 = std::sin(rule.nodes[node]) * std::sin(rule.nodes[node]);
        double integrand = 1.0;
        for (double lambda : eigenvalues)
            integrand *= std::pow(1.0 + lambda * gamma / (4.0 * paths * sin2), -n_r);
        integral += rule.weights[node] * integrand;
    }
    return integral / M_PI;
}

PepResult pairwise_error_probability(const Eigen::MatrixXcd& r, double gamma, int paths,
                                     int n_r) {
    if (r.rows() != r.cols()) fail(ErrorKind::NonHermitianInput, "matrix must be square");
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        fail(ErrorKind::NonHermitianInput, "difference Gram matrix is not Hermitian");
    if (gamma < 0 || paths < 1 || n_r < 1)
        fail(ErrorKind::InvalidParameter, "need gamma >= 0, paths >= 1, n_r >= 1");

    PepResult result;
    result.eigenvalues = nonzero_eigenvalues((r + r.adjoint()) / 2.0);
    result.rank = static_cast<int>(result.eigenvalues.size());
    result.value = pep_from_eigenvalues(result.eigenvalues, gamma, paths, n_r);
    return result;
}

Curve union_bound_ber(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                      const PathProfile& profile, const std::vector<double>& snr_grid_db,
                      int workers) {
    const MatrixCodebook source(cfg, dm_set, profile);
    const std::int64_t n_codewords = static_cast<std::int64_t>(source.size);
    const int n_snr = static_cast<int>(snr_grid_db.size());

    std::vector<double> gammas(n_snr);
    for (int s = 0; s < n_snr; ++s) gammas[s] = db_to_linear(snr_grid_db[s]);

    // partial[i] holds the contribution of pairs (i, j > i): 2 * D_b * PEP.
    // Rows are independent, so the fill order cannot change the result; the
    // final reduction is a fixed pairwise tree.
    std::vector<std::vector<double>> partial(n_codewords, std::vector<double>(n_snr, 0.0));
    const int threads = std::max(1, workers);
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads) if (threads > 1)
    for (std::int64_t i = 0; i < n_codewords - 1; ++i) {
        const Eigen::MatrixXcd& d_i = source.codewords[i];
        for (std::int64_t j = i + 1; j < n_codewords; ++j) {
            const Eigen::MatrixXcd delta = source.codewords[j] - d_i;
            const std::vector<double> lambdas = nonzero_eigenvalues(delta * delta.adjoint());
            const double hamming = std::popcount(static_cast<std::uint64_t>(i ^ j));
            for (int s = 0; s < n_snr; ++s)
                partial[i][s] +=
                    2.0 * hamming * pep_from_eigenvalues(lambdas, gammas[s], cfg.p, cfg.n_r);
        }
    }

    Curve curve;
    curve.kind = "union-bound";
    curve.config_hash = cfg.hash();
    curve.dm_seed = dm_set.seed;
    curve.points.resize(n_snr);
    const double normalizer = std::pow(2.0, cfg.total_bits) * static_cast<double>(cfg.total_bits);
    for (int s = 0; s < n_snr; ++s) {
        std::vector<double> column(n_codewords);
        for (std::int64_t i = 0; i < n_codewords; ++i) column[i] = partial[i][s];
        curve.points[s] = {snr_grid_db[s], tree_sum(std::move(column)) / normalizer, 0.0};
    }
    return curve;
}

Curve union_bound_ber_serial(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                             const PathProfile& profile,
                             const std::vector<double>& snr_grid_db) {
    // plain in-order accumulation, the reference for the parallel kernel
    const MatrixCodebook source(cfg, dm_set, profile);
    const std::int64_t n_codewords = static_cast<std::int64_t>(source.size);
    Curve curve;
    curve.kind = "union-bound";
    curve.config_hash = cfg.hash();
    curve.dm_seed = dm_set.seed;
    const double normalizer = std::pow(2.0, cfg.total_bits) * static_cast<double>(cfg.total_bits);
    for (double snr_db : snr_grid_db) {
        const double gamma = db_to_linear(snr_db);
        double sum = 0.0;
        for (std::int64_t i = 0; i < n_codewords - 1; ++i)
            for (std::int64_t j = i + 1; j < n_codewords; ++j) {
                const Eigen::MatrixXcd delta = source.codewords[j] - source.codewords[i];
                const double hamming = std::popcount(static_cast<std::uint64_t>(i ^ j));
                sum += 2.0 * hamming *
                       pep_from_eigenvalues(nonzero_eigenvalues(delta * delta.adjoint()), gamma,
                                            cfg.p, cfg.n_r);
            }
        curve.points.push_back({snr_db, sum / normalizer, 0.0});
    }
    return curve;
}

DiversityResult diversity_and_coding_gain(const ValidatedConfig& cfg,
                                          const DispersionMatrixSet& dm_set,
                                          const PathProfile& profile, int workers) {
    MetricOptions options;
    options.workers = workers;
    options.subsample_seed = dm_set.seed;
    const DesignMetrics metrics = evaluate_design_metrics(dm_set, cfg, profile, options);
    if (metrics.lambda_d == 0) fail(ErrorKind::EmptyErrorSpace, "error space has rank zero");
    DiversityResult result;
    result.diversity_order = metrics.lambda_d * cfg.n_r;
    result.coding_gain = std::pow(metrics.lambda_c, 1.0 / metrics.lambda_d);
    return result;
}

namespace {

/// log2 sum_j exp(psi_j) with the max factored out
double log2_sum_exp(const std::vector<double>& psi) {
    const double top = *std::max_element(psi.begin(), psi.end());
    double sum = 0.0;
    for (double value : psi) sum += std::exp(value - top);
    return (top + std::log(sum)) / M_LN2;
}

Curve capacity_impl(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                    const std::vector<double>& snr_grid_db, const CapacityOptions& options,
                    bool parallel) {
    if (options.n_channel_draws < 1 || options.n_noise_draws < 1)
        fail(ErrorKind::InvalidParameter, "capacity needs at least one draw of each kind");
    if (cfg.total_bits > 24)
        fail(ErrorKind::CodebookTooLarge,
             "capacity sum over 2^" + std::to_string(cfg.total_bits) + " codewords");

    const Constellation constellation = build_constellation(cfg.v, cfg.constellation);
    const ResourceAllocation alloc = build_resource_allocation(cfg);
    const StMapper mapper = build_st_mapper(cfg);
    const Codebook codebook(cfg, constellation);
    const std::uint32_t n_codewords = codebook.size();

    std::vector<SparseSymbolVector> codewords;
    codewords.reserve(n_codewords);
    for (std::uint32_t message = 0; message < n_codewords; ++message)
        codewords.push_back(codebook.codeword(message));

    const int n_snr = static_cast<int>(snr_grid_db.size());
    std::vector<double> gammas(n_snr);
    for (int s = 0; s < n_snr; ++s) gammas[s] = db_to_linear(snr_grid_db[s]);

    // Per-draw capacity samples. Substreams are keyed on draw indices only,
    // so the same channel and noise realizations recur at every SNR point and
    // the curve is smooth in SNR up to estimator noise.
    std::vector<std::vector<double>> draws(options.n_channel_draws,
                                           std::vector<double>(n_snr, 0.0));

    const int threads = parallel ? std::max(1, options.workers) : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
    for (int draw = 0; draw < options.n_channel_draws; ++draw) {
        Rng channel_rng = Rng::substream(options.seed, draw, 0, 0xc4a);
        const PathProfile profile = sample_paths(cfg, channel_rng);
        const EquivalentChannel channel =
            assemble_equivalent_model(profile, cfg, alloc, mapper, dm_set, false);

        // received images of all codewords; pairwise distances and noise
        // projections make the inner psi loop O(1) per (i, j)
        Eigen::MatrixXcd images(channel.c.rows(), n_codewords);
        for (std::uint32_t i = 0; i < n_codewords; ++i)
            images.col(i) = channel.transmit(codewords[i]);
        const Eigen::MatrixXcd gram = images.adjoint() * images;
        Eigen::MatrixXd sq_dist(n_codewords, n_codewords);
        for (std::uint32_t i = 0; i < n_codewords; ++i)
            for (std::uint32_t j = 0; j < n_codewords; ++j)
                sq_dist(i, j) = std::max(
                    0.0, gram(i, i).real() + gram(j, j).real() - 2.0 * gram(i, j).real());

        std::vector<double> accum(n_snr, 0.0);
        std::vector<double> psi(n_codewords);
        for (int noise = 0; noise < options.n_noise_draws; ++noise) {
            Rng noise_rng = Rng::substream(options.seed, draw, noise + 1, 0x40153);
            Eigen::VectorXcd unit_noise(channel.c.rows());
            for (Eigen::Index row = 0; row < unit_noise.size(); ++row)
                unit_noise[row] = noise_rng.cgaussian(1.0);
            const Eigen::VectorXcd projections = images.adjoint() * unit_noise;

            for (int s = 0; s < n_snr; ++s) {
                const double gamma = gammas[s];
                const double noise_scale = std::sqrt(1.0 / gamma);
                double total = 0.0;
                for (std::uint32_t i = 0; i < n_codewords; ++i) {
                    const double r_i = projections[i].real();
                    for (std::uint32_t j = 0; j < n_codewords; ++j)
                        psi[j] = gamma * (-sq_dist(i, j) -
                                          2.0 * noise_scale * (r_i - projections[j].real()));
                    total += log2_sum_exp(psi);
                }
                accum[s] += total / n_codewords;
            }
        }
        for (int s = 0; s < n_snr; ++s) {
            const double mean_lse = accum[s] / options.n_noise_draws;
            draws[draw][s] = (cfg.total_bits - mean_lse) / (double(cfg.m_d) * cfg.t_c);
        }
    }

    Curve curve;
    curve.kind = "capacity";
    curve.config_hash = cfg.hash();
    curve.dm_seed = dm_set.seed;
    curve.seed = options.seed;
    curve.points.resize(n_snr);
    for (int s = 0; s < n_snr; ++s) {
        std::vector<double> column(options.n_channel_draws);
        for (int draw = 0; draw < options.n_channel_draws; ++draw) column[draw] = draws[draw][s];
        const double mean = tree_sum(column) / options.n_channel_draws;
        double variance = 0.0;
        for (double value : column) variance += (value - mean) * (value - mean);
        const double stderr_value =
            options.n_channel_draws > 1
                ? std::sqrt(variance / (options.n_channel_draws - 1.0) / options.n_channel_draws)
                : 0.0;
        curve.points[s] = {snr_grid_db[s], mean, stderr_value};
    }
    return curve;
}

} // namespace

Curve dcmc_capacity(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                    const std::vector<double>& snr_grid_db, const CapacityOptions& options) {
    return capacity_impl(cfg, dm_set, snr_grid_db, options, true);
}

Curve dcmc_capacity_serial(const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
                           const std::vector<double>& snr_grid_db,
                           const CapacityOptions& options) {
    return capacity_impl(cfg, dm_set, snr_grid_db, options, false);
}

} // namespace stskotfs
