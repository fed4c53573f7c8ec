#pragma once

// Independent reference implementations used only by tests. These rebuild the
// quantities under test from the raw definitions, on different code paths
// than the library: the received frame by direct per-antenna per-slot loops,
// pair metrics through a singular value decomposition of the raw difference
// matrix, the single-branch fading error probability in closed form.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "stskotfs/channel.hpp"
#include "stskotfs/config.hpp"
#include "stskotfs/dispersion.hpp"
#include "stskotfs/mapping.hpp"

namespace oracle {

using stskotfs::BitVector;
using stskotfs::DispersionMatrixSet;
using stskotfs::PathProfile;
using stskotfs::ValidatedConfig;

/// Per-(user, tx, slot) DD frames straight from the definitions: the block
/// codeword entry S(n_t, t_c) = f * A_q(n_t, t_c) lands on the resource block
/// the scheme assigns to slot g of user u.
inline std::vector<Eigen::VectorXcd> frames_by_definition(
    const BitVector& bits, const ValidatedConfig& cfg, const DispersionMatrixSet& dm_set,
    const stskotfs::Constellation& constellation) {
    std::vector<Eigen::VectorXcd> frames(
        static_cast<size_t>(cfg.u) * cfg.n_t * cfg.t_c, Eigen::VectorXcd::Zero(cfg.m_d));
    for (int user = 0; user < cfg.u; ++user)
        for (int g = 0; g < cfg.g; ++g) {
            const int block = user * cfg.g + g;
            std::uint32_t dm_value = 0, apm_value = 0;
            for (int i = 0; i < cfg.l1; ++i)
                dm_value = dm_value << 1 | bits[block * cfg.l_b + i];
            for (int i = 0; i < cfg.l2; ++i)
                apm_value = apm_value << 1 | bits[block * cfg.l_b + cfg.l1 + i];
            const std::complex<double> symbol = constellation.points[apm_value];
            const Eigen::MatrixXcd& dm = dm_set.matrices[dm_value];

            int rb;
            if (cfg.scheme == stskotfs::AllocationScheme::DelayScheme1) {
                const int j = g / cfg.n, n = g % cfg.n;
                rb = (cfg.j_cols * user + j) * cfg.n + n;
            } else {
                const int rows = cfg.n / cfg.u;
                const int l = g / rows, r = g % rows;
                rb = l * cfg.n + rows * user + r;
            }
            for (int tx = 0; tx < cfg.n_t; ++tx)
                for (int t_c = 0; t_c < cfg.t_c; ++t_c)
                    frames[(static_cast<size_t>(user) * cfg.n_t + tx) * cfg.t_c + t_c][rb] +=
                        symbol * dm(tx, t_c);
        }
    return frames;
}

/// Noiseless received stack, straight per-antenna per-slot loops over the
/// path sums. Stacking: slot-major, then rx antenna, then resource block.
inline Eigen::VectorXcd receive_by_definition(const std::vector<Eigen::VectorXcd>& frames,
                                              const ValidatedConfig& cfg,
                                              const PathProfile& profile) {
    auto wrap = [](int value, int modulus) {
        const int r = value % modulus;
        return r < 0 ? r + modulus : r;
    };
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(cfg.m_d * cfg.n_r * cfg.t_c);
    for (int t_c = 0; t_c < cfg.t_c; ++t_c)
        for (int rx = 0; rx < cfg.n_r; ++rx)
            for (int l = 0; l < cfg.m; ++l)
                for (int k = 0; k < cfg.n; ++k) {
                    std::complex<double> sum = 0.0;
                    for (int user = 0; user < cfg.u; ++user)
                        for (int tx = 0; tx < cfg.n_t; ++tx)
                            for (int i = 0; i < cfg.p; ++i) {
                                const double angle = -2.0 * M_PI * profile.delay[i] *
                                                     profile.doppler[i] / cfg.m_d;
                                const std::complex<double> weight =
                                    profile.gain(user, rx, tx, i) *
                                    std::complex<double>(std::cos(angle), std::sin(angle));
                                const int src = wrap(l - profile.delay[i], cfg.m) * cfg.n +
                                                wrap(k - profile.doppler[i], cfg.n);
                                sum += weight *
                                       frames[(static_cast<size_t>(user) * cfg.n_t + tx) *
                                                  cfg.t_c +
                                              t_c][src];
                            }
                    y[t_c * cfg.m_d * cfg.n_r + rx * cfg.m_d + l * cfg.n + k] = sum;
                }
    return y;
}

/// Rank and nonzero-eigenvalue product of (d_i - d_j)(d_i - d_j)^H computed
/// through the singular values of the raw difference (lambda_j = sigma_j^2),
/// not through an eigendecomposition of the Gram matrix.
inline std::pair<int, double> pair_metrics_by_svd(const Eigen::MatrixXcd& d_i,
                                                  const Eigen::MatrixXcd& d_j) {
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(d_i - d_j);
    const Eigen::VectorXd sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma[0] <= 0.0) return {0, 0.0};
    const double threshold = 1e-9 * sigma[0] * sigma[0];
    int rank = 0;
    double product = 1.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        const double lambda = sigma[i] * sigma[i];
        if (lambda > threshold) {
            ++rank;
            product *= lambda;
        }
    }
    return {rank, product};
}

/// Single-branch Rayleigh pairwise error probability in closed form:
/// 0.5 * (1 - sqrt(c / (1 + c))) with c = lambda*gamma/(4P).
inline double single_branch_pep(double lambda, double gamma, int paths) {
    const double c = lambda * gamma / (4.0 * paths);
    return 0.5 * (1.0 - std::sqrt(c / (1.0 + c)));
}

} // namespace oracle
