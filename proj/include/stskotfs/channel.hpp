#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stskotfs/config.hpp"
#include "stskotfs/dispersion.hpp"
#include "stskotfs/mapping.hpp"
#include "stskotfs/rng.hpp"

namespace stskotfs {

/// P-path doubly-selective channel: integer delay/Doppler indices shared by
/// all links, complex gains per (user, rx antenna, tx antenna, path) drawn
/// CN(0, 1/P). (delay, doppler) pairs are pairwise distinct.
struct PathProfile {
    std::vector<int> delay;   ///< l_i in [0, l_max]
    std::vector<int> doppler; ///< k_i in [-k_max, k_max]
    int users = 0, n_r = 0, n_t = 0, paths = 0;
    std::vector<std::complex<double>> gains; ///< [u][n_r][n_t][i] flattened

    std::complex<double> gain(int user, int rx, int tx, int path) const {
        return gains[((static_cast<size_t>(user) * n_r + rx) * n_t + tx) * paths + path];
    }
    std::complex<double>& gain(int user, int rx, int tx, int path) {
        return gains[((static_cast<size_t>(user) * n_r + rx) * n_t + tx) * paths + path];
    }
};

/// Draws integer indices uniformly (resampling until pairwise distinct) and
/// fresh gains. Throws TooManyPaths if P exceeds the index grid.
PathProfile sample_paths(const ValidatedConfig& cfg, Rng& rng);

/// Profile with caller-pinned indices and freshly drawn gains.
PathProfile profile_with_indices(const ValidatedConfig& cfg, const std::vector<int>& delays,
                                 const std::vector<int>& dopplers, Rng& rng);

/// Redraws all gains in place, keeping the indices.
void resample_gains(PathProfile& profile, Rng& rng);

/// Effective DD-domain channel matrix of one (user, rx, tx) link:
/// sum over paths of gain * exp(-j*2*pi*l_i*k_i/M_d) applied to the cyclic
/// (delay, Doppler) double shift. Shift convention: output(l*N+k) picks up
/// input((l-l_i mod M)*N + (k-k_i mod N)).
Eigen::MatrixXcd effective_link_matrix(const PathProfile& profile, int user, int rx, int tx,
                                       const ValidatedConfig& cfg);

/// Stacked linear model y = C*K + n over the whole frame, with the
/// intermediates retained for inspection.
struct EquivalentChannel {
    Eigen::MatrixXcd c; ///< (M_d*N_r*T_c) x (Q*M_d)
    /// per-link effective matrices, index ((u*N_r)+n_r)*N_t + n_t; empty if not kept
    std::vector<Eigen::MatrixXcd> h_links;
    /// per-user reduced channel H_bar^(u) * (I_{N_t} (x) P^(u)), M_d*N_r x G*N_t
    std::vector<Eigen::MatrixXcd> omega;

    /// y = C*K exploiting the M_d-sparsity of K.
    Eigen::VectorXcd transmit(const SparseSymbolVector& k) const;
};

EquivalentChannel assemble_equivalent_model(const PathProfile& profile,
                                            const ValidatedConfig& cfg,
                                            const ResourceAllocation& alloc,
                                            const StMapper& mapper,
                                            const DispersionMatrixSet& dm_set,
                                            bool keep_intermediates = true);

/// Rebuilds C as the explicit dense triple product (stacked channel) x
/// (ST mapper) x (blockdiag of vectorized DMs). Reference path used by tests.
Eigen::MatrixXcd compose_equivalent_explicit(const PathProfile& profile,
                                             const ValidatedConfig& cfg,
                                             const ResourceAllocation& alloc,
                                             const StMapper& mapper,
                                             const DispersionMatrixSet& dm_set);

/// Per-(user, tx, slot) DD-domain frames x = P^(u) s of one codeword;
/// index (user*N_t + n_t)*T_c + t_c, each of length M_d.
std::vector<Eigen::VectorXcd> dd_frames(const SparseSymbolVector& k, const ValidatedConfig& cfg,
                                        const ResourceAllocation& alloc,
                                        const DispersionMatrixSet& dm_set);

/// Compact matrix model Y = H*X for the whole frame: H is N_r x (P*N_t*U)
/// with entries gain * exp(-j*2*pi*l_i*k_i/M_d); codewords X collect the
/// doubly-shifted frame samples.
struct MatrixModel {
    Eigen::MatrixXcd h; ///< N_r x (P*N_t*U)
    std::vector<int> delay, doppler;
    int users = 0, n_t = 0, paths = 0;

    /// X of shape (P*N_t*U) x (M_d*T_c) for the given per-link DD frames.
    Eigen::MatrixXcd codeword(const std::vector<Eigen::VectorXcd>& frames,
                              const ValidatedConfig& cfg) const;
};

MatrixModel build_matrix_model(const PathProfile& profile, const ValidatedConfig& cfg);

/// Adds i.i.d. CN(0, 1/gamma) noise.
Eigen::VectorXcd add_noise(const Eigen::VectorXcd& signal, double gamma, Rng& rng);

} // namespace stskotfs
