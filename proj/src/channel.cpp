#include "stskotfs/channel.hpp"

#include <cmath>

#include "stskotfs/errors.hpp"

namespace stskotfs {

namespace {

int positive_mod(int value, int modulus) {
    const int r = value % modulus;
    return r < 0 ? r + modulus : r;
}

std::complex<double> path_phase(int delay, int doppler, int m_d) {
    const double angle = -2.0 * M_PI * static_cast<double>(delay) * doppler / m_d;
    return {std::cos(angle), std::sin(angle)};
}

void draw_gains(PathProfile& profile, Rng& rng) {
    const double variance = 1.0 / profile.paths;
    for (auto& g : profile.gains) g = rng.cgaussian(variance);
}

} // namespace

PathProfile sample_paths(const ValidatedConfig& cfg, Rng& rng) {
    const long grid = static_cast<long>(cfg.l_max + 1) * (2L * cfg.k_max + 1);
    if (cfg.p > grid)
        fail(ErrorKind::TooManyPaths, "p = " + std::to_string(cfg.p) + " exceeds the " +
                                          std::to_string(grid) + "-cell index grid");
    PathProfile profile;
    profile.users = cfg.u;
    profile.n_r = cfg.n_r;
    profile.n_t = cfg.n_t;
    profile.paths = cfg.p;
    profile.delay.resize(cfg.p);
    profile.doppler.resize(cfg.p);
    for (int i = 0; i < cfg.p; ++i) {
        while (true) {
            const int l = static_cast<int>(rng.uniform_int(0, cfg.l_max));
            const int k = static_cast<int>(rng.uniform_int(-cfg.k_max, cfg.k_max));
            bool clash = false;
            for (int j = 0; j < i; ++j)
                clash |= profile.delay[j] == l && profile.doppler[j] == k;
            if (!clash) {
                profile.delay[i] = l;
                profile.doppler[i] = k;
                break;
            }
        }
    }
    profile.gains.resize(static_cast<size_t>(cfg.u) * cfg.n_r * cfg.n_t * cfg.p);
    draw_gains(profile, rng);
    return profile;
}

PathProfile profile_with_indices(const ValidatedConfig& cfg, const std::vector<int>& delays,
                                 const std::vector<int>& dopplers, Rng& rng) {
    if (static_cast<int>(delays.size()) != cfg.p || static_cast<int>(dopplers.size()) != cfg.p)
        fail(ErrorKind::DimensionMismatch, "need exactly P delay and Doppler indices");
    for (int i = 0; i < cfg.p; ++i) {
        if (delays[i] < 0 || delays[i] > cfg.l_max || std::abs(dopplers[i]) > cfg.k_max)
            fail(ErrorKind::DelayDopplerOutOfRange, "pinned index outside configured range");
        for (int j = 0; j < i; ++j)
            if (delays[j] == delays[i] && dopplers[j] == dopplers[i])
                fail(ErrorKind::InvalidParameter, "pinned (delay, doppler) pairs must be distinct");
    }
    PathProfile profile;
    profile.users = cfg.u;
    profile.n_r = cfg.n_r;
    profile.n_t = cfg.n_t;
    profile.paths = cfg.p;
    profile.delay = delays;
    profile.doppler = dopplers;
    profile.gains.resize(static_cast<size_t>(cfg.u) * cfg.n_r * cfg.n_t * cfg.p);
    draw_gains(profile, rng);
    return profile;
}

void resample_gains(PathProfile& profile, Rng& rng) { draw_gains(profile, rng); }

Eigen::MatrixXcd effective_link_matrix(const PathProfile& profile, int user, int rx, int tx,
                                       const ValidatedConfig& cfg) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(cfg.m_d, cfg.m_d);
    for (int i = 0; i < profile.paths; ++i) {
        const auto weight = profile.gain(user, rx, tx, i) *
                            path_phase(profile.delay[i], profile.doppler[i], cfg.m_d);
        const int shift_l = profile.delay[i];
        const int shift_k = positive_mod(profile.doppler[i], cfg.n);
        for (int l = 0; l < cfg.m; ++l) {
            const int src_l = positive_mod(l - shift_l, cfg.m);
            for (int k = 0; k < cfg.n; ++k) {
                const int src_k = positive_mod(k - shift_k, cfg.n);
                h(l * cfg.n + k, src_l * cfg.n + src_k) += weight;
            }
        }
    }
    return h;
}

namespace {

// Reduced per-user channel: column (n_t*G + g) is column rb(g) of the
// (rx-stacked) link matrix of antenna n_t.
Eigen::MatrixXcd reduced_user_channel(const PathProfile& profile, const ValidatedConfig& cfg,
                                      const ResourceAllocation& alloc, int user,
                                      std::vector<Eigen::MatrixXcd>* links_out) {
    Eigen::MatrixXcd omega(cfg.m_d * cfg.n_r, cfg.g * cfg.n_t);
    for (int rx = 0; rx < cfg.n_r; ++rx) {
        for (int tx = 0; tx < cfg.n_t; ++tx) {
            Eigen::MatrixXcd link = effective_link_matrix(profile, user, rx, tx, cfg);
            for (int g = 0; g < cfg.g; ++g)
                omega.block(rx * cfg.m_d, tx * cfg.g + g, cfg.m_d, 1) =
                    link.col(alloc.rb_of_group[user][g]);
            if (links_out) links_out->push_back(std::move(link));
        }
    }
    return omega;
}

} // namespace

EquivalentChannel assemble_equivalent_model(const PathProfile& profile,
                                            const ValidatedConfig& cfg,
                                            const ResourceAllocation& alloc,
                                            const StMapper& mapper,
                                            const DispersionMatrixSet& dm_set,
                                            bool keep_intermediates) {
    if (profile.users != cfg.u || profile.n_r != cfg.n_r || profile.n_t != cfg.n_t ||
        profile.paths != cfg.p)
        fail(ErrorKind::DimensionMismatch, "path profile does not match the configuration");
    if (static_cast<int>(dm_set.matrices.size()) != cfg.q)
        fail(ErrorKind::DimensionMismatch, "dispersion set size != Q");
    if (mapper.size() != cfg.st_dim())
        fail(ErrorKind::DimensionMismatch, "ST mapper size mismatch");

    EquivalentChannel model;
    std::vector<Eigen::MatrixXcd> omegas(cfg.u);
    if (keep_intermediates) model.h_links.reserve(static_cast<size_t>(cfg.u) * cfg.n_r * cfg.n_t);
    for (int user = 0; user < cfg.u; ++user)
        omegas[user] = reduced_user_channel(profile, cfg, alloc, user,
                                            keep_intermediates ? &model.h_links : nullptr);

    // C column (u*G+g)*Q + q collects, per time-slot block, the combination
    // of reduced-channel columns weighted by the entries of A_q. This is the
    // permuted triple product written out; compose_equivalent_explicit checks it.
    const int rows_per_slot = cfg.m_d * cfg.n_r;
    model.c = Eigen::MatrixXcd::Zero(cfg.y_dim(), cfg.k_dim());
    for (int user = 0; user < cfg.u; ++user)
        for (int g = 0; g < cfg.g; ++g)
            for (int q = 0; q < cfg.q; ++q) {
                const int column = (user * cfg.g + g) * cfg.q + q;
                for (int t_c = 0; t_c < cfg.t_c; ++t_c)
                    for (int tx = 0; tx < cfg.n_t; ++tx)
                        model.c.block(t_c * rows_per_slot, column, rows_per_slot, 1) +=
                            dm_set.matrices[q](tx, t_c) * omegas[user].col(tx * cfg.g + g);
            }
    if (keep_intermediates) model.omega = std::move(omegas);
    return model;
}

Eigen::MatrixXcd compose_equivalent_explicit(const PathProfile& profile,
                                             const ValidatedConfig& cfg,
                                             const ResourceAllocation& alloc,
                                             const StMapper& mapper,
                                             const DispersionMatrixSet& dm_set) {
    // Slot-major stacked channel: I_{T_c} (x) [Omega^(0), ..., Omega^(U-1)],
    // matching the slot-major output layout of the ST mapper.
    std::vector<Eigen::MatrixXcd> omegas(cfg.u);
    for (int user = 0; user < cfg.u; ++user)
        omegas[user] = reduced_user_channel(profile, cfg, alloc, user, nullptr);

    const int rows_per_slot = cfg.m_d * cfg.n_r;
    const int cols_per_slot = cfg.g * cfg.n_t * cfg.u;
    Eigen::MatrixXcd omega_row(rows_per_slot, cols_per_slot);
    for (int user = 0; user < cfg.u; ++user)
        omega_row.middleCols(user * cfg.g * cfg.n_t, cfg.g * cfg.n_t) = omegas[user];

    Eigen::MatrixXcd omega_stacked = Eigen::MatrixXcd::Zero(cfg.y_dim(), cfg.st_dim());
    for (int t_c = 0; t_c < cfg.t_c; ++t_c)
        omega_stacked.block(t_c * rows_per_slot, t_c * cols_per_slot, rows_per_slot,
                            cols_per_slot) = omega_row;

    Eigen::MatrixXcd chi(cfg.n_t * cfg.t_c, cfg.q);
    for (int q = 0; q < cfg.q; ++q)
        chi.col(q) = dm_set.matrices[q].reshaped(); // column-major vec

    Eigen::MatrixXcd chi_bar = Eigen::MatrixXcd::Zero(cfg.st_dim(), cfg.k_dim());
    for (int block = 0; block < cfg.u * cfg.g; ++block)
        chi_bar.block(block * cfg.n_t * cfg.t_c, block * cfg.q, cfg.n_t * cfg.t_c, cfg.q) = chi;

    return omega_stacked * mapper.dense() * chi_bar;
}

Eigen::VectorXcd EquivalentChannel::transmit(const SparseSymbolVector& k) const {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(c.rows());
    for (size_t b = 0; b < k.dap.size(); ++b)
        y += k.apm[static_cast<Eigen::Index>(b)] * c.col(k.dap[b]);
    return y;
}

std::vector<Eigen::VectorXcd> dd_frames(const SparseSymbolVector& k, const ValidatedConfig& cfg,
                                        const ResourceAllocation& alloc,
                                        const DispersionMatrixSet& dm_set) {
    std::vector<Eigen::VectorXcd> frames(static_cast<size_t>(cfg.u) * cfg.n_t * cfg.t_c,
                                         Eigen::VectorXcd::Zero(cfg.m_d));
    for (int user = 0; user < cfg.u; ++user)
        for (int g = 0; g < cfg.g; ++g) {
            const int block = user * cfg.g + g;
            const int active = k.dap[block] - block * cfg.q;
            const auto symbol = k.apm[block];
            const auto& dm = dm_set.matrices[active];
            const int rb = alloc.rb_of_group[user][g];
            for (int tx = 0; tx < cfg.n_t; ++tx)
                for (int t_c = 0; t_c < cfg.t_c; ++t_c)
                    frames[(static_cast<size_t>(user) * cfg.n_t + tx) * cfg.t_c + t_c][rb] +=
                        symbol * dm(tx, t_c);
        }
    return frames;
}

MatrixModel build_matrix_model(const PathProfile& profile, const ValidatedConfig& cfg) {
    MatrixModel model;
    model.delay = profile.delay;
    model.doppler = profile.doppler;
    model.users = cfg.u;
    model.n_t = cfg.n_t;
    model.paths = cfg.p;
    model.h.resize(cfg.n_r, cfg.p * cfg.n_t * cfg.u);
    for (int user = 0; user < cfg.u; ++user)
        for (int rx = 0; rx < cfg.n_r; ++rx)
            for (int tx = 0; tx < cfg.n_t; ++tx)
                for (int i = 0; i < cfg.p; ++i)
                    model.h(rx, (user * cfg.n_t + tx) * cfg.p + i) =
                        profile.gain(user, rx, tx, i) *
                        path_phase(profile.delay[i], profile.doppler[i], cfg.m_d);
    return model;
}

Eigen::MatrixXcd MatrixModel::codeword(const std::vector<Eigen::VectorXcd>& frames,
                                       const ValidatedConfig& cfg) const {
    const int t_slots = cfg.t_c;
    Eigen::MatrixXcd x(paths * n_t * users, cfg.m_d * t_slots);
    for (int user = 0; user < users; ++user)
        for (int tx = 0; tx < n_t; ++tx)
            for (int t_c = 0; t_c < t_slots; ++t_c) {
                const auto& frame = frames[(static_cast<size_t>(user) * n_t + tx) * t_slots + t_c];
                for (int l = 0; l < cfg.m; ++l)
                    for (int k = 0; k < cfg.n; ++k) {
                        const int column = t_c * cfg.m_d + l * cfg.n + k;
                        for (int i = 0; i < paths; ++i) {
                            const int src = positive_mod(l - delay[i], cfg.m) * cfg.n +
                                            positive_mod(k - doppler[i], cfg.n);
                            x((user * n_t + tx) * paths + i, column) = frame[src];
                        }
                    }
            }
    return x;
}

Eigen::VectorXcd add_noise(const Eigen::VectorXcd& signal, double gamma, Rng& rng) {
    if (gamma <= 0) fail(ErrorKind::InvalidParameter, "gamma must be positive");
    const double n0 = 1.0 / gamma;
    Eigen::VectorXcd out = signal;
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += rng.cgaussian(n0);
    return out;
}

} // namespace stskotfs
