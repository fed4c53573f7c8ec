#include "stskotfs/mapping.hpp"

#include "stskotfs/errors.hpp"

namespace stskotfs {

std::vector<BitGroup> split_bits(const BitVector& bits, const ValidatedConfig& cfg) {
    if (static_cast<int>(bits.size()) != cfg.total_bits)
        fail(ErrorKind::LengthMismatch, "expected " + std::to_string(cfg.total_bits) +
                                            " bits, got " + std::to_string(bits.size()));
    std::vector<BitGroup> groups(static_cast<size_t>(cfg.u) * cfg.g);
    for (size_t b = 0; b < groups.size(); ++b) {
        const size_t base = b * cfg.l_b;
        std::uint32_t dm = 0, apm = 0;
        for (int i = 0; i < cfg.l1; ++i) dm = dm << 1 | bits[base + i];
        for (int i = 0; i < cfg.l2; ++i) apm = apm << 1 | bits[base + cfg.l1 + i];
        groups[b] = {dm, apm};
    }
    return groups;
}

BitVector merge_bits(const std::vector<BitGroup>& groups, const ValidatedConfig& cfg) {
    if (static_cast<int>(groups.size()) != cfg.u * cfg.g)
        fail(ErrorKind::LengthMismatch, "expected " + std::to_string(cfg.u * cfg.g) + " groups");
    BitVector bits(cfg.total_bits);
    for (size_t b = 0; b < groups.size(); ++b) {
        const size_t base = b * cfg.l_b;
        for (int i = 0; i < cfg.l1; ++i)
            bits[base + i] = groups[b].dm_bits >> (cfg.l1 - 1 - i) & 1u;
        for (int i = 0; i < cfg.l2; ++i)
            bits[base + cfg.l1 + i] = groups[b].apm_bits >> (cfg.l2 - 1 - i) & 1u;
    }
    return bits;
}

std::pair<StskBlockIndex, Eigen::MatrixXcd> encode_stsk_block(const BitGroup& group,
                                                              const DispersionMatrixSet& dm_set,
                                                              const Constellation& constellation) {
    StskBlockIndex index;
    index.q = static_cast<int>(group.dm_bits) + 1;
    index.l = static_cast<int>(group.apm_bits) + 1;
    const auto symbol = constellation.points[index.l - 1];
    return {index, symbol * dm_set.matrices[index.q - 1]};
}

SparseSymbolVector build_sparse_vector(const std::vector<StskBlockIndex>& blocks,
                                       const ValidatedConfig& cfg,
                                       const Constellation& constellation) {
    if (static_cast<int>(blocks.size()) != cfg.u * cfg.g)
        fail(ErrorKind::LengthMismatch, "expected " + std::to_string(cfg.u * cfg.g) + " blocks");
    SparseSymbolVector out;
    out.dense = Eigen::VectorXcd::Zero(cfg.k_dim());
    out.dap.resize(blocks.size());
    out.apm.resize(static_cast<Eigen::Index>(blocks.size()));
    for (size_t b = 0; b < blocks.size(); ++b) {
        const int position = static_cast<int>(b) * cfg.q + blocks[b].q - 1;
        const auto symbol = constellation.points[blocks[b].l - 1];
        out.dense[position] = symbol;
        out.dap[b] = position;
        out.apm[static_cast<Eigen::Index>(b)] = symbol;
    }
    return out;
}

SparseSymbolVector encode_frame(const BitVector& bits, const ValidatedConfig& cfg,
                                const Constellation& constellation) {
    const auto groups = split_bits(bits, cfg);
    std::vector<StskBlockIndex> blocks(groups.size());
    for (size_t b = 0; b < groups.size(); ++b) {
        blocks[b].q = static_cast<int>(groups[b].dm_bits) + 1;
        blocks[b].l = static_cast<int>(groups[b].apm_bits) + 1;
    }
    return build_sparse_vector(blocks, cfg, constellation);
}

Eigen::MatrixXd ResourceAllocation::dense(int user) const {
    const auto& map = rb_of_group[user];
    int rows = 0;
    for (const auto& per_user : rb_of_group)
        for (int rb : per_user) rows = std::max(rows, rb + 1);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(rows, static_cast<int>(map.size()));
    for (size_t g = 0; g < map.size(); ++g) p(map[g], static_cast<int>(g)) = 1.0;
    return p;
}

ResourceAllocation build_resource_allocation(const ValidatedConfig& cfg) {
    ResourceAllocation alloc;
    alloc.scheme = cfg.scheme;
    alloc.rb_of_group.assign(cfg.u, std::vector<int>(cfg.g, 0));
    if (cfg.scheme == AllocationScheme::DelayScheme1) {
        // user u owns delay columns J*u .. J*u+J-1; slot g = j*N + n
        for (int user = 0; user < cfg.u; ++user)
            for (int j = 0; j < cfg.j_cols; ++j)
                for (int n = 0; n < cfg.n; ++n) {
                    const int column = cfg.j_cols * user + j;
                    alloc.rb_of_group[user][j * cfg.n + n] = column * cfg.n + n;
                }
    } else {
        // user u owns Doppler rows (N/U)*u .. ; slot g = l*(N/U) + r
        const int rows_per_user = cfg.n / cfg.u;
        for (int user = 0; user < cfg.u; ++user)
            for (int l = 0; l < cfg.m; ++l)
                for (int r = 0; r < rows_per_user; ++r) {
                    const int row = rows_per_user * user + r;
                    alloc.rb_of_group[user][l * rows_per_user + r] = l * cfg.n + row;
                }
    }
    return alloc;
}

Eigen::MatrixXd StMapper::dense() const {
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(size(), size());
    for (int dst = 0; dst < size(); ++dst) mat(dst, src_of_dst[dst]) = 1.0;
    return mat;
}

Eigen::VectorXcd StMapper::apply(const Eigen::VectorXcd& input) const {
    if (input.size() != size())
        fail(ErrorKind::DimensionMismatch, "ST mapper input length mismatch");
    Eigen::VectorXcd out(size());
    for (int dst = 0; dst < size(); ++dst) out[dst] = input[src_of_dst[dst]];
    return out;
}

StMapper build_st_mapper(const ValidatedConfig& cfg) {
    // Source layout (blockwise codewords): d_y = n_t + t_c*N_t + g*N_t*T_c + u*G*N_t*T_c.
    // Destination layout (slot-major transmit): d_x = g + n_t*G + u*N_t*G + t_c*G*U*N_t.
    StMapper mapper;
    mapper.src_of_dst.assign(static_cast<size_t>(cfg.st_dim()), 0);
    for (int user = 0; user < cfg.u; ++user)
        for (int g = 0; g < cfg.g; ++g)
            for (int n_t = 0; n_t < cfg.n_t; ++n_t)
                for (int t_c = 0; t_c < cfg.t_c; ++t_c) {
                    const int d_y = n_t + t_c * cfg.n_t + g * cfg.n_t * cfg.t_c +
                                    user * cfg.g * cfg.n_t * cfg.t_c;
                    const int d_x = g + n_t * cfg.g + user * cfg.n_t * cfg.g +
                                    t_c * cfg.g * cfg.u * cfg.n_t;
                    mapper.src_of_dst[d_x] = d_y;
                }
    return mapper;
}

Codebook::Codebook(const ValidatedConfig& cfg, const Constellation& constellation)
    : cfg_(&cfg), constellation_(&constellation) {
    if (cfg.total_bits > 24)
        fail(ErrorKind::CodebookTooLarge,
             "codebook of 2^" + std::to_string(cfg.total_bits) + " entries is not enumerable");
    size_ = 1u << cfg.total_bits;
}

BitVector Codebook::bits(std::uint32_t message) const {
    return message_to_bits(message, cfg_->total_bits);
}

SparseSymbolVector Codebook::codeword(std::uint32_t message) const {
    return encode_frame(bits(message), *cfg_, *constellation_);
}

BitVector message_to_bits(std::uint32_t message, int n_bits) {
    BitVector bits(n_bits);
    for (int i = 0; i < n_bits; ++i) bits[i] = message >> (n_bits - 1 - i) & 1u;
    return bits;
}

std::uint32_t bits_to_message(const BitVector& bits) {
    std::uint32_t message = 0;
    for (auto bit : bits) message = message << 1 | bit;
    return message;
}

BitVector demap_bits(const std::vector<int>& dap, const Eigen::VectorXcd& apm,
                     const ValidatedConfig& cfg, const Constellation& constellation) {
    const int n_blocks = cfg.u * cfg.g;
    if (static_cast<int>(dap.size()) != n_blocks || apm.size() != n_blocks)
        fail(ErrorKind::LengthMismatch, "demap expects M_d indices and symbols");
    std::vector<BitGroup> groups(n_blocks);
    for (int b = 0; b < n_blocks; ++b) {
        const int index = dap[b];
        if (index < b * cfg.q || index >= (b + 1) * cfg.q)
            fail(ErrorKind::InvalidDapIndex,
                 "index " + std::to_string(index) + " outside block " + std::to_string(b));
        groups[b].dm_bits = static_cast<std::uint32_t>(index - b * cfg.q);
        groups[b].apm_bits = static_cast<std::uint32_t>(constellation.nearest(apm[b]));
    }
    return merge_bits(groups, cfg);
}

} // namespace stskotfs
