#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stskotfs/config.hpp"
#include "stskotfs/dispersion.hpp"

namespace stskotfs {

using BitVector = std::vector<std::uint8_t>;

/// One STSK block decision: 1-based DM index q in {1..Q} and 1-based
/// constellation index l in {1..V}.
struct StskBlockIndex {
    int q = 1;
    int l = 1;
};

/// Bits of one block, already split: dm_bits holds L1 bits as a natural
/// binary value (MSB first), apm_bits holds the L2-bit constellation label.
struct BitGroup {
    std::uint32_t dm_bits = 0;
    std::uint32_t apm_bits = 0;
};

/// Equivalent transmit vector of one frame: dense length Q*M_d with exactly
/// M_d nonzeros, plus its (index set, APM symbols) factorization. Blocks are
/// stacked user-major, the Q-slot of block (u,g) starting at (u*G+g)*Q.
struct SparseSymbolVector {
    Eigen::VectorXcd dense;
    std::vector<int> dap;  ///< M_d active indices into the dense vector, ascending
    Eigen::VectorXcd apm;  ///< the M_d constellation symbols in block order
};

/// Per-user 0/1 matrix assigning each of the G per-user codeword slots to a
/// resource block. Stored as index maps; the dense M_d x G matrix is built on
/// demand. Scheme 1 gives users disjoint delay columns, scheme 2 disjoint
/// Doppler rows.
struct ResourceAllocation {
    AllocationScheme scheme;
    /// rb_of_group[u][g] = DD-grid index m_d = l*N + k owned by slot g of user u
    std::vector<std::vector<int>> rb_of_group;

    Eigen::MatrixXd dense(int user) const;
};

/// Permutation reordering the blockwise-vectorized ST codewords into the
/// slot-major layout the stacked channel acts on. src_of_dst[d_x] = d_y means
/// output[d_x] = input[d_y].
struct StMapper {
    std::vector<int> src_of_dst;

    int size() const { return static_cast<int>(src_of_dst.size()); }
    Eigen::MatrixXd dense() const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& input) const;
};

/// Splits an L-bit frame into U*G (dm_bits, apm_bits) groups; group (u,g)
/// starts at bit (u*G+g)*L_b.
std::vector<BitGroup> split_bits(const BitVector& bits, const ValidatedConfig& cfg);

/// Inverse of split_bits.
BitVector merge_bits(const std::vector<BitGroup>& groups, const ValidatedConfig& cfg);

/// S = f_l * A_q for one block.
std::pair<StskBlockIndex, Eigen::MatrixXcd> encode_stsk_block(const BitGroup& group,
                                                              const DispersionMatrixSet& dm_set,
                                                              const Constellation& constellation);

/// Scatters U*G block decisions into the sparse equivalent vector.
SparseSymbolVector build_sparse_vector(const std::vector<StskBlockIndex>& blocks,
                                       const ValidatedConfig& cfg,
                                       const Constellation& constellation);

/// Full bit-to-sparse-vector chain. The dispersion matrices themselves do not
/// appear here: codewords select them by index, the channel model applies them.
SparseSymbolVector encode_frame(const BitVector& bits, const ValidatedConfig& cfg,
                                const Constellation& constellation);

ResourceAllocation build_resource_allocation(const ValidatedConfig& cfg);

StMapper build_st_mapper(const ValidatedConfig& cfg);

/// Lazy view over all 2^L frame codewords in bit-lexicographic order
/// (message index == bits read MSB-first). Guarded at L <= 24.
class Codebook {
public:
    Codebook(const ValidatedConfig& cfg, const Constellation& constellation);

    std::uint32_t size() const { return size_; }
    BitVector bits(std::uint32_t message) const;
    SparseSymbolVector codeword(std::uint32_t message) const;

    const ValidatedConfig& cfg() const { return *cfg_; }

private:
    const ValidatedConfig* cfg_;
    const Constellation* constellation_;
    std::uint32_t size_;
};

BitVector message_to_bits(std::uint32_t message, int n_bits);
std::uint32_t bits_to_message(const BitVector& bits);

/// Exact inverse of the encode chain. APM symbols are quantized to the
/// nearest constellation point first, so perturbations below half the minimum
/// constellation distance are absorbed.
BitVector demap_bits(const std::vector<int>& dap, const Eigen::VectorXcd& apm,
                     const ValidatedConfig& cfg, const Constellation& constellation);

} // namespace stskotfs
