#include <doctest.h>

#include "stskotfs/errors.hpp"
#include "stskotfs/mapping.hpp"
#include "stskotfs/rng.hpp"

using namespace stskotfs;

namespace {

ValidatedConfig make_cfg(int n, int m, int q, int v, int n_t, int t_c, int u,
                         AllocationScheme scheme = AllocationScheme::DelayScheme1) {
    SystemConfig raw;
    raw.n = n;
    raw.m = m;
    raw.q = q;
    raw.v = v;
    raw.n_t = n_t;
    raw.t_c = t_c;
    raw.u = u;
    raw.p = 1;
    raw.scheme = scheme;
    return validate_config(raw);
}

} // namespace

TEST_SUITE("mapping") {

TEST_CASE("split_bits slices block-wise") {
    const ValidatedConfig cfg = make_cfg(2, 2, 2, 2, 2, 2, 1); // L1 = L2 = 1, 4 blocks
    SUBCASE("all zeros") {
        const auto groups = split_bits(BitVector(8, 0), cfg);
        REQUIRE(groups.size() == 4);
        for (const auto& g : groups) {
            CHECK(g.dm_bits == 0);
            CHECK(g.apm_bits == 0);
        }
    }
    SUBCASE("pattern 10 11 01 00") {
        const auto groups = split_bits({1, 0, 1, 1, 0, 1, 0, 0}, cfg);
        CHECK(groups[0].dm_bits == 1);
        CHECK(groups[0].apm_bits == 0);
        CHECK(groups[1].dm_bits == 1);
        CHECK(groups[1].apm_bits == 1);
        CHECK(groups[2].dm_bits == 0);
        CHECK(groups[2].apm_bits == 1);
        CHECK(groups[3].dm_bits == 0);
        CHECK(groups[3].apm_bits == 0);
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(split_bits(BitVector(7, 0), cfg), Error);
    }
}

TEST_CASE("encode_stsk_block scales the selected matrix") {
    const Constellation bpsk = build_constellation(2, ConstellationKind::PSK);
    DispersionMatrixSet dms;
    dms.matrices.push_back(Eigen::MatrixXcd::Identity(2, 2));
    Eigen::MatrixXcd second(2, 2);
    second << 0, 1, 1, 0;
    dms.matrices.push_back(second);

    SUBCASE("all-zero bits select the first matrix with +1") {
        const auto [index, s] = encode_stsk_block({0, 0}, dms, bpsk);
        CHECK(index.q == 1);
        CHECK(index.l == 1);
        CHECK((s - dms.matrices[0]).norm() == doctest::Approx(0.0));
    }
    SUBCASE("ones select the second matrix with -1") {
        const auto [index, s] = encode_stsk_block({1, 1}, dms, bpsk);
        CHECK(index.q == 2);
        CHECK(index.l == 2);
        CHECK((s + dms.matrices[1]).norm() == doctest::Approx(0.0));
    }
    SUBCASE("codeword energy follows the power constraint") {
        const Constellation qam = build_constellation(16, ConstellationKind::QAM);
        for (std::uint32_t label = 0; label < 16; ++label) {
            const auto [index, s] = encode_stsk_block({1, label}, dms, qam);
            const double f2 = std::norm(qam.points[label]);
            CHECK((s.adjoint() * s).trace().real() == doctest::Approx(f2 * 2.0)); // T_c = 2
        }
    }
}

TEST_CASE("sparse vector layout") {
    const ValidatedConfig cfg = make_cfg(1, 1, 2, 2, 2, 2, 1); // single block, Q = 2
    const Constellation bpsk = build_constellation(2, ConstellationKind::PSK);
    SUBCASE("first slot") {
        const auto k = build_sparse_vector({{1, 1}}, cfg, bpsk);
        CHECK(k.dense[0] == std::complex<double>(1.0, 0.0));
        CHECK(k.dense[1] == std::complex<double>(0.0, 0.0));
        CHECK(k.dap == std::vector<int>{0});
    }
    SUBCASE("second slot with the negative symbol") {
        const auto k = build_sparse_vector({{2, 2}}, cfg, bpsk);
        CHECK(k.dense[0] == std::complex<double>(0.0, 0.0));
        CHECK(k.dense[1] == std::complex<double>(-1.0, 0.0));
    }
}

TEST_CASE("sparse vector has exactly M_d nonzeros and energy sum of |f|^2") {
    const ValidatedConfig cfg = make_cfg(2, 4, 4, 4, 2, 2, 2);
    const Constellation psk = build_constellation(4, ConstellationKind::PSK);
    Rng rng(11);
    for (int repeat = 0; repeat < 25; ++repeat) {
        BitVector bits(cfg.total_bits);
        for (auto& b : bits) b = rng.next_u64() & 1;
        const auto k = encode_frame(bits, cfg, psk);
        int nonzeros = 0;
        for (Eigen::Index i = 0; i < k.dense.size(); ++i) nonzeros += k.dense[i] != 0.0;
        CHECK(nonzeros == cfg.m_d);
        CHECK(k.dense.squaredNorm() == doctest::Approx(double(cfg.m_d))); // unit-energy PSK
    }
}

TEST_CASE("delay-scheme allocation") {
    SUBCASE("figure example: 12x12 grid, three users") {
        const ValidatedConfig cfg = make_cfg(12, 12, 2, 2, 1, 1, 3);
        const auto alloc = build_resource_allocation(cfg);
        // user 0 owns delay columns 0..3
        for (int g = 0; g < cfg.g; ++g) {
            const int m_d = alloc.rb_of_group[0][g];
            CHECK(m_d / cfg.n <= 3);
        }
        // user 1 starts at column 4
        CHECK(alloc.rb_of_group[1][0] / cfg.n == 4);
    }
    SUBCASE("single user owns the identity") {
        const ValidatedConfig cfg = make_cfg(2, 2, 2, 2, 1, 1, 1);
        const auto alloc = build_resource_allocation(cfg);
        const Eigen::MatrixXd p = alloc.dense(0);
        CHECK((p - Eigen::MatrixXd::Identity(4, 4)).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("allocations are orthonormal and disjoint across users") {
    for (auto scheme : {AllocationScheme::DelayScheme1, AllocationScheme::DopplerScheme2}) {
        const ValidatedConfig cfg = make_cfg(4, 4, 2, 2, 2, 2, 2, scheme);
        const auto alloc = build_resource_allocation(cfg);
        const Eigen::MatrixXd p0 = alloc.dense(0);
        const Eigen::MatrixXd p1 = alloc.dense(1);
        CHECK((p0.transpose() * p0 - Eigen::MatrixXd::Identity(cfg.g, cfg.g)).norm() ==
              doctest::Approx(0.0));
        CHECK((p1.transpose() * p1 - Eigen::MatrixXd::Identity(cfg.g, cfg.g)).norm() ==
              doctest::Approx(0.0));
        CHECK((p0.transpose() * p1).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("doppler-scheme rows are disjoint per user") {
    const ValidatedConfig cfg = make_cfg(4, 2, 2, 2, 1, 1, 2, AllocationScheme::DopplerScheme2);
    const auto alloc = build_resource_allocation(cfg);
    for (int g = 0; g < cfg.g; ++g) {
        CHECK(alloc.rb_of_group[0][g] % cfg.n < 2);  // user 0: Doppler rows 0..1
        CHECK(alloc.rb_of_group[1][g] % cfg.n >= 2); // user 1: rows 2..3
    }
}

TEST_CASE("st mapper collapses to identity when orders coincide") {
    const ValidatedConfig cfg = make_cfg(2, 2, 2, 2, 1, 1, 1);
    const StMapper mapper = build_st_mapper(cfg);
    for (int i = 0; i < mapper.size(); ++i) CHECK(mapper.src_of_dst[i] == i);
}

TEST_CASE("st mapper swaps the middle coordinates of a 2x2 block layout") {
    const ValidatedConfig cfg = make_cfg(2, 1, 2, 2, 2, 1, 1); // G = 2, N_t = 2, T_c = 1
    const StMapper mapper = build_st_mapper(cfg);
    Eigen::VectorXcd input(4);
    input << 10.0, 20.0, 30.0, 40.0;
    const Eigen::VectorXcd output = mapper.apply(input);
    CHECK(output[0] == input[0]);
    CHECK(output[1] == input[2]);
    CHECK(output[2] == input[1]);
    CHECK(output[3] == input[3]);
}

TEST_CASE("st mapper is a permutation for every config") {
    for (int u : {1, 2})
        for (int n_t : {1, 2, 3})
            for (int t_c : {1, 2, 3}) {
                const ValidatedConfig cfg = make_cfg(2, 2, 2, 2, n_t, t_c, u);
                const StMapper mapper = build_st_mapper(cfg);
                const Eigen::MatrixXd y = mapper.dense();
                CHECK((y * y.transpose() - Eigen::MatrixXd::Identity(mapper.size(), mapper.size()))
                          .norm() == doctest::Approx(0.0));
                CHECK((y.rowwise().sum().array() == 1.0).all());
                CHECK((y.colwise().sum().array() == 1.0).all());
            }
}

TEST_CASE("codebook enumerates distinct codewords and round-trips") {
    const ValidatedConfig tiny = make_cfg(1, 1, 2, 2, 2, 2, 1); // L = 2
    const Constellation bpsk = build_constellation(2, ConstellationKind::PSK);
    const Codebook codebook(tiny, bpsk);
    REQUIRE(codebook.size() == 4);
    for (std::uint32_t a = 0; a < 4; ++a)
        for (std::uint32_t b = a + 1; b < 4; ++b)
            CHECK((codebook.codeword(a).dense - codebook.codeword(b).dense).norm() > 0.5);

    const ValidatedConfig toy = make_cfg(2, 2, 2, 2, 2, 2, 1); // L = 8
    const Codebook toy_book(toy, bpsk);
    REQUIRE(toy_book.size() == 256);
    for (std::uint32_t message = 0; message < toy_book.size(); ++message) {
        const auto k = toy_book.codeword(message);
        const BitVector decoded = demap_bits(k.dap, k.apm, toy, bpsk);
        CHECK(bits_to_message(decoded) == message);
    }
}

TEST_CASE("codebook guard") {
    SystemConfig raw;
    raw.n = 4;
    raw.m = 8;
    raw.q = 2;
    raw.v = 2; // L = 64
    const ValidatedConfig cfg = validate_config(raw);
    const Constellation bpsk = build_constellation(2, ConstellationKind::PSK);
    CHECK_THROWS_AS(Codebook(cfg, bpsk), Error);
}

TEST_CASE("demap absorbs sub-threshold perturbations") {
    const ValidatedConfig cfg = make_cfg(2, 2, 2, 4, 2, 2, 1);
    const Constellation qpsk = build_constellation(4, ConstellationKind::PSK);
    Rng rng(3);
    for (int repeat = 0; repeat < 20; ++repeat) {
        BitVector bits(cfg.total_bits);
        for (auto& b : bits) b = rng.next_u64() & 1;
        auto k = encode_frame(bits, cfg, qpsk);
        Eigen::VectorXcd noisy = k.apm;
        for (Eigen::Index i = 0; i < noisy.size(); ++i) {
            const double radius = 0.49 * qpsk.min_distance * rng.uniform();
            const double angle = 2.0 * M_PI * rng.uniform();
            noisy[i] += std::polar(radius, angle);
        }
        CHECK(demap_bits(k.dap, noisy, cfg, qpsk) == bits);
    }
}

TEST_CASE("demap rejects out-of-block indices") {
    const ValidatedConfig cfg = make_cfg(1, 1, 2, 2, 2, 2, 1);
    const Constellation bpsk = build_constellation(2, ConstellationKind::PSK);
    const Eigen::VectorXcd apm = Eigen::VectorXcd::Ones(1);
    CHECK_THROWS_AS(demap_bits({2}, apm, cfg, bpsk), Error); // >= Q*M_d
    try {
        demap_bits({2}, apm, cfg, bpsk);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidDapIndex);
    }
}

} // TEST_SUITE
