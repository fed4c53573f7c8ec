#include <doctest.h>

#include <bit>
#include <cmath>
#include <set>

#include "stskotfs/config.hpp"
#include "stskotfs/errors.hpp"

using namespace stskotfs;

namespace {

SystemConfig toy(int n, int m, int q, int v, int t_c, int u) {
    SystemConfig cfg;
    cfg.n = n;
    cfg.m = m;
    cfg.q = q;
    cfg.v = v;
    cfg.t_c = t_c;
    cfg.u = u;
    return cfg;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("derived constants for the figure-scale setup") {
    const ValidatedConfig cfg = validate_config(toy(4, 8, 2, 2, 2, 1));
    CHECK(cfg.m_d == 32);
    CHECK(cfg.g == 32);
    CHECK(cfg.l_b == 2);
    CHECK(cfg.total_bits == 64); // N*M*log2(V*Q)
    CHECK(cfg.rate == doctest::Approx(1.0)); // 1 bit/s/Hz
}

TEST_CASE("derived constants for the smallest toy") {
    const ValidatedConfig cfg = validate_config(toy(2, 2, 2, 2, 2, 1));
    CHECK(cfg.m_d == 4);
    CHECK(cfg.g == 4);
    CHECK(cfg.total_bits == 8);
    CHECK(cfg.j_cols == 2);
}

TEST_CASE("user count must divide the delay axis") {
    CHECK_THROWS_WITH_AS(validate_config(toy(4, 5, 2, 2, 2, 2)), doctest::Contains("Indivisible"),
                         Error);
    try {
        validate_config(toy(4, 5, 2, 2, 2, 2));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IndivisibleUsers);
    }
}

TEST_CASE("scheme 2 additionally needs N divisible by U") {
    SystemConfig raw = toy(3, 4, 2, 2, 2, 2);
    raw.scheme = AllocationScheme::DopplerScheme2;
    CHECK_THROWS_AS(validate_config(raw), Error);
    raw.n = 4;
    CHECK_NOTHROW(validate_config(raw));
}

TEST_CASE("power-of-two guards") {
    CHECK_THROWS_AS(validate_config(toy(2, 2, 3, 2, 2, 1)), Error);
    CHECK_THROWS_AS(validate_config(toy(2, 2, 2, 3, 2, 1)), Error);
    CHECK_THROWS_AS(validate_config(toy(2, 2, 2, 1, 2, 1)), Error); // V >= 2
    CHECK_NOTHROW(validate_config(toy(2, 2, 1, 2, 2, 1)));          // Q = 1 is legal
}

TEST_CASE("delay and Doppler ranges") {
    SystemConfig raw = toy(2, 4, 2, 2, 2, 1);
    raw.l_max = 4; // > M-1
    CHECK_THROWS_AS(validate_config(raw), Error);
    raw.l_max = -1;
    raw.k_max = 2; // > N-1
    CHECK_THROWS_AS(validate_config(raw), Error);
    raw.k_max = -1;
    const ValidatedConfig cfg = validate_config(raw);
    CHECK(cfg.l_max == 3); // defaults to the full ranges
    CHECK(cfg.k_max == 1);
}

TEST_CASE("bit budget identity over a config sweep") {
    for (int n : {1, 2, 4})
        for (int m : {2, 4, 6})
            for (int q : {1, 2, 4})
                for (int v : {2, 4})
                    for (int u : {1, 2}) {
                        const ValidatedConfig cfg = validate_config(toy(n, m, q, v, 2, u));
                        CHECK(cfg.total_bits == cfg.g * cfg.u * cfg.l_b);
                        CHECK(cfg.total_bits == cfg.m_d * (cfg.l1 + cfg.l2));
                    }
}

TEST_CASE("BPSK and QPSK points") {
    const Constellation bpsk = build_constellation(2, ConstellationKind::PSK);
    CHECK(bpsk.points[0] == std::complex<double>(1.0, 0.0));
    CHECK(bpsk.points[1] == std::complex<double>(-1.0, 0.0));

    const Constellation qpsk = build_constellation(4, ConstellationKind::PSK);
    const double s = 1.0 / std::sqrt(2.0);
    std::set<std::pair<double, double>> expected = {
        {s, s}, {-s, s}, {-s, -s}, {s, -s}};
    for (auto point : qpsk.points) {
        bool found = false;
        for (const auto& [re, im] : expected)
            found |= std::abs(point.real() - re) < 1e-12 && std::abs(point.imag() - im) < 1e-12;
        CHECK(found);
    }
}

TEST_CASE("PSK rings are Gray-labeled") {
    for (int order : {4, 8, 16}) {
        const Constellation c = build_constellation(order, ConstellationKind::PSK);
        // recover each label's angular position, then walk the ring: physical
        // neighbors must carry labels that differ in exactly one bit
        std::vector<int> label_at(order, -1);
        for (int label = 0; label < order; ++label) {
            const double angle = std::arg(c.points[label]) - (order == 4 ? M_PI / 4.0 : 0.0);
            const int position =
                ((int)std::lround(angle / (2.0 * M_PI) * order) % order + order) % order;
            label_at[position] = label;
        }
        for (int p = 0; p < order; ++p) {
            REQUIRE(label_at[p] >= 0);
            const int diff = label_at[p] ^ label_at[(p + 1) % order];
            CHECK(std::popcount(static_cast<unsigned>(diff)) == 1);
        }
    }
}

TEST_CASE("energy normalization across supported orders") {
    for (auto [order, kind] :
         std::vector<std::pair<int, ConstellationKind>>{{2, ConstellationKind::PSK},
                                                        {4, ConstellationKind::PSK},
                                                        {8, ConstellationKind::PSK},
                                                        {16, ConstellationKind::PSK},
                                                        {4, ConstellationKind::QAM},
                                                        {16, ConstellationKind::QAM},
                                                        {64, ConstellationKind::QAM}}) {
        const Constellation c = build_constellation(order, kind);
        double energy = 0.0;
        for (auto point : c.points) energy += std::norm(point);
        CHECK(std::abs(energy / order - 1.0) <= 1e-12);
        std::set<std::pair<double, double>> distinct;
        for (auto point : c.points) distinct.insert({point.real(), point.imag()});
        CHECK(distinct.size() == static_cast<size_t>(order));
    }
}

TEST_CASE("16-QAM is the unit-energy lattice") {
    const Constellation qam = build_constellation(16, ConstellationKind::QAM);
    const double scale = std::sqrt(10.0);
    for (auto point : qam.points) {
        const double re = point.real() * scale, im = point.imag() * scale;
        CHECK(std::abs(re - std::round(re)) < 1e-9);
        CHECK((std::lround(std::abs(re)) == 1 || std::lround(std::abs(re)) == 3));
        CHECK((std::lround(std::abs(im)) == 1 || std::lround(std::abs(im)) == 3));
    }
}

TEST_CASE("unsupported orders") {
    CHECK_THROWS_AS(build_constellation(3, ConstellationKind::PSK), Error);
    CHECK_THROWS_AS(build_constellation(8, ConstellationKind::QAM), Error); // not square
    CHECK_THROWS_AS(build_constellation(1, ConstellationKind::PSK), Error);
}

TEST_CASE("config file parsing") {
    const std::string text =
        "n = 2\nm = 4\nnt = 2\nnr = 1\ntc = 2\nq = 2\nv = 4\nu = 2\np = 3\n"
        "delta_f_hz = 15000\nf_c_hz = 4e9\nscheme = 1\nl_max = 2\nk_max = 1\n"
        "constellation = qam\n# trailing comment\n";
    const SystemConfig raw = parse_config_text(text);
    CHECK(raw.m == 4);
    CHECK(raw.v == 4);
    CHECK(raw.u == 2);
    CHECK(raw.constellation == ConstellationKind::QAM);
    const ValidatedConfig cfg = validate_config(raw);
    CHECK(cfg.j_cols == 2);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
    CHECK_THROWS_AS(parse_config_text("bogus = 1\n"), Error);
    CHECK_THROWS_AS(parse_config_text("n 4\n"), Error);
    CHECK_THROWS_AS(parse_config_text("n = \n"), Error);
    CHECK_THROWS_AS(parse_config_text("scheme = 3\n"), Error);
    CHECK_NOTHROW(parse_config_text("\n# only a comment\n"));
}

TEST_CASE("defaults mirror the reference setup") {
    const SystemConfig raw = parse_config_text("");
    CHECK(raw.n == 4);
    CHECK(raw.t_c == 2);
    CHECK(raw.delta_f_hz == doctest::Approx(15e3));
    CHECK(raw.f_c_hz == doctest::Approx(4e9));
}

TEST_CASE("hash is stable and sensitive") {
    const ValidatedConfig a = validate_config(toy(2, 2, 2, 2, 2, 1));
    const ValidatedConfig b = validate_config(toy(2, 2, 2, 2, 2, 1));
    ValidatedConfig c = validate_config(toy(2, 2, 2, 4, 2, 1));
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
}

} // TEST_SUITE
