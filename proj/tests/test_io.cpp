#include <doctest.h>

#include <filesystem>

#include "stskotfs/errors.hpp"
#include "stskotfs/io.hpp"

using namespace stskotfs;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("stskotfs_test_" + name)).string();
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("dispersion set file round-trips exactly") {
    SystemConfig raw;
    raw.n = 2;
    raw.m = 2;
    raw.n_t = 2;
    raw.t_c = 2;
    raw.q = 4;
    raw.p = 1;
    const ValidatedConfig cfg = validate_config(raw);
    const DispersionMatrixSet set = generate_dm_set(cfg, 12345);
    const std::string path = temp_path("dm.txt");
    write_dm_set(path, set);
    const DispersionMatrixSet loaded = read_dm_set(path);
    CHECK(loaded.seed == set.seed);
    REQUIRE(loaded.matrices.size() == set.matrices.size());
    for (size_t q = 0; q < set.matrices.size(); ++q)
        CHECK((loaded.matrices[q] - set.matrices[q]).norm() == 0.0); // bit-exact
    std::filesystem::remove(path);
}

TEST_CASE("dispersion header sanity") {
    CHECK_THROWS_AS(dm_set_from_text("0 2 2 1\n", "t"), Error);
    CHECK_THROWS_AS(dm_set_from_text("2 2 2 1\n0 0\n", "t"), Error); // truncated
}

TEST_CASE("curve csv carries the meta line") {
    Curve curve;
    curve.kind = "capacity";
    curve.config_hash = 0xabcd;
    curve.seed = 7;
    curve.points = {{0.0, 0.5, 0.01}, {10.0, 1.5, 0.02}};
    const std::string csv = curve_to_csv(curve);
    CHECK(csv.find("# meta: kind=capacity") == 0);
    CHECK(csv.find("snr_db,value,stderr,kind\n") != std::string::npos);
    CHECK(csv.find("10,1.5,0.02,capacity\n") != std::string::npos);
}

TEST_CASE("channel dump round-trips") {
    SystemConfig raw;
    raw.n = 2;
    raw.m = 2;
    raw.u = 2;
    raw.n_t = 2;
    raw.n_r = 1;
    raw.p = 3;
    const ValidatedConfig cfg = validate_config(raw);
    Rng rng(31);
    const PathProfile profile = sample_paths(cfg, rng);
    const std::string path = temp_path("chan.txt");
    write_channel_dump(path, profile);
    const PathProfile loaded = read_channel_dump(path);
    CHECK(loaded.users == profile.users);
    CHECK(loaded.paths == profile.paths);
    CHECK(loaded.delay == profile.delay);
    CHECK(loaded.doppler == profile.doppler);
    for (size_t i = 0; i < profile.gains.size(); ++i)
        CHECK(loaded.gains[i] == profile.gains[i]);
    std::filesystem::remove(path);
}

TEST_CASE("snr grid grammar") {
    const auto grid = parse_snr_grid("0:2:10");
    REQUIRE(grid.size() == 6);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 10.0);
    const auto negative = parse_snr_grid("-10:5:0");
    REQUIRE(negative.size() == 3);
    CHECK(negative[1] == -5.0);
    CHECK(parse_snr_grid("7.5").size() == 1);
    CHECK_THROWS_AS(parse_snr_grid("10:0:20"), Error);
    CHECK_THROWS_AS(parse_snr_grid("abc"), Error);
    CHECK_THROWS_AS(parse_snr_grid("5:1:4"), Error);
}

} // TEST_SUITE
