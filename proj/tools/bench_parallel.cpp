// Benchmark of the OpenMP kernels against their serial reference
// implementations: BER sweep trials, union-bound pair sums, DCMC capacity
// draws and dispersion-design candidate evaluation. Prints per-kernel wall
// times, speedup and an agreement check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "stskotfs/analysis.hpp"
#include "stskotfs/dispersion.hpp"
#include "stskotfs/harness.hpp"
#include "stskotfs/io.hpp"

using namespace stskotfs;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial_s, double parallel_s, bool agree) {
    std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name,
                serial_s, parallel_s, serial_s / parallel_s, agree ? "agree" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (argc > 1) workers = std::max(1, std::atoi(argv[1]));
    std::printf("parallel kernels with %d workers vs serial references\n\n", workers);

    SystemConfig raw;
    raw.n = 2;
    raw.m = 2;
    raw.q = 2;
    raw.v = 2;
    raw.n_t = 2;
    raw.n_r = 2;
    raw.t_c = 2;
    raw.u = 1;
    raw.p = 2;
    const ValidatedConfig cfg = validate_config(raw);
    const DispersionMatrixSet dms = generate_dm_set(cfg, 1);

    { // BER sweep trials
        SweepOptions options;
        options.stop.target_errors = 1u << 30; // run to the trial cap
        options.stop.max_trials = 20000;
        options.seed = 1;
        const auto detectors = parse_detector_list("mld,ircd:10,prcgd:1");
        options.workers = 1;
        auto t0 = std::chrono::steady_clock::now();
        const RunReport serial = run_ber_sweep_serial(cfg, dms, detectors, {8.0}, options);
        const double serial_s = seconds_since(t0);
        options.workers = workers;
        t0 = std::chrono::steady_clock::now();
        const RunReport parallel = run_ber_sweep(cfg, dms, detectors, {8.0}, options);
        const double parallel_s = seconds_since(t0);
        report("ber-sweep", serial_s, parallel_s, ber_to_csv(serial) == ber_to_csv(parallel));
    }

    { // union-bound pair sum
        Rng rng(2);
        const PathProfile profile = sample_paths(cfg, rng);
        std::vector<double> grid;
        for (int s = 0; s <= 20; s += 2) grid.push_back(s);
        auto t0 = std::chrono::steady_clock::now();
        const Curve serial = union_bound_ber_serial(cfg, dms, profile, grid);
        const double serial_s = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const Curve parallel = union_bound_ber(cfg, dms, profile, grid, workers);
        const double parallel_s = seconds_since(t0);
        bool agree = true;
        for (size_t s = 0; s < grid.size(); ++s)
            agree &= std::abs(parallel.points[s].value - serial.points[s].value) <=
                     1e-12 * serial.points[s].value;
        report("union-bound", serial_s, parallel_s, agree);
    }

    { // capacity draws
        CapacityOptions options;
        options.n_channel_draws = 60;
        options.n_noise_draws = 20;
        options.seed = 3;
        const std::vector<double> grid{-10, 0, 10};
        options.workers = 1;
        auto t0 = std::chrono::steady_clock::now();
        const Curve serial = dcmc_capacity_serial(cfg, dms, grid, options);
        const double serial_s = seconds_since(t0);
        options.workers = workers;
        t0 = std::chrono::steady_clock::now();
        const Curve parallel = dcmc_capacity(cfg, dms, grid, options);
        const double parallel_s = seconds_since(t0);
        bool agree = true;
        for (size_t s = 0; s < grid.size(); ++s)
            agree &= parallel.points[s].value == serial.points[s].value;
        report("dcmc-capacity", serial_s, parallel_s, agree);
    }

    { // design-search candidate evaluation
        Rng rng(4);
        const PathProfile profile = sample_paths(cfg, rng);
        MetricOptions options;
        options.workers = 1;
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = design_dispersion_matrices(cfg, 16, profile, 5, options);
        const double serial_s = seconds_since(t0);
        options.workers = workers;
        t0 = std::chrono::steady_clock::now();
        const auto parallel = design_dispersion_matrices(cfg, 16, profile, 5, options);
        const double parallel_s = seconds_since(t0);
        const bool agree = serial.first.seed == parallel.first.seed &&
                           serial.second.lambda_c == parallel.second.lambda_c;
        report("dm-design", serial_s, parallel_s, agree);
    }

    return 0;
}
