#include "stskotfs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stskotfs/errors.hpp"

namespace stskotfs {

namespace {

std::string fmt17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string fmt12(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::IoFailure, "cannot open " + path + " for writing");
    out << body;
    if (!out) fail(ErrorKind::IoFailure, "write to " + path + " failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoFailure, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

std::string dm_set_to_text(const DispersionMatrixSet& set) {
    if (set.matrices.empty()) fail(ErrorKind::InvalidParameter, "empty dispersion set");
    const auto rows = set.matrices.front().rows();
    const auto cols = set.matrices.front().cols();
    std::ostringstream out;
    out << set.matrices.size() << ' ' << rows << ' ' << cols << ' ' << set.seed << '\n';
    for (const auto& matrix : set.matrices) {
        if (matrix.rows() != rows || matrix.cols() != cols)
            fail(ErrorKind::DimensionMismatch, "ragged dispersion set");
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                out << fmt17(matrix(r, c).real()) << ' ' << fmt17(matrix(r, c).imag()) << '\n';
    }
    return out.str();
}

DispersionMatrixSet dm_set_from_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::uint64_t q = 0, rows = 0, cols = 0, seed = 0;
    if (!(in >> q >> rows >> cols >> seed) || q == 0 || rows == 0 || cols == 0)
        fail(ErrorKind::BadConfigFile, origin + ": bad dispersion-set header");
    DispersionMatrixSet set;
    set.seed = seed;
    set.matrices.assign(q, Eigen::MatrixXcd(rows, cols));
    for (auto& matrix : set.matrices)
        for (std::uint64_t r = 0; r < rows; ++r)
            for (std::uint64_t c = 0; c < cols; ++c) {
                double re = 0, im = 0;
                if (!(in >> re >> im))
                    fail(ErrorKind::BadConfigFile, origin + ": truncated dispersion set");
                matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {re, im};
            }
    return set;
}

void write_dm_set(const std::string& path, const DispersionMatrixSet& set) {
    write_text_file(path, dm_set_to_text(set));
}

DispersionMatrixSet read_dm_set(const std::string& path) {
    return dm_set_from_text(read_text_file(path), path);
}

std::string curve_to_csv(const Curve& curve) {
    std::ostringstream out;
    out << "# meta: kind=" << curve.kind << " config=" << std::hex << curve.config_hash
        << std::dec << " dm_seed=" << curve.dm_seed << " profile_seed=" << curve.profile_seed
        << " seed=" << curve.seed << '\n';
    out << "snr_db,value,stderr,kind\n";
    for (const auto& point : curve.points)
        out << fmt12(point.snr_db) << ',' << fmt12(point.value) << ','
            << fmt12(point.stderr_value) << ',' << curve.kind << '\n';
    return out.str();
}

void write_curve_csv(const std::string& path, const Curve& curve) {
    write_text_file(path, curve_to_csv(curve));
}

std::string ber_to_csv(const RunReport& report) {
    std::ostringstream out;
    out << "snr_db,detector,trials,bit_errors,ber\n";
    if (report.points.empty()) return out.str();
    const size_t n_points = report.points.front().size();
    for (size_t s = 0; s < n_points; ++s)
        for (size_t d = 0; d < report.points.size(); ++d) {
            const BerPoint& point = report.points[d][s];
            out << fmt12(point.snr_db) << ',' << point.detector << ',' << point.trials << ','
                << point.bit_errors << ',' << fmt12(point.ber) << '\n';
        }
    return out.str();
}

void write_ber_csv(const std::string& path, const RunReport& report) {
    write_text_file(path, ber_to_csv(report));
}

std::string run_report_to_json(const RunReport& report) {
    nlohmann::json j;
    const ValidatedConfig& cfg = report.cfg;
    j["config"] = {{"n", cfg.n},
                   {"m", cfg.m},
                   {"nt", cfg.n_t},
                   {"nr", cfg.n_r},
                   {"tc", cfg.t_c},
                   {"q", cfg.q},
                   {"v", cfg.v},
                   {"u", cfg.u},
                   {"p", cfg.p},
                   {"delta_f_hz", cfg.delta_f_hz},
                   {"f_c_hz", cfg.f_c_hz},
                   {"scheme", to_string(cfg.scheme)},
                   {"l_max", cfg.l_max},
                   {"k_max", cfg.k_max},
                   {"constellation", to_string(cfg.constellation)},
                   {"m_d", cfg.m_d},
                   {"g", cfg.g},
                   {"total_bits", cfg.total_bits},
                   {"rate", cfg.rate}};
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(report.config_hash));
    j["config_hash"] = hash_hex;
    j["dm_seed"] = report.dm_seed;
    j["seed"] = report.seed;
    j["wall_seconds"] = report.wall_seconds;
    j["total_candidates"] = report.total_candidates;
    j["total_dap_evaluations"] = report.total_dap_evaluations;
    j["detectors"] = nlohmann::json::array();
    for (size_t d = 0; d < report.detectors.size(); ++d) {
        nlohmann::json detector;
        detector["label"] = report.detectors[d].label;
        detector["solve_failures"] = report.solve_failures[d];
        detector["points"] = nlohmann::json::array();
        for (const BerPoint& point : report.points[d])
            detector["points"].push_back({{"snr_db", point.snr_db},
                                          {"trials", point.trials},
                                          {"bit_errors", point.bit_errors},
                                          {"frame_errors", point.frame_errors},
                                          {"ber", point.ber}});
        j["detectors"].push_back(std::move(detector));
    }
    return j.dump(2) + "\n";
}

void write_run_report_json(const std::string& path, const RunReport& report) {
    write_text_file(path, run_report_to_json(report));
}

void write_channel_dump(const std::string& path, const PathProfile& profile) {
    std::ostringstream out;
    for (int user = 0; user < profile.users; ++user)
        for (int rx = 0; rx < profile.n_r; ++rx)
            for (int tx = 0; tx < profile.n_t; ++tx)
                for (int i = 0; i < profile.paths; ++i) {
                    const auto gain = profile.gain(user, rx, tx, i);
                    out << user << ' ' << rx << ' ' << tx << ' ' << profile.delay[i] << ' '
                        << profile.doppler[i] << ' ' << fmt17(gain.real()) << ' '
                        << fmt17(gain.imag()) << '\n';
                }
    write_text_file(path, out.str());
}

PathProfile read_channel_dump(const std::string& path) {
    std::istringstream in(read_text_file(path));
    struct Row {
        int user, rx, tx, delay, doppler;
        std::complex<double> gain;
    };
    std::vector<Row> rows;
    Row row;
    double re, im;
    while (in >> row.user >> row.rx >> row.tx >> row.delay >> row.doppler >> re >> im) {
        row.gain = {re, im};
        rows.push_back(row);
    }
    if (rows.empty()) fail(ErrorKind::BadConfigFile, path + ": empty channel dump");

    PathProfile profile;
    for (const Row& r : rows) {
        profile.users = std::max(profile.users, r.user + 1);
        profile.n_r = std::max(profile.n_r, r.rx + 1);
        profile.n_t = std::max(profile.n_t, r.tx + 1);
    }
    // path list comes from the (u, rx, tx) = (0, 0, 0) rows, in file order
    for (const Row& r : rows)
        if (r.user == 0 && r.rx == 0 && r.tx == 0) {
            profile.delay.push_back(r.delay);
            profile.doppler.push_back(r.doppler);
        }
    profile.paths = static_cast<int>(profile.delay.size());
    const size_t expected =
        static_cast<size_t>(profile.users) * profile.n_r * profile.n_t * profile.paths;
    if (rows.size() != expected)
        fail(ErrorKind::BadConfigFile, path + ": inconsistent channel dump shape");
    profile.gains.resize(expected);
    size_t cursor = 0;
    for (int user = 0; user < profile.users; ++user)
        for (int rx = 0; rx < profile.n_r; ++rx)
            for (int tx = 0; tx < profile.n_t; ++tx)
                for (int i = 0; i < profile.paths; ++i) {
                    const Row& r = rows.at(cursor++);
                    if (r.user != user || r.rx != rx || r.tx != tx || r.delay != profile.delay[i] ||
                        r.doppler != profile.doppler[i])
                        fail(ErrorKind::BadConfigFile, path + ": rows out of order");
                    profile.gain(user, rx, tx, i) = r.gain;
                }
    return profile;
}

std::vector<double> parse_snr_grid(const std::string& text) {
    double start = 0, step = 0, stop = 0;
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
    try {
        if (second == std::string::npos) {
            // a single SNR point
            size_t pos = 0;
            start = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument(text);
            return {start};
        }
        start = std::stod(text.substr(0, first));
        step = std::stod(text.substr(first + 1, second - first - 1));
        stop = std::stod(text.substr(second + 1));
    } catch (const std::exception&) {
        fail(ErrorKind::InvalidParameter, "bad SNR grid '" + text + "', expected start:step:stop");
    }
    if (step <= 0 || stop < start)
        fail(ErrorKind::InvalidParameter, "SNR grid needs step > 0 and stop >= start");
    std::vector<double> grid;
    const int count = static_cast<int>(std::floor((stop - start) / step + 0.5)) + 1;
    for (int i = 0; i < count; ++i) grid.push_back(start + i * step);
    return grid;
}

} // namespace stskotfs
