#include "stskotfs/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stskotfs/errors.hpp"

namespace stskotfs {

namespace {

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

int int_log2(int x) {
    int bits = 0;
    while ((1 << bits) < x) ++bits;
    return bits;
}

} // namespace

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonPowerOfTwo: return "NonPowerOfTwo";
        case ErrorKind::IndivisibleUsers: return "IndivisibleUsers";
        case ErrorKind::DelayDopplerOutOfRange: return "DelayDopplerOutOfRange";
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::EmptyErrorSpace: return "EmptyErrorSpace";
        case ErrorKind::TooManyPaths: return "TooManyPaths";
        case ErrorKind::CodebookTooLarge: return "CodebookTooLarge";
        case ErrorKind::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
        case ErrorKind::SolveFailure: return "SolveFailure";
        case ErrorKind::InvalidDapIndex: return "InvalidDapIndex";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::IncompatibleBase: return "IncompatibleBase";
        case ErrorKind::NonHermitianInput: return "NonHermitianInput";
        case ErrorKind::BadConfigFile: return "BadConfigFile";
        case ErrorKind::IoFailure: return "IoFailure";
    }
    return "UnknownError";
}

ValidatedConfig validate_config(const SystemConfig& raw) {
    for (auto [value, name] : {std::pair{raw.n, "n"}, {raw.m, "m"}, {raw.n_t, "nt"},
                               {raw.n_r, "nr"}, {raw.t_c, "tc"}, {raw.u, "u"}, {raw.p, "p"}}) {
        if (value < 1) fail(ErrorKind::InvalidParameter, std::string(name) + " must be positive");
    }
    if (raw.q < 1 || !is_power_of_two(raw.q))
        fail(ErrorKind::NonPowerOfTwo, "q must be a power of two >= 1, got " + std::to_string(raw.q));
    if (raw.v < 2 || !is_power_of_two(raw.v))
        fail(ErrorKind::NonPowerOfTwo, "v must be a power of two >= 2, got " + std::to_string(raw.v));
    if (raw.m % raw.u != 0)
        fail(ErrorKind::IndivisibleUsers,
             "m = " + std::to_string(raw.m) + " not divisible by u = " + std::to_string(raw.u));
    if (raw.scheme == AllocationScheme::DopplerScheme2 && raw.n % raw.u != 0)
        fail(ErrorKind::IndivisibleUsers,
             "scheme 2 needs n divisible by u; n = " + std::to_string(raw.n) +
                 ", u = " + std::to_string(raw.u));
    if (raw.delta_f_hz <= 0 || raw.f_c_hz <= 0)
        fail(ErrorKind::InvalidParameter, "delta_f_hz and f_c_hz must be positive");

    ValidatedConfig cfg;
    cfg.n = raw.n;
    cfg.m = raw.m;
    cfg.n_t = raw.n_t;
    cfg.n_r = raw.n_r;
    cfg.t_c = raw.t_c;
    cfg.q = raw.q;
    cfg.v = raw.v;
    cfg.u = raw.u;
    cfg.p = raw.p;
    cfg.delta_f_hz = raw.delta_f_hz;
    cfg.f_c_hz = raw.f_c_hz;
    cfg.scheme = raw.scheme;
    cfg.constellation = raw.constellation;
    cfg.l_max = raw.l_max < 0 ? raw.m - 1 : raw.l_max;
    cfg.k_max = raw.k_max < 0 ? raw.n - 1 : raw.k_max;
    if (cfg.l_max > raw.m - 1 || cfg.k_max > raw.n - 1)
        fail(ErrorKind::DelayDopplerOutOfRange,
             "need l_max <= m-1 and k_max <= n-1; got l_max = " + std::to_string(cfg.l_max) +
                 ", k_max = " + std::to_string(cfg.k_max));

    cfg.m_d = cfg.n * cfg.m;
    cfg.g = cfg.m_d / cfg.u;
    cfg.j_cols = cfg.m / cfg.u;
    cfg.l1 = int_log2(cfg.q);
    cfg.l2 = int_log2(cfg.v);
    cfg.l_b = cfg.l1 + cfg.l2;
    cfg.total_bits = cfg.m_d * cfg.l_b;
    cfg.rate = static_cast<double>(cfg.l_b) / cfg.t_c;
    return cfg;
}

std::string ValidatedConfig::canonical_string() const {
    std::ostringstream out;
    out << "n=" << n << ";m=" << m << ";nt=" << n_t << ";nr=" << n_r << ";tc=" << t_c
        << ";q=" << q << ";v=" << v << ";u=" << u << ";p=" << p;
    char buf[96];
    std::snprintf(buf, sizeof(buf), ";delta_f_hz=%.17g;f_c_hz=%.17g", delta_f_hz, f_c_hz);
    out << buf << ";scheme=" << to_string(scheme) << ";l_max=" << l_max << ";k_max=" << k_max
        << ";constellation=" << to_string(constellation);
    return out.str();
}

std::uint64_t ValidatedConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_string()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

int Constellation::nearest(std::complex<double> z) const {
    int best = 0;
    double best_dist = std::norm(z - points[0]);
    for (int i = 1; i < static_cast<int>(points.size()); ++i) {
        const double d = std::norm(z - points[i]);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

namespace {

// Gray-labeled PSK: angular position p carries label p ^ (p >> 1), so the
// label of position p is recovered by the Gray inverse. QPSK is rotated by
// pi/4 so the points are (+-1 +-j)/sqrt(2).
Constellation build_psk(int order) {
    Constellation c;
    c.kind = ConstellationKind::PSK;
    c.points.resize(order);
    const double offset = order == 4 ? M_PI / 4.0 : 0.0;
    for (int label = 0; label < order; ++label) {
        int position = label;
        for (int shift = 1; shift < order; shift <<= 1) position ^= position >> shift;
        const double angle = 2.0 * M_PI * position / order + offset;
        c.points[label] = {std::cos(angle), std::sin(angle)};
    }
    if (order == 2) c.points = {{1.0, 0.0}, {-1.0, 0.0}}; // exact BPSK
    return c;
}

// Square QAM with per-axis Gray labels. Axis levels for 2 bits follow the
// Gray order 00->-3, 01->-1, 11->+1, 10->+3 before normalization.
Constellation build_qam(int order) {
    const int side = static_cast<int>(std::lround(std::sqrt(double(order))));
    if (side * side != order)
        fail(ErrorKind::UnsupportedOrder, "QAM needs a square order, got " + std::to_string(order));
    const int bits_per_axis = [&] {
        int b = 0;
        while ((1 << b) < side) ++b;
        return b;
    }();

    std::vector<double> level_of_gray(side);
    for (int gray = 0; gray < side; ++gray) {
        // invert Gray to recover the position along the axis
        int pos = gray;
        for (int shift = 1; shift < side; shift <<= 1) pos ^= pos >> shift;
        level_of_gray[gray] = -(side - 1) + 2.0 * pos;
    }

    Constellation c;
    c.kind = ConstellationKind::QAM;
    c.points.resize(order);
    double energy = 0.0;
    for (int label = 0; label < order; ++label) {
        const int label_i = label >> bits_per_axis;
        const int label_q = label & (side - 1);
        const std::complex<double> point{level_of_gray[label_i], level_of_gray[label_q]};
        c.points[label] = point;
        energy += std::norm(point);
    }
    const double scale = std::sqrt(energy / order);
    for (auto& point : c.points) point /= scale;
    return c;
}

} // namespace

Constellation build_constellation(int order, ConstellationKind kind) {
    if (order < 2 || (order & (order - 1)) != 0)
        fail(ErrorKind::UnsupportedOrder, "order must be a power of two >= 2");
    Constellation c = kind == ConstellationKind::PSK ? build_psk(order) : build_qam(order);

    double energy = 0.0;
    for (auto point : c.points) energy += std::norm(point);
    if (std::abs(energy / order - 1.0) > 1e-12)
        fail(ErrorKind::UnsupportedOrder, "constellation normalization failed");

    c.min_distance = 1e300;
    for (size_t i = 0; i < c.points.size(); ++i)
        for (size_t j = i + 1; j < c.points.size(); ++j)
            c.min_distance = std::min(c.min_distance, std::abs(c.points[i] - c.points[j]));
    if (c.min_distance <= 0)
        fail(ErrorKind::UnsupportedOrder, "constellation points not distinct");
    return c;
}

std::string to_string(AllocationScheme scheme) {
    return scheme == AllocationScheme::DelayScheme1 ? "1" : "2";
}

std::string to_string(ConstellationKind kind) {
    return kind == ConstellationKind::PSK ? "psk" : "qam";
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& value, const std::string& key, const std::string& origin) {
    try {
        size_t pos = 0;
        const int parsed = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        fail(ErrorKind::BadConfigFile, origin + ": bad integer for key '" + key + "': " + value);
    }
}

double parse_double(const std::string& value, const std::string& key, const std::string& origin) {
    try {
        size_t pos = 0;
        const double parsed = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        fail(ErrorKind::BadConfigFile, origin + ": bad number for key '" + key + "': " + value);
    }
}

} // namespace

SystemConfig parse_config_text(const std::string& text, const std::string& origin) {
    SystemConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(line_no);
        if (eq == std::string::npos)
            fail(ErrorKind::BadConfigFile, where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) fail(ErrorKind::BadConfigFile, where + ": empty value for '" + key + "'");

        if (key == "n") cfg.n = parse_int(value, key, where);
        else if (key == "m") cfg.m = parse_int(value, key, where);
        else if (key == "nt") cfg.n_t = parse_int(value, key, where);
        else if (key == "nr") cfg.n_r = parse_int(value, key, where);
        else if (key == "tc") cfg.t_c = parse_int(value, key, where);
        else if (key == "q") cfg.q = parse_int(value, key, where);
        else if (key == "v") cfg.v = parse_int(value, key, where);
        else if (key == "u") cfg.u = parse_int(value, key, where);
        else if (key == "p") cfg.p = parse_int(value, key, where);
        else if (key == "delta_f_hz") cfg.delta_f_hz = parse_double(value, key, where);
        else if (key == "f_c_hz") cfg.f_c_hz = parse_double(value, key, where);
        else if (key == "l_max") cfg.l_max = parse_int(value, key, where);
        else if (key == "k_max") cfg.k_max = parse_int(value, key, where);
        else if (key == "scheme") {
            if (value == "1") cfg.scheme = AllocationScheme::DelayScheme1;
            else if (value == "2") cfg.scheme = AllocationScheme::DopplerScheme2;
            else fail(ErrorKind::BadConfigFile, where + ": scheme must be 1 or 2, got " + value);
        } else if (key == "constellation") {
            if (value == "psk") cfg.constellation = ConstellationKind::PSK;
            else if (value == "qam") cfg.constellation = ConstellationKind::QAM;
            else fail(ErrorKind::BadConfigFile, where + ": constellation must be psk or qam");
        } else {
            fail(ErrorKind::BadConfigFile, where + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

SystemConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoFailure, "cannot open config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

} // namespace stskotfs
