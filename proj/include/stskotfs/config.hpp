#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace stskotfs {

enum class AllocationScheme {
    DelayScheme1,   // users own disjoint delay columns
    DopplerScheme2, // users own disjoint Doppler rows
};

enum class ConstellationKind { PSK, QAM };

/// Raw system parameters as read from a config file or built in code.
/// l_max / k_max < 0 selects the full valid range (M-1 resp. N-1).
struct SystemConfig {
    int n = 4;  ///< Doppler bins per subframe
    int m = 8;  ///< delay bins / subcarriers
    int n_t = 2;
    int n_r = 2;
    int t_c = 2; ///< OTFS time-slots per STSK symbol
    int q = 2;   ///< dispersion-matrix count
    int v = 2;   ///< constellation order
    int u = 1;   ///< users
    int p = 4;   ///< channel paths
    double delta_f_hz = 15e3;
    double f_c_hz = 4e9;
    AllocationScheme scheme = AllocationScheme::DelayScheme1;
    int l_max = -1;
    int k_max = -1;
    ConstellationKind constellation = ConstellationKind::PSK;
};

/// Parameters plus every derived dimensional constant. Immutable after
/// validation; safe to share across concurrent workers.
class ValidatedConfig {
public:
    int n = 0, m = 0, n_t = 0, n_r = 0, t_c = 0, q = 0, v = 0, u = 0, p = 0;
    double delta_f_hz = 0, f_c_hz = 0;
    AllocationScheme scheme = AllocationScheme::DelayScheme1;
    int l_max = 0, k_max = 0;
    ConstellationKind constellation = ConstellationKind::PSK;

    int m_d = 0;        ///< N*M resource blocks per OTFS frame
    int g = 0;          ///< RBs per user, M_d/U
    int j_cols = 0;     ///< delay columns per user, M/U
    int l1 = 0;         ///< log2 Q bits per block for the DM index
    int l2 = 0;         ///< log2 V bits per block for the APM symbol
    int l_b = 0;        ///< l1 + l2
    int total_bits = 0; ///< L = N*M*log2(V*Q), all users
    double rate = 0;    ///< log2(V*Q)/T_c in bit/s/Hz

    int st_dim() const { return g * n_t * t_c * u; } ///< ST mapper dimension
    int y_dim() const { return m_d * n_r * t_c; }    ///< stacked received length
    int k_dim() const { return q * m_d; }            ///< equivalent sparse vector length

    /// FNV-1a over the canonical parameter serialization.
    std::uint64_t hash() const;
    std::string canonical_string() const;

    /// Default-constructed instances are placeholders; real ones come from
    /// validate_config.
    ValidatedConfig() = default;
};

/// Checks all structural invariants and fills the derived constants.
/// Throws Error with kinds NonPowerOfTwo, IndivisibleUsers,
/// DelayDopplerOutOfRange or InvalidParameter.
ValidatedConfig validate_config(const SystemConfig& raw);

/// Unit-average-energy, Gray-labeled constellation. points[b] is the symbol
/// for bit label b, so adjacent labels differ in one bit where the geometry
/// allows it.
struct Constellation {
    ConstellationKind kind;
    std::vector<std::complex<double>> points;
    double min_distance; ///< minimum pairwise distance, used by demap margin tests

    /// Index of the nearest point; ties resolve to the lowest index.
    int nearest(std::complex<double> z) const;
};

Constellation build_constellation(int order, ConstellationKind kind);

/// Parses the flat `key = value` config format. Keys exactly:
/// n, m, nt, nr, tc, q, v, u, p, delta_f_hz, f_c_hz, scheme, l_max, k_max,
/// constellation. Unknown keys are errors; '#' starts a comment.
SystemConfig parse_config_file(const std::string& path);
SystemConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

std::string to_string(AllocationScheme scheme);
std::string to_string(ConstellationKind kind);

} // namespace stskotfs
