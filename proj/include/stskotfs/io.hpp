#pragma once

#include <string>
#include <vector>

#include "stskotfs/analysis.hpp"
#include "stskotfs/channel.hpp"
#include "stskotfs/dispersion.hpp"
#include "stskotfs/harness.hpp"

namespace stskotfs {

/// Dispersion-set file: header "Q N_t T_c seed", then Q*N_t*T_c lines of
/// "re im" in row-major order per matrix, 17 significant digits (doubles
/// round-trip exactly).
void write_dm_set(const std::string& path, const DispersionMatrixSet& set);
DispersionMatrixSet read_dm_set(const std::string& path);
std::string dm_set_to_text(const DispersionMatrixSet& set);
DispersionMatrixSet dm_set_from_text(const std::string& text, const std::string& origin);

/// Curve CSV: "# meta: ..." line carrying the reproduction seeds, then
/// header snr_db,value,stderr,kind.
void write_curve_csv(const std::string& path, const Curve& curve);
std::string curve_to_csv(const Curve& curve);

/// BER CSV: header snr_db,detector,trials,bit_errors,ber; one row per
/// (SNR point, detector), SNR-major.
void write_ber_csv(const std::string& path, const RunReport& report);
std::string ber_to_csv(const RunReport& report);

/// JSON sidecar with the config snapshot, seeds, per-point data, counters and
/// wall clock (the only non-deterministic field).
void write_run_report_json(const std::string& path, const RunReport& report);
std::string run_report_to_json(const RunReport& report);

/// Channel dump for reproducibility audits: one line per (user, rx, tx, path)
/// as "u nr nt l k re im".
void write_channel_dump(const std::string& path, const PathProfile& profile);
PathProfile read_channel_dump(const std::string& path);

/// "start:step:stop" in dB, inclusive of stop (within half a step).
std::vector<double> parse_snr_grid(const std::string& text);

} // namespace stskotfs
