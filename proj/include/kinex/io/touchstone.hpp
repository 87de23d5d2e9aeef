#pragma once

#include <string>
#include <vector>

#include "kinex/sweep.hpp"

namespace kinex::io {

enum class TouchstoneFormat { ri, ma, db };

TouchstoneFormat touchstone_format_from_string(const std::string& s);
std::string to_string(TouchstoneFormat f);

/// Parses a Touchstone v1 two-port file. A "! bias_uA=.. temp_K=.. field_T=.."
/// comment opens a new record; files without one yield a single record at zero
/// bias and a warning.
std::vector<SweepRecord> read_touchstone(const std::string& path,
                                         std::vector<std::string>* warnings = nullptr);
std::vector<SweepRecord> parse_touchstone(const std::string& text,
                                          std::vector<std::string>* warnings = nullptr);

/// Writes one or more records; frequencies in GHz, values at 17 significant digits.
void write_touchstone(const std::string& path, const std::vector<SweepRecord>& records,
                      TouchstoneFormat fmt = TouchstoneFormat::ri, double z_ref = 50.0);
std::string format_touchstone(const std::vector<SweepRecord>& records, TouchstoneFormat fmt,
                              double z_ref = 50.0);

/// "sweep_I<uA>_T<K>_B<T>.s2p"
std::string sweep_filename(const BiasPoint& b);

/// One file per record under `dir` (created if missing). Returns the paths written.
std::vector<std::string> write_sweep_directory(const std::string& dir,
                                               const std::vector<SweepRecord>& records,
                                               TouchstoneFormat fmt = TouchstoneFormat::ri);

/// Every .s2p file under `dir`, or the single file when `path` is a file; records sorted by bias.
std::vector<SweepRecord> read_sweeps(const std::string& path,
                                     std::vector<std::string>* warnings = nullptr);

}  // namespace kinex::io
