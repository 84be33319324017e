#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lexwalk/empirical.hpp"
#include "lexwalk/profile.hpp"

namespace lexwalk::io {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Run metadata lines prepended to every artifact as `# key=value` comments.
struct ArtifactHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
};

std::string header_lines(const ArtifactHeader &header);

/// Writes `<path>.tmp` then renames it over `path`.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

std::string read_file(const std::filesystem::path &path);

/// CSV with header `level,occupancy`, levels 1..M contiguous. Lines starting
/// with '#' and blank lines are skipped.
std::vector<double> parse_profile_csv(std::string_view text);
std::vector<double> read_profile_csv(const std::filesystem::path &path);
std::string profile_csv(const ZoneProfile &profile);

/// `period,mean_age_years,word_count,words_per_century`; empty cell = unknown.
std::string table_csv(const empirical::EmpiricalAgeTable &table);
empirical::EmpiricalAgeTable parse_table_csv(std::string_view text);

/// Splits on ',' without quoting support (no field in these formats needs it).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace lexwalk::io
