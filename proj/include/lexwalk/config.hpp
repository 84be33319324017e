#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lexwalk/empirical.hpp"
#include "lexwalk/profile.hpp"

namespace lexwalk::config {

struct InlineProfile {
  std::vector<double> occupancies;
  bool operator==(const InlineProfile &) const = default;
};

struct ProfileFile {
  std::filesystem::path path;
  bool operator==(const ProfileFile &) const = default;
};

struct GeneratorSpec {
  double words = 0.0;
  double meanings = 0.0;
  int max_level = 10;
  bool operator==(const GeneratorSpec &) const = default;
};

using ProfileSource = std::variant<InlineProfile, ProfileFile, GeneratorSpec>;

/// Everything a run needs. JSON keys and defaults:
///   occupancies | profile_file | generator {words, meanings, max_level=10}  (exactly one)
///   top "flow" | "reflect"                       default "flow"
///   bottom "absorb" | "revive:<n0>"              default "absorb"
///   seed                                         default 0
///   horizon                                      default null = ceil(10 sum n_m)
///   years_per_tick                               default null (no calibration)
///   warp {factor, break, ref}                    default null
///   corrected_20c                                default true
///   out                                          default "."
struct RunConfig {
  ProfileSource profile;
  BoundaryPolicy boundary;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> horizon;
  std::optional<double> years_per_tick;
  std::optional<empirical::Warp> warp;
  bool corrected_20c = true;
  std::string out_dir = ".";
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path &path);

/// Effective configuration with every default spelled out.
nlohmann::json to_json(const RunConfig &config);

/// FNV-1a 64 of the compact effective-config JSON without `out`, as 16 hex digits.
std::string config_hash(const RunConfig &config);

TopPolicy parse_top(std::string_view text);
BottomPolicy parse_bottom(std::string_view text);
std::string format_bottom(const BottomPolicy &bottom);
empirical::Warp parse_warp(std::string_view text);

ZoneProfile resolve_profile(const RunConfig &config);
std::int64_t resolved_horizon(const RunConfig &config, const ZoneProfile &profile);

}  // namespace lexwalk::config
