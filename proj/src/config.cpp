#include "lexwalk/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "lexwalk/error.hpp"
#include "lexwalk/io.hpp"

namespace lexwalk::config {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string &field, const std::string &why) {
  throw Error(Errc::ValidationError, "field '" + field + "': " + why);
}

double number_field(const json &j, const std::string &field) {
  if (!j.is_number()) invalid(field, "expected a number");
  return j.get<double>();
}

std::int64_t integer_field(const json &j, const std::string &field) {
  if (!j.is_number_integer()) invalid(field, "expected an integer");
  return j.get<std::int64_t>();
}

double parse_number(std::string_view text, const std::string &what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(Errc::ValidationError, what + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

TopPolicy parse_top(std::string_view text) {
  if (text == "flow") return TopPolicy::FlowPreserving;
  if (text == "reflect") return TopPolicy::HardReflect;
  throw Error(Errc::ValidationError, "field 'top': expected 'flow' or 'reflect'");
}

BottomPolicy parse_bottom(std::string_view text) {
  if (text == "absorb") return Absorbing{};
  constexpr std::string_view prefix = "revive:";
  if (text.starts_with(prefix)) {
    const double n0 = parse_number(text.substr(prefix.size()), "field 'bottom'");
    if (!(n0 >= 1.0) || !std::isfinite(n0)) {
      throw Error(Errc::ValidationError, "field 'bottom': revival occupancy n0 must be >= 1");
    }
    return FiniteRevival{n0};
  }
  throw Error(Errc::ValidationError, "field 'bottom': expected 'absorb' or 'revive:<n0>'");
}

std::string format_bottom(const BottomPolicy &bottom) {
  if (const auto *r = std::get_if<FiniteRevival>(&bottom)) {
    return "revive:" + io::format_double(r->zone_zero_occupancy);
  }
  return "absorb";
}

empirical::Warp parse_warp(std::string_view text) {
  empirical::Warp warp;
  for (const auto &item : io::split_csv_line(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(Errc::ValidationError, "warp: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const double v = parse_number(std::string_view(item).substr(eq + 1), "warp " + key);
    if (key == "factor") {
      if (!(v > 0.0)) throw Error(Errc::ValidationError, "warp factor must be positive");
      warp.rate_factor = v;
    } else if (key == "break") {
      warp.breakpoint_year = static_cast<int>(v);
    } else if (key == "ref") {
      warp.reference_year = static_cast<int>(v);
    } else {
      throw Error(Errc::ValidationError, "warp: unknown key '" + key + "'");
    }
  }
  return warp;
}

RunConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < json_text.size(); ++i) line += json_text[i] == '\n';
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::ParseError, "line 1: config must be a JSON object");

  static const std::set<std::string> known = {"occupancies", "profile_file", "generator", "top",
                                              "bottom",      "seed",         "horizon",   "years_per_tick",
                                              "warp",        "corrected_20c", "out"};
  for (const auto &[key, value] : j.items()) {
    if (!known.contains(key)) invalid(key, "unknown field");
  }

  const int sources = static_cast<int>(j.contains("occupancies")) + static_cast<int>(j.contains("profile_file")) +
                      static_cast<int>(j.contains("generator"));
  if (sources != 1) {
    invalid("occupancies|profile_file|generator", "exactly one profile source is required");
  }

  RunConfig c;
  if (j.contains("occupancies")) {
    const auto &a = j["occupancies"];
    if (!a.is_array()) invalid("occupancies", "expected an array of numbers");
    InlineProfile p;
    for (const auto &v : a) p.occupancies.push_back(number_field(v, "occupancies"));
    c.profile = std::move(p);
  } else if (j.contains("profile_file")) {
    if (!j["profile_file"].is_string()) invalid("profile_file", "expected a path string");
    ProfileFile f{j["profile_file"].get<std::string>()};
    if (!std::filesystem::exists(f.path)) invalid("profile_file", "file does not exist: " + f.path.string());
    c.profile = std::move(f);
  } else {
    const auto &g = j["generator"];
    if (!g.is_object()) invalid("generator", "expected an object {words, meanings, max_level}");
    for (const auto &[key, value] : g.items()) {
      if (key != "words" && key != "meanings" && key != "max_level") invalid("generator." + key, "unknown field");
    }
    if (!g.contains("words") || !g.contains("meanings")) invalid("generator", "needs 'words' and 'meanings'");
    GeneratorSpec gen;
    gen.words = number_field(g["words"], "generator.words");
    gen.meanings = number_field(g["meanings"], "generator.meanings");
    if (g.contains("max_level")) gen.max_level = static_cast<int>(integer_field(g["max_level"], "generator.max_level"));
    c.profile = gen;
  }

  if (j.contains("top")) {
    if (!j["top"].is_string()) invalid("top", "expected a string");
    c.boundary.top = parse_top(j["top"].get<std::string>());
  }
  if (j.contains("bottom")) {
    if (!j["bottom"].is_string()) invalid("bottom", "expected a string");
    c.boundary.bottom = parse_bottom(j["bottom"].get<std::string>());
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) invalid("seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("horizon") && !j["horizon"].is_null()) {
    c.horizon = integer_field(j["horizon"], "horizon");
    if (*c.horizon < 1) invalid("horizon", "must be >= 1");
  }
  if (j.contains("years_per_tick") && !j["years_per_tick"].is_null()) {
    c.years_per_tick = number_field(j["years_per_tick"], "years_per_tick");
    if (!(*c.years_per_tick > 0.0)) invalid("years_per_tick", "must be positive");
  }
  if (j.contains("warp") && !j["warp"].is_null()) {
    const auto &w = j["warp"];
    if (!w.is_object()) invalid("warp", "expected an object {factor, break, ref}");
    empirical::Warp warp;
    for (const auto &[key, value] : w.items()) {
      if (key == "factor") warp.rate_factor = number_field(value, "warp.factor");
      else if (key == "break") warp.breakpoint_year = static_cast<int>(integer_field(value, "warp.break"));
      else if (key == "ref") warp.reference_year = static_cast<int>(integer_field(value, "warp.ref"));
      else invalid("warp." + key, "unknown field");
    }
    if (!(warp.rate_factor > 0.0)) invalid("warp.factor", "must be positive");
    c.warp = warp;
  }
  if (j.contains("corrected_20c")) {
    if (!j["corrected_20c"].is_boolean()) invalid("corrected_20c", "expected true or false");
    c.corrected_20c = j["corrected_20c"].get<bool>();
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) invalid("out", "expected a directory string");
    c.out_dir = j["out"].get<std::string>();
  }
  return c;
}

RunConfig load_config(const std::filesystem::path &path) {
  return parse_config(io::read_file(path));
}

json to_json(const RunConfig &c) {
  json j;
  if (const auto *p = std::get_if<InlineProfile>(&c.profile)) {
    j["occupancies"] = p->occupancies;
  } else if (const auto *f = std::get_if<ProfileFile>(&c.profile)) {
    j["profile_file"] = f->path.string();
  } else {
    const auto &g = std::get<GeneratorSpec>(c.profile);
    j["generator"] = {{"words", g.words}, {"meanings", g.meanings}, {"max_level", g.max_level}};
  }
  j["top"] = c.boundary.top == TopPolicy::FlowPreserving ? "flow" : "reflect";
  j["bottom"] = format_bottom(c.boundary.bottom);
  j["seed"] = c.seed;
  j["horizon"] = c.horizon ? json(*c.horizon) : json(nullptr);
  j["years_per_tick"] = c.years_per_tick ? json(*c.years_per_tick) : json(nullptr);
  if (c.warp) {
    j["warp"] = {{"factor", c.warp->rate_factor}, {"break", c.warp->breakpoint_year}, {"ref", c.warp->reference_year}};
  } else {
    j["warp"] = nullptr;
  }
  j["corrected_20c"] = c.corrected_20c;
  j["out"] = c.out_dir;
  return j;
}

std::string config_hash(const RunConfig &config) {
  // The output directory says where artifacts land, not what they contain.
  auto j = to_json(config);
  j.erase("out");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ZoneProfile resolve_profile(const RunConfig &config) {
  if (const auto *p = std::get_if<InlineProfile>(&config.profile)) return validate_profile(p->occupancies);
  if (const auto *f = std::get_if<ProfileFile>(&config.profile)) return validate_profile(io::read_profile_csv(f->path));
  const auto &g = std::get<GeneratorSpec>(config.profile);
  return generate_profile(g.words, g.meanings, g.max_level).profile;
}

std::int64_t resolved_horizon(const RunConfig &config, const ZoneProfile &profile) {
  if (config.horizon) return *config.horizon;
  // Absorb rounding in sum n_m so that e.g. N = 93000 gives exactly 930000.
  const double ticks = 10.0 * profile.total_words();
  return static_cast<std::int64_t>(std::ceil(ticks - 1e-9 * ticks));
}

}  // namespace lexwalk::config
