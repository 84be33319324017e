#include "lexwalk/cli.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexwalk/analytics.hpp"
#include "lexwalk/config.hpp"
#include "lexwalk/empirical.hpp"
#include "lexwalk/error.hpp"
#include "lexwalk/io.hpp"
#include "lexwalk/montecarlo.hpp"
#include "lexwalk/renewal.hpp"

namespace lexwalk::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPresetWords = 93000.0;
constexpr double kPresetMeanings = 138000.0;
constexpr double kPublishedPolysemyAsymptote = 1.80;
constexpr double kPublishedMeanAgeYears = 300.0;

// Flags shared by every subcommand. Presence is read from the option handles.
struct CommonFlags {
  std::string config_path;
  std::vector<double> occupancies;
  std::string profile_file;
  double words = 0.0;
  double meanings = 0.0;
  int max_level = 10;
  std::string top;
  std::string bottom;
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  std::string out;
  std::string warp;
  std::string corrected;
  double years_per_tick = 0.0;

  std::map<std::string, std::vector<CLI::Option *>> handles;

  bool given(const std::string &name) const {
    const auto it = handles.find(name);
    if (it == handles.end()) return false;
    for (const auto *o : it->second) {
      if (o->count() > 0) return true;
    }
    return false;
  }

  void attach(CLI::App *app) {
    auto add = [&](const std::string &name, CLI::Option *o) { handles[name].push_back(o); };
    add("config", app->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile));
    add("occupancies", app->add_option("--occupancies", occupancies, "inline zone profile n_1,...,n_M")->delimiter(','));
    add("profile-file", app->add_option("--profile-file", profile_file, "CSV profile with header level,occupancy"));
    add("words", app->add_option("--words", words, "total words N for the generated profile"));
    add("meanings", app->add_option("--meanings", meanings, "total meanings S for the generated profile"));
    add("max-level", app->add_option("--max-level", max_level, "top polysemy level M for the generated profile"));
    add("top", app->add_option("--top", top, "top boundary: flow | reflect"));
    add("bottom", app->add_option("--bottom", bottom, "bottom boundary: absorb | revive:<n0>"));
    add("seed", app->add_option("--seed", seed, "master seed (overrides the config seed)"));
    add("horizon", app->add_option("--horizon", horizon, "horizon in ticks (default 10 sum n_m)"));
    add("out", app->add_option("--out", out, "output directory"));
    add("warp", app->add_option("--warp", warp, "time warp factor=<k>,break=<year>,ref=<year>"));
    add("corrected-20c", app->add_option("--corrected-20c", corrected, "use 35000 for the 20th century: on | off"));
    add("years-per-tick", app->add_option("--years-per-tick", years_per_tick, "tick-to-year calibration"));
  }

  config::RunConfig resolve() const {
    config::RunConfig c;
    bool have_profile = false;
    if (given("config")) {
      c = config::load_config(config_path);
      have_profile = true;
    }
    const int sources = static_cast<int>(given("occupancies")) + static_cast<int>(given("profile-file")) +
                        static_cast<int>(given("words") || given("meanings"));
    if (sources > 1) {
      throw Error(Errc::ValidationError, "give exactly one of --occupancies, --profile-file, --words/--meanings");
    }
    if (given("occupancies")) {
      c.profile = config::InlineProfile{occupancies};
      have_profile = true;
    } else if (given("profile-file")) {
      if (!fs::exists(profile_file)) {
        throw Error(Errc::ValidationError, "field 'profile_file': file does not exist: " + profile_file);
      }
      c.profile = config::ProfileFile{profile_file};
      have_profile = true;
    } else if (given("words") || given("meanings")) {
      if (!given("words") || !given("meanings")) {
        throw Error(Errc::ValidationError, "--words and --meanings must be given together");
      }
      c.profile = config::GeneratorSpec{words, meanings, max_level};
      have_profile = true;
    } else if (auto *g = std::get_if<config::GeneratorSpec>(&c.profile); g && given("max-level")) {
      g->max_level = max_level;
    }
    if (!have_profile) {
      throw Error(Errc::ValidationError, "no profile source: use --occupancies, --profile-file, --words/--meanings or --config");
    }
    if (given("top")) c.boundary.top = config::parse_top(top);
    if (given("bottom")) c.boundary.bottom = config::parse_bottom(bottom);
    if (given("seed")) c.seed = seed;
    if (given("horizon")) {
      if (horizon < 1) throw Error(Errc::ValidationError, "field 'horizon': must be >= 1");
      c.horizon = horizon;
    }
    if (given("out")) c.out_dir = out;
    if (given("warp")) c.warp = config::parse_warp(warp);
    if (given("corrected-20c")) {
      if (corrected != "on" && corrected != "off") {
        throw Error(Errc::ValidationError, "field 'corrected_20c': expected on or off");
      }
      c.corrected_20c = corrected == "on";
    }
    if (given("years-per-tick")) {
      if (!(years_per_tick > 0.0)) throw Error(Errc::ValidationError, "field 'years_per_tick': must be positive");
      c.years_per_tick = years_per_tick;
    }
    return c;
  }
};

class Artifacts {
public:
  explicit Artifacts(const config::RunConfig &c) : dir_(c.out_dir), header_{config::config_hash(c), c.seed} {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::IoError, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void csv(const std::string &name, const std::string &body) const {
    io::write_file_atomic(dir_ / name, io::header_lines(header_) + body);
  }

  // JSON cannot carry comment lines; run metadata goes in a leading "_meta" key.
  void json_file(const std::string &name, json body) const {
    body["_meta"] = {{"tool", "lexwalk"},
                     {"version", std::string(io::kToolVersion)},
                     {"config_hash", header_.config_hash},
                     {"seed", header_.seed}};
    io::write_file_atomic(dir_ / name, body.dump(2) + "\n");
  }

  fs::path path(const std::string &name) const { return dir_ / name; }

private:
  fs::path dir_;
  io::ArtifactHeader header_;
};

using io::format_double;

std::string lifetime_csv(const DiscretePmf &pmf) {
  std::string s = "t,pmf,survival\n";
  s.reserve(pmf.masses.size() * 48);
  const auto survival = pmf.survival_curve();
  for (std::size_t i = 0; i < pmf.masses.size(); ++i) {
    s += std::to_string(pmf.support_start + static_cast<std::int64_t>(i));
    s += ',';
    s += format_double(pmf.masses[i]);
    s += ',';
    s += format_double(survival[i]);
    s += '\n';
  }
  return s;
}

// Lifetime density in characteristic units (ticks / sum n_m), averaged over
// bins of `width` units, with the fitted one- and two-geometric curves.
std::string lifetime_units_csv(const DiscretePmf &pmf, double unit, double width,
                               const empirical::GeometricMixtureFit *fit) {
  const auto ticks_per_bin = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(width * unit)));
  std::string s = fit ? "t_units,density,fit_two,fit_single\n" : "t_units,density\n";
  const auto n = static_cast<std::int64_t>(pmf.masses.size());
  auto geometric = [](double q, std::int64_t k) { return (1.0 - q) * std::pow(q, static_cast<double>(k)); };
  for (std::int64_t b = 0; b * ticks_per_bin < n; ++b) {
    const std::int64_t first = b * ticks_per_bin;
    const std::int64_t last = std::min(n, first + ticks_per_bin);
    double mass = 0.0, two = 0.0, single = 0.0;
    for (std::int64_t k = first; k < last; ++k) {
      mass += pmf.masses[static_cast<std::size_t>(k)];
      if (fit) {
        for (const auto &c : fit->components) two += c.weight * geometric(c.ratio, k);
        single += geometric(fit->single_ratio, k);
      }
    }
    const double bin_units = static_cast<double>(last - first) / unit;
    const double centre = (static_cast<double>(pmf.support_start + first) + 0.5 * static_cast<double>(last - first - 1)) / unit;
    s += format_double(centre) + "," + format_double(mass / bin_units);
    if (fit) s += "," + format_double(two / bin_units) + "," + format_double(single / bin_units);
    s += '\n';
  }
  return s;
}

std::string age_csv(const DiscretePmf &age, const std::optional<double> &years_per_tick) {
  std::string s = years_per_tick ? "age_ticks,age_years,pmf\n" : "age_ticks,pmf\n";
  s.reserve(age.masses.size() * 40);
  for (std::size_t i = 0; i < age.masses.size(); ++i) {
    const auto a = age.support_start + static_cast<std::int64_t>(i);
    s += std::to_string(a);
    if (years_per_tick) s += "," + format_double(static_cast<double>(a) * *years_per_tick);
    s += "," + format_double(age.masses[i]) + "\n";
  }
  return s;
}

std::string polysemy_csv(const std::vector<std::pair<std::int64_t, double>> &curve) {
  std::string s = "age,mean_polysemy\n";
  for (const auto &[a, m] : curve) s += std::to_string(a) + "," + format_double(m) + "\n";
  return s;
}

std::string qsd_csv(const analytics::LevelDistribution &d) {
  std::string s = "level,probability\n";
  for (std::size_t i = 0; i < d.probabilities.size(); ++i) {
    s += std::to_string(i + 1) + "," + format_double(d.probabilities[i]) + "\n";
  }
  return s;
}

std::string trajectory_csv(const montecarlo::Trajectory &t) {
  std::string s = "tick,level\n";
  s.reserve(t.levels.size() * 10);
  for (std::size_t i = 0; i < t.levels.size(); ++i) s += std::to_string(i) + "," + std::to_string(t.levels[i]) + "\n";
  return s;
}

std::string comparison_csv(const empirical::ComparisonReport &r) {
  std::string s = "age_years,model_density,empirical_density,ratio\n";
  for (const auto &p : r.points) {
    s += format_double(p.age_years) + "," + format_double(p.model_density) + "," +
         format_double(p.empirical_density) + "," + format_double(p.ratio) + "\n";
  }
  return s;
}

json fit_json(const empirical::GeometricMixtureFit &f) {
  return {{"w1", f.components[0].weight},  {"q1", f.components[0].ratio},
          {"w2", f.components[1].weight},  {"q2", f.components[1].ratio},
          {"residual", f.residual},        {"single_q", f.single_ratio},
          {"single_residual", f.single_residual}, {"converged", f.converged},
          {"starts", f.starts}};
}

json comparison_json(const empirical::ComparisonReport &r) {
  json points = json::array();
  for (const auto &p : r.points) {
    points.push_back({{"period", p.period},
                      {"age_years", p.age_years},
                      {"model_density", p.model_density},
                      {"empirical_density", p.empirical_density},
                      {"ratio", p.ratio},
                      {"raw_model_per_year", p.raw_model},
                      {"raw_empirical_per_century", p.raw_empirical}});
  }
  return {{"spearman", r.spearman}, {"l1_distance", r.l1_distance}, {"warped", r.warped}, {"points", points}};
}

json contrast_json(const std::vector<empirical::PointContrast> &contrast) {
  json out = json::array();
  for (const auto &c : contrast) {
    out.push_back({{"period", c.period},
                   {"age_years", c.age_years},
                   {"abs_log_ratio_plain", c.log_error_plain},
                   {"abs_log_ratio_warped", c.log_error_warped},
                   {"improved", c.improved}});
  }
  return out;
}

TransitionKernel kernel_for(const config::RunConfig &c) {
  return build_kernel(config::resolve_profile(c), c.boundary);
}

// An explicit horizon is honoured as given; the default one is extended
// until the lifetime tail is light enough for renewal and fitting.
DiscretePmf light_tail_lifetime(const config::RunConfig &c, const TransitionKernel &kernel) {
  const auto horizon = config::resolved_horizon(c, kernel.profile());
  if (c.horizon) return analytics::lifetime_pmf(kernel, horizon);
  return analytics::lifetime_pmf_light_tail(kernel, horizon, renewal::kMaxTailMass, 64 * horizon);
}

std::vector<std::int64_t> even_ages(std::int64_t max_age, std::int64_t points) {
  std::vector<std::int64_t> ages;
  for (std::int64_t i = 0; i < points; ++i) {
    const auto a = static_cast<std::int64_t>(std::llround(static_cast<double>(max_age) * static_cast<double>(i) /
                                                         static_cast<double>(points - 1)));
    if (ages.empty() || ages.back() != a) ages.push_back(a);
  }
  return ages;
}

struct PresetOptions {
  double window_half_width = 0.1;
  std::int64_t max_attempts = 100000;
};

int run_preset(config::RunConfig c, int max_level, const PresetOptions &opts, std::ostream &out) {
  c.profile = config::GeneratorSpec{kPresetWords, kPresetMeanings, max_level};
  c.corrected_20c = true;
  if (!c.warp) c.warp = empirical::Warp{};
  const Artifacts art(c);

  const auto generated = generate_profile(kPresetWords, kPresetMeanings, max_level);
  const ZoneProfile &profile = generated.profile;
  const auto kernel = build_kernel(profile, c.boundary);
  const auto horizon = config::resolved_horizon(c, profile);
  const double unit = profile.total_words();

  const auto lifetime = analytics::lifetime_pmf(kernel, horizon);
  const double mean_life = analytics::mean_lifetime(kernel);
  const auto long_lifetime =
      analytics::lifetime_pmf_light_tail(kernel, horizon, renewal::kMaxTailMass, 64 * horizon);
  const auto fit = empirical::fit_two_geometrics(long_lifetime);

  const auto qsd = analytics::quasi_stationary(kernel);
  const auto ages = even_ages(horizon, 1001);
  const auto curve = analytics::mean_polysemy_vs_age(kernel, ages);

  const auto age_pmf = renewal::equilibrium_age_pmf(long_lifetime);
  const double mean_age_ticks = renewal::mean_age(age_pmf);

  const auto table = empirical::builtin_table(true);
  const auto emp = empirical::empirical_mean_age(table);
  const auto calibration = empirical::calibrate(mean_age_ticks, emp.mean_years);
  auto warped_calibration = empirical::calibrate(mean_age_ticks, empirical::warped_mean_age(table, *c.warp));
  warped_calibration.warp = c.warp;
  const auto plain = empirical::compare_age_distribution(age_pmf, calibration, table);
  const auto warped = empirical::compare_age_distribution(age_pmf, warped_calibration, table);
  const auto contrast = empirical::warp_contrast(plain, warped);

  json trajectories = json::array();
  for (int units = 1; units <= 3; ++units) {
    const montecarlo::LifetimeWindow window{units - opts.window_half_width, units + opts.window_half_width};
    montecarlo::SelectionOptions sel;
    sel.max_attempts = opts.max_attempts;
    const auto picked = montecarlo::select_trajectories(kernel, c.seed, 1, window, sel);
    const auto &t = picked.front();
    const std::string name = "trajectory_" + std::to_string(units) + "u.csv";
    art.csv(name, trajectory_csv(t));
    int peak = 0;
    for (int l : t.levels) peak = std::max(peak, l);
    trajectories.push_back({{"file", name},
                            {"index", t.index},
                            {"seed", t.seed},
                            {"lifetime_ticks", *t.absorbed_at},
                            {"lifetime_units", static_cast<double>(*t.absorbed_at) / unit},
                            {"peak_level", peak}});
  }

  art.csv("profile.csv", io::profile_csv(profile));
  art.csv("lifetime.csv", lifetime_csv(lifetime));
  art.csv("lifetime_units.csv", lifetime_units_csv(long_lifetime, unit, 0.01, &fit));
  art.csv("qsd.csv", qsd_csv(qsd.distribution));
  art.csv("polysemy_age.csv", polysemy_csv(curve));
  art.csv("age.csv", age_csv(age_pmf, calibration.years_per_tick));
  art.csv("table.csv", io::table_csv(table));
  art.csv("comparison.csv", comparison_csv(plain));
  art.csv("comparison_warp.csv", comparison_csv(warped));
  art.json_file("fit.json", fit_json(fit));

  const double qsd_mean = qsd.distribution.mean_level();
  const auto find_contrast = [&](const std::string &period) -> json {
    for (const auto &x : contrast) {
      if (x.period == period) return x.improved;
    }
    return nullptr;
  };
  json summary = {
      {"profile",
       {{"max_level", profile.max_level()},
        {"requested_max_level", generated.requested_max_level},
        {"ratio", generated.ratio},
        {"total_words", profile.total_words()},
        {"total_meanings", profile.total_meanings()},
        {"mean_polysemy", profile.mean_polysemy()}}},
      {"lifetime",
       {{"horizon", horizon},
        {"tail_mass", lifetime.tail_mass},
        {"extended_horizon", long_lifetime.support_end()},
        {"extended_tail_mass", long_lifetime.tail_mass},
        {"mean_ticks", mean_life},
        {"mean_over_total_words", mean_life / unit}}},
      {"fit", fit_json(fit)},
      {"quasi_stationary",
       {{"mean_polysemy", qsd_mean},
        {"perron_value", qsd.perron_value},
        {"iterations", qsd.iterations},
        {"published_asymptote", kPublishedPolysemyAsymptote},
        {"deviation_from_published", qsd_mean - kPublishedPolysemyAsymptote},
        {"curve_end_age", curve.back().first},
        {"curve_end_value", curve.back().second}}},
      {"age",
       {{"mean_ticks", mean_age_ticks},
        {"mean_ticks_from_moments", renewal::mean_age_from_lifetime_moments(long_lifetime)},
        {"years_per_tick", calibration.years_per_tick},
        {"warped_years_per_tick", warped_calibration.years_per_tick}}},
      {"empirical",
       {{"total_words", emp.total_words},
        {"mean_age_years", emp.mean_years},
        {"published_mean_age_years", kPublishedMeanAgeYears},
        {"relative_gap_to_published", (kPublishedMeanAgeYears - emp.mean_years) / kPublishedMeanAgeYears}}},
      {"comparison", comparison_json(plain)},
      {"comparison_warp", comparison_json(warped)},
      {"warp",
       {{"factor", c.warp->rate_factor},
        {"break", c.warp->breakpoint_year},
        {"ref", c.warp->reference_year},
        {"points", contrast_json(contrast)},
        {"improves_20th_century", find_contrast("20th c.")},
        {"worsens_7th_14th_century", [&]() -> json {
           const auto v = find_contrast("7th-14th c.");
           return v.is_boolean() ? json(!v.get<bool>()) : json(nullptr);
         }()}}},
      {"trajectories", trajectories},
  };
  art.json_file("summary.json", summary);

  out << "preset-93k: M=" << profile.max_level() << " mean_lifetime=" << format_double(mean_life)
      << " qsd_mean=" << format_double(qsd_mean) << " mean_age_years=" << format_double(emp.mean_years)
      << " spearman=" << format_double(plain.spearman) << " fit_residual=" << format_double(fit.residual)
      << " single_residual=" << format_double(fit.single_residual) << " -> " << art.path("summary.json").string()
      << "\n";
  return 0;
}

json error_json(std::string_view name, const std::string &message) {
  return {{"error", name}, {"message", message}};
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Word life-cycle random walk over polysemy zones", "lexwalk"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto *profile_cmd = app.add_subcommand("profile", "validate or generate a zone profile");
  auto *lifetime_cmd = app.add_subcommand("lifetime", "lifetime pmf of a word");
  double rebin = 0.0;
  auto *rebin_opt = lifetime_cmd->add_option("--rebin", rebin, "also write density averaged over bins of this many characteristic units");
  auto *age_cmd = app.add_subcommand("age-dist", "equilibrium age distribution");
  auto *poly_cmd = app.add_subcommand("polysemy-age", "mean polysemy as a function of age");
  std::vector<std::int64_t> ages;
  std::int64_t points = 101;
  poly_cmd->add_option("--ages", ages, "explicit ages")->delimiter(',');
  poly_cmd->add_option("--points", points, "evenly spaced ages from 0 to the horizon")->check(CLI::Range(2, 1000000));
  auto *qsd_cmd = app.add_subcommand("qsd", "quasi-stationary level distribution");
  analytics::PowerIterationOptions power;
  qsd_cmd->add_option("--tol", power.tolerance, "total-variation tolerance");
  qsd_cmd->add_option("--max-iter", power.max_iterations, "iteration cap");
  auto *agl_cmd = app.add_subcommand("age-given-level", "age distribution of words at one level");
  int level = 1;
  agl_cmd->add_option("--level", level, "polysemy level m")->required();
  auto *fit_cmd = app.add_subcommand("fit", "two-geometric fit of the lifetime pmf");
  auto *compare_cmd = app.add_subcommand("compare", "model age distribution vs the dated word table");
  bool no_calibration = false;
  bool auto_calibrate = false;
  compare_cmd->add_flag("--no-calibration", no_calibration, "run without a calibration (fails)");
  compare_cmd->add_flag("--calibrate", auto_calibrate, "calibrate against the table's mean age");
  auto *preset_cmd = app.add_subcommand("preset-93k", "full 93000-word experiment");

  auto *sim_cmd = app.add_subcommand("simulate", "Monte Carlo simulation");
  sim_cmd->require_subcommand(1);
  auto *traj_cmd = sim_cmd->add_subcommand("trajectory", "single-word trajectories");
  std::uint64_t index = 0;
  std::int64_t count = 1;
  std::vector<double> window;
  std::int64_t max_attempts = 1'000'000;
  traj_cmd->add_option("--index", index, "first trajectory index");
  traj_cmd->add_option("--count", count, "number of trajectories")->check(CLI::PositiveNumber);
  traj_cmd->add_option("--window", window, "lifetime window lo,hi in characteristic units")->delimiter(',')->expected(2);
  traj_cmd->add_option("--max-attempts", max_attempts, "sampling budget for --window");
  auto *pop_cmd = sim_cmd->add_subcommand("population", "whole-lexicon simulation, one birth per tick");
  std::int64_t ticks = 0;
  std::string initial = "stationary";
  pop_cmd->add_option("--ticks", ticks, "ticks to simulate")->required()->check(CLI::PositiveNumber);
  pop_cmd->add_option("--initial", initial, "stationary | empty")->check(CLI::IsMember({"stationary", "empty"}));
  auto *rev_cmd = sim_cmd->add_subcommand("revival", "revival from a finite zone 0");
  std::int64_t words = 1000;
  rev_cmd->add_option("--count", words, "number of words")->check(CLI::PositiveNumber);

  for (auto *cmd : {profile_cmd, lifetime_cmd, age_cmd, poly_cmd, qsd_cmd, agl_cmd, fit_cmd, compare_cmd, preset_cmd,
                    traj_cmd, pop_cmd, rev_cmd}) {
    flags.attach(cmd);
  }

  std::vector<const char *> argv;
  argv.reserve(args.size());
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << error_json("UsageError", e.what()).dump() << "\n";
    return 64;
  }

  try {
    if (preset_cmd->parsed()) {
      config::RunConfig c;
      if (flags.given("config")) c = config::load_config(flags.config_path);
      if (flags.given("top")) c.boundary.top = config::parse_top(flags.top);
      if (flags.given("bottom")) c.boundary.bottom = config::parse_bottom(flags.bottom);
      if (flags.given("seed")) c.seed = flags.seed;
      if (flags.given("horizon")) c.horizon = flags.horizon;
      if (flags.given("out")) c.out_dir = flags.out;
      if (flags.given("warp")) c.warp = config::parse_warp(flags.warp);
      const int max_level = flags.given("max-level") ? flags.max_level : 10;
      return run_preset(c, max_level, {}, out);
    }

    const auto c = flags.resolve();
    const Artifacts art(c);

    if (profile_cmd->parsed()) {
      const auto profile = config::resolve_profile(c);
      art.csv("profile.csv", io::profile_csv(profile));
      out << "profile: M=" << profile.max_level() << " N=" << format_double(profile.total_words())
          << " S=" << format_double(profile.total_meanings())
          << " mean_polysemy=" << format_double(profile.mean_polysemy()) << "\n";
      return 0;
    }

    const auto kernel = kernel_for(c);
    const auto horizon = config::resolved_horizon(c, kernel.profile());

    if (lifetime_cmd->parsed()) {
      const auto pmf = analytics::lifetime_pmf(kernel, horizon);
      art.csv("lifetime.csv", lifetime_csv(pmf));
      if (rebin_opt->count() > 0) {
        if (!(rebin > 0.0)) throw Error(Errc::ValidationError, "--rebin must be positive");
        art.csv("lifetime_units.csv", lifetime_units_csv(pmf, kernel.profile().total_words(), rebin, nullptr));
      }
      out << "lifetime: horizon=" << horizon << " mean=" << format_double(analytics::mean_lifetime(kernel))
          << " tail_mass=" << format_double(pmf.tail_mass) << "\n";
      return 0;
    }
    if (age_cmd->parsed()) {
      const auto age = renewal::equilibrium_age_pmf(light_tail_lifetime(c, kernel));
      const double mean = renewal::mean_age(age);
      art.csv("age.csv", age_csv(age, c.years_per_tick));
      out << "age-dist: mean_age_ticks=" << format_double(mean);
      if (c.years_per_tick) out << " mean_age_years=" << format_double(mean * *c.years_per_tick);
      out << "\n";
      return 0;
    }
    if (poly_cmd->parsed()) {
      const auto chosen = ages.empty() ? even_ages(horizon, points) : ages;
      const auto curve = analytics::mean_polysemy_vs_age(kernel, chosen);
      art.csv("polysemy_age.csv", polysemy_csv(curve));
      out << "polysemy-age: " << curve.size() << " ages, last=" << format_double(curve.back().second) << "\n";
      return 0;
    }
    if (qsd_cmd->parsed()) {
      const auto q = analytics::quasi_stationary(kernel, power);
      art.csv("qsd.csv", qsd_csv(q.distribution));
      art.json_file("qsd.json", {{"perron_value", q.perron_value},
                                 {"mean_polysemy", q.distribution.mean_level()},
                                 {"iterations", q.iterations}});
      out << "qsd: mean_polysemy=" << format_double(q.distribution.mean_level())
          << " perron_value=" << format_double(q.perron_value) << "\n";
      return 0;
    }
    if (agl_cmd->parsed()) {
      const auto r = analytics::age_distribution_given_level(kernel, level, horizon);
      std::string body = "age,pmf\n";
      for (std::size_t i = 0; i < r.pmf.masses.size(); ++i) body += std::to_string(i) + "," + format_double(r.pmf.masses[i]) + "\n";
      art.csv("age_given_level.csv", body);
      art.json_file("age_given_level.json", {{"level", r.level},
                                             {"mean_age_ticks", r.mean_age},
                                             {"expected_occupancy", r.expected_occupancy},
                                             {"level_share", r.level_share},
                                             {"tail_mass", r.pmf.tail_mass}});
      out << "age-given-level: level=" << level << " mean_age=" << format_double(r.mean_age) << "\n";
      return 0;
    }
    if (fit_cmd->parsed()) {
      const auto fit = empirical::fit_two_geometrics(light_tail_lifetime(c, kernel));
      art.json_file("fit.json", fit_json(fit));
      out << "fit: w1=" << format_double(fit.components[0].weight) << " q1=" << format_double(fit.components[0].ratio)
          << " w2=" << format_double(fit.components[1].weight) << " q2=" << format_double(fit.components[1].ratio)
          << " residual=" << format_double(fit.residual) << " single_residual=" << format_double(fit.single_residual)
          << "\n";
      return 0;
    }
    if (compare_cmd->parsed()) {
      const auto table = empirical::builtin_table(c.corrected_20c);
      std::optional<empirical::TimeCalibration> calibration;
      std::optional<DiscretePmf> age;
      auto model_age = [&]() -> const DiscretePmf & {
        if (!age) age = renewal::equilibrium_age_pmf(light_tail_lifetime(c, kernel));
        return *age;
      };
      if (!no_calibration) {
        if (c.years_per_tick) {
          calibration = empirical::TimeCalibration{*c.years_per_tick, c.warp};
        } else if (auto_calibrate) {
          const double ticks_mean = renewal::mean_age(model_age());
          const double years = c.warp ? empirical::warped_mean_age(table, *c.warp)
                                      : empirical::empirical_mean_age(table).mean_years;
          calibration = empirical::calibrate(ticks_mean, years);
          calibration->warp = c.warp;
        }
      }
      if (!calibration) {
        throw Error(Errc::CalibrationMissing, "compare needs --years-per-tick or --calibrate");
      }
      const auto report = empirical::compare_age_distribution(model_age(), calibration, table);
      art.csv("comparison.csv", comparison_csv(report));
      art.json_file("comparison.json", comparison_json(report));
      out << "compare: spearman=" << format_double(report.spearman)
          << " l1=" << format_double(report.l1_distance) << "\n";
      return 0;
    }
    if (traj_cmd->parsed()) {
      std::vector<montecarlo::Trajectory> picked;
      if (!window.empty()) {
        montecarlo::SelectionOptions sel;
        sel.max_attempts = max_attempts;
        sel.horizon = horizon;
        picked = montecarlo::select_trajectories(kernel, c.seed, count, {window[0], window[1]}, sel);
      } else {
        for (std::int64_t i = 0; i < count; ++i) {
          picked.push_back(montecarlo::simulate_trajectory(kernel, c.seed, index + static_cast<std::uint64_t>(i), horizon));
        }
      }
      json listing = json::array();
      for (const auto &t : picked) {
        const std::string name = "trajectory_" + std::to_string(t.index) + ".csv";
        art.csv(name, trajectory_csv(t));
        listing.push_back({{"file", name},
                           {"index", t.index},
                           {"seed", t.seed},
                           {"absorbed_at", t.absorbed_at ? json(*t.absorbed_at) : json(nullptr)},
                           {"revivals", t.revivals}});
      }
      art.json_file("trajectories.json", {{"trajectories", listing}});
      out << "simulate trajectory: " << picked.size() << " trajectories written\n";
      return 0;
    }
    if (pop_cmd->parsed()) {
      const auto census = montecarlo::simulate_population(
          kernel, ticks, initial == "empty" ? montecarlo::InitialState::Empty : montecarlo::InitialState::Stationary,
          c.seed);
      std::string body = "tick,level,count\n";
      body.reserve(static_cast<std::size_t>(ticks * census.max_level) * 16);
      for (std::int64_t t = 1; t <= census.ticks(); ++t) {
        for (int m = 1; m <= census.max_level; ++m) {
          body += std::to_string(t) + "," + std::to_string(m) + "," + std::to_string(census.count(t, m)) + "\n";
        }
      }
      art.csv("census.csv", body);
      out << "simulate population: ticks=" << ticks << " final_population=" << census.population(ticks)
          << " births=" << census.births.back() << " deaths=" << census.deaths.back() << "\n";
      return 0;
    }
    if (rev_cmd->parsed()) {
      const auto s = montecarlo::simulate_revival(kernel, c.seed, words, horizon);
      json dormancy = json::object();
      for (const auto &[len, n] : s.dormancy) dormancy[std::to_string(len)] = n;
      art.json_file("revival.json", {{"words", s.words},
                                     {"horizon", s.horizon},
                                     {"zone_zero_occupancy", s.zone_zero_occupancy},
                                     {"revival_histogram", s.revival_histogram},
                                     {"dormancy_histogram", dormancy},
                                     {"censored_dormancies", s.censored_dormancies},
                                     {"mean_revivals", s.mean_revivals},
                                     {"zone_zero_fraction", s.zone_zero_fraction},
                                     {"zone_zero_fraction_se", s.zone_zero_fraction_se}});
      out << "simulate revival: mean_revivals=" << format_double(s.mean_revivals)
          << " zone_zero_fraction=" << format_double(s.zone_zero_fraction) << "\n";
      return 0;
    }
  } catch (const Error &e) {
    err << error_json(e.name(), e.what()).dump() << "\n";
    return 2;
  }
  return 64;
}

}  // namespace lexwalk::cli
