#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fdnoma/errors.hpp"
#include "fdnoma/params.hpp"

namespace fdnoma {

inline constexpr const char* kSweepParameters[] = {"snr_db", "beta", "K", "N", "M", "lambda_sp", "lambda_ps", "lambda_sr"};

inline bool is_sweep_parameter(std::string_view name) {
  for (const char* p : kSweepParameters)
    if (name == p) return true;
  return false;
}

/// One sweep: a parameter, its grid, the modes to run and the MC budget.
struct SweepSpec {
  std::string parameter = "snr_db";
  std::vector<double> grid;
  std::vector<DuplexMode> modes{DuplexMode::FD, DuplexMode::HD, DuplexMode::OMA_TDMA};
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 42;
  std::string output;
};

struct SumRateSettings {
  std::uint64_t draws = 100;
  double eps = 1e-4;
  int max_iter = 50;
  double es_grid = 0.0;
};

struct Config {
  SystemParams params;
  std::optional<SweepSpec> sweep;
  SumRateSettings sumrate;
};

/// "start:stop:step", inclusive of stop up to rounding.
inline std::vector<double> parse_grid(const std::string& text) {
  double start = 0, stop = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw ConfigError("grid '" + text + "': expected start:stop:step");
  if (!(step > 0)) throw ConfigError("grid '" + text + "': step must be positive");
  if (stop < start) throw ConfigError("grid '" + text + "': empty grid (stop < start)");
  const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (long i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
  return grid;
}

inline void validate_sweep(const SweepSpec& s) {
  if (!is_sweep_parameter(s.parameter)) throw ConfigError("sweep.parameter: unknown parameter '" + s.parameter + "'");
  if (s.grid.empty()) throw ConfigError("sweep.grid: grid is empty");
  for (std::size_t i = 1; i < s.grid.size(); ++i)
    if (!(s.grid[i] > s.grid[i - 1])) throw ConfigError("sweep.grid: values must be strictly increasing");
  if (s.modes.empty()) throw ConfigError("sweep.modes: at least one mode is required");
  if (s.trials == 0) throw ConfigError("sweep.trials: must be >= 1");
}

/// Sets the swept parameter. Changing M resizes target_rates by repeating
/// the last target and, when alpha no longer fits, replaces it with
/// linearly decreasing weights normalized to one.
inline void apply_sweep_value(SystemParams& p, std::string_view name, double value) {
  auto as_int = [&](const char* what) {
    const double r = std::round(value);
    if (std::fabs(r - value) > 1e-9 || r < 1) throw ConfigError(std::string(what) + ": grid value must be a positive integer");
    return static_cast<int>(r);
  };
  if (name == "snr_db") p.snr_db = value;
  else if (name == "beta") p.beta = value;
  else if (name == "K") p.n_sts = as_int("K");
  else if (name == "N") p.n_antennas = as_int("N");
  else if (name == "lambda_sp") p.lambda_sp = value;
  else if (name == "lambda_ps") p.lambda_ps = value;
  else if (name == "lambda_sr") p.lambda_sr = value;
  else if (name == "M") {
    p.n_srs = as_int("M");
    const std::size_t count = p.receivers();
    const double last = p.target_rates.empty() ? 0.5 : p.target_rates.back();
    p.target_rates.resize(count, last);
    if (p.alpha.size() != count) {
      std::vector<double> w(count);
      const double total = static_cast<double>(count * (count + 1)) / 2.0;
      for (std::size_t i = 0; i < count; ++i) w[i] = static_cast<double>(count - i) / total;
      p.alpha = PowerAllocation(std::move(w));
    }
  } else {
    throw ConfigError("unknown sweep parameter '" + std::string(name) + "'");
  }
}

namespace detail {

/// 1-based line of the first `"key"` at or after `from` in `text`, or 0.
inline std::size_t line_of_key(const std::string& text, const std::string& key, std::size_t from = 0) {
  const std::size_t pos = text.find("\"" + key + "\"", from);
  if (pos == std::string::npos) return 0;
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

struct Locator {
  const std::string& text;
  std::string source;

  [[noreturn]] void fail(const std::string& key, const std::string& why, const std::string& block = "") const {
    std::size_t from = 0;
    if (!block.empty()) {
      const std::size_t b = text.find("\"" + block + "\"");
      if (b != std::string::npos) from = b;
    }
    const std::size_t line = line_of_key(text, key, from);
    std::string where = source;
    if (line > 0) where += ":" + std::to_string(line);
    throw ConfigError(where + ": " + (block.empty() ? key : block + "." + key) + ": " + why);
  }
};

template <class T>
T read(const nlohmann::json& j, const std::string& key, const Locator& loc, const std::string& block = "") {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    loc.fail(key, "wrong type", block);
  }
}

inline std::uint64_t read_count(const nlohmann::json& j, const std::string& key, const Locator& loc,
                                const std::string& block = "") {
  const nlohmann::json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0 && std::floor(d) == d && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  loc.fail(key, "must be a nonnegative integer", block);
}

inline int read_int(const nlohmann::json& j, const std::string& key, const Locator& loc) {
  const nlohmann::json& v = j.at(key);
  if (v.is_number_integer()) return v.get<int>();
  loc.fail(key, "must be an integer");
}

}  // namespace detail

/// Parses a JSON config. Errors carry `source:line: key: reason`.
inline Config parse_config(const std::string& text, const std::string& source = "<config>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  const detail::Locator loc{text, source};
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");

  Config cfg;
  SystemParams& p = cfg.params;
  static const std::set<std::string> known{"n_antennas", "n_sts", "n_srs", "lambda_ps", "lambda_sp", "lambda_sr",
                                           "beta", "eta", "xi", "psi", "i_si", "zeta_db", "snr_db", "target_rates",
                                           "alpha", "kappa", "hd_self_energy_recycling", "oma_slot_power", "sweep",
                                           "sumrate"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) loc.fail(key, "unknown field");

  if (j.contains("n_antennas")) p.n_antennas = detail::read_int(j, "n_antennas", loc);
  if (j.contains("n_sts")) p.n_sts = detail::read_int(j, "n_sts", loc);
  if (j.contains("n_srs")) p.n_srs = detail::read_int(j, "n_srs", loc);
  for (auto [key, field] : {std::pair{"lambda_ps", &p.lambda_ps}, {"lambda_sp", &p.lambda_sp},
                            {"lambda_sr", &p.lambda_sr}, {"beta", &p.beta}, {"eta", &p.eta}, {"xi", &p.xi},
                            {"psi", &p.psi}, {"i_si", &p.i_si}, {"snr_db", &p.snr_db}, {"kappa", &p.kappa}})
    if (j.contains(key)) *field = detail::read<double>(j, key, loc);
  if (j.contains("zeta_db")) {
    if (j.contains("i_si")) loc.fail("zeta_db", "give either i_si or zeta_db, not both");
    p.i_si = self_interference_from_zeta_db(detail::read<double>(j, "zeta_db", loc));
  }
  if (j.contains("target_rates")) p.target_rates = detail::read<std::vector<double>>(j, "target_rates", loc);
  if (j.contains("alpha")) {
    try {
      p.alpha = PowerAllocation(detail::read<std::vector<double>>(j, "alpha", loc));
    } catch (const std::invalid_argument& e) {
      loc.fail("alpha", e.what());
    }
  }
  if (j.contains("hd_self_energy_recycling"))
    p.hd_self_energy_recycling = detail::read<bool>(j, "hd_self_energy_recycling", loc);
  if (j.contains("oma_slot_power")) {
    const auto v = detail::read<std::string>(j, "oma_slot_power", loc);
    if (v == "full") p.oma_slot_power = OmaSlotPower::Full;
    else if (v == "noma") p.oma_slot_power = OmaSlotPower::NomaCoefficients;
    else loc.fail("oma_slot_power", "expected \"full\" or \"noma\"");
  }
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const std::string field = msg.substr(0, msg.find(':'));
    loc.fail(field, msg.substr(msg.find(':') + 2));
  }

  if (j.contains("sweep")) {
    const nlohmann::json& s = j.at("sweep");
    if (!s.is_object()) loc.fail("sweep", "must be an object");
    static const std::set<std::string> sweep_keys{"parameter", "grid", "modes", "trials", "seed", "output"};
    for (const auto& [key, value] : s.items())
      if (!sweep_keys.count(key)) loc.fail(key, "unknown field", "sweep");
    SweepSpec spec;
    if (s.contains("parameter")) spec.parameter = detail::read<std::string>(s, "parameter", loc, "sweep");
    if (!is_sweep_parameter(spec.parameter)) loc.fail("parameter", "unknown parameter '" + spec.parameter + "'", "sweep");
    if (!s.contains("grid")) loc.fail("sweep", "missing grid");
    const nlohmann::json& g = s.at("grid");
    try {
      spec.grid = g.is_string() ? parse_grid(g.get<std::string>()) : detail::read<std::vector<double>>(s, "grid", loc, "sweep");
    } catch (const ConfigError& e) {
      loc.fail("grid", e.what(), "sweep");
    }
    if (spec.grid.empty()) loc.fail("grid", "grid is empty", "sweep");
    if (s.contains("modes")) {
      spec.modes.clear();
      for (const auto& m : detail::read<std::vector<std::string>>(s, "modes", loc, "sweep")) {
        try {
          spec.modes.push_back(parse_mode(m));
        } catch (const std::invalid_argument& e) {
          loc.fail("modes", e.what(), "sweep");
        }
      }
    }
    if (s.contains("trials")) spec.trials = detail::read_count(s, "trials", loc, "sweep");
    if (s.contains("seed")) spec.seed = detail::read_count(s, "seed", loc, "sweep");
    if (s.contains("output")) spec.output = detail::read<std::string>(s, "output", loc, "sweep");
    try {
      validate_sweep(spec);
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      const std::string key = msg.substr(6, msg.find(':') - 6);  // after "sweep."
      loc.fail(key, msg.substr(msg.find(':') + 2), "sweep");
    }
    cfg.sweep = std::move(spec);
  }

  if (j.contains("sumrate")) {
    const nlohmann::json& s = j.at("sumrate");
    if (!s.is_object()) loc.fail("sumrate", "must be an object");
    static const std::set<std::string> keys{"draws", "eps", "max_iter", "es_grid"};
    for (const auto& [key, value] : s.items())
      if (!keys.count(key)) loc.fail(key, "unknown field", "sumrate");
    SumRateSettings& r = cfg.sumrate;
    if (s.contains("draws")) r.draws = detail::read_count(s, "draws", loc, "sumrate");
    if (s.contains("eps")) r.eps = detail::read<double>(s, "eps", loc, "sumrate");
    if (s.contains("max_iter")) r.max_iter = detail::read<int>(s, "max_iter", loc, "sumrate");
    if (s.contains("es_grid")) r.es_grid = detail::read<double>(s, "es_grid", loc, "sumrate");
    if (r.draws == 0) loc.fail("draws", "must be >= 1", "sumrate");
    if (!(r.eps > 0)) loc.fail("eps", "must be positive", "sumrate");
    if (r.max_iter < 1) loc.fail("max_iter", "must be >= 1", "sumrate");
    if (r.es_grid < 0 || r.es_grid > 1) loc.fail("es_grid", "must lie in [0, 1]", "sumrate");
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

inline nlohmann::json to_json(const SystemParams& p) {
  nlohmann::json j;
  j["n_antennas"] = p.n_antennas;
  j["n_sts"] = p.n_sts;
  j["n_srs"] = p.n_srs;
  j["lambda_ps"] = p.lambda_ps;
  j["lambda_sp"] = p.lambda_sp;
  j["lambda_sr"] = p.lambda_sr;
  j["beta"] = p.beta;
  j["eta"] = p.eta;
  j["xi"] = p.xi;
  j["psi"] = p.psi;
  j["i_si"] = p.i_si;
  j["snr_db"] = p.snr_db;
  j["target_rates"] = p.target_rates;
  j["alpha"] = p.alpha.coefficients();
  j["kappa"] = p.kappa;
  j["hd_self_energy_recycling"] = p.hd_self_energy_recycling;
  j["oma_slot_power"] = p.oma_slot_power == OmaSlotPower::Full ? "full" : "noma";
  return j;
}

inline nlohmann::json to_json(const Config& cfg) {
  nlohmann::json j = to_json(cfg.params);
  if (cfg.sweep) {
    const SweepSpec& s = *cfg.sweep;
    std::vector<std::string> modes;
    for (DuplexMode m : s.modes) modes.emplace_back(to_string(m));
    j["sweep"] = {{"parameter", s.parameter}, {"grid", s.grid}, {"modes", modes},
                  {"trials", s.trials},       {"seed", s.seed}, {"output", s.output}};
  }
  j["sumrate"] = {{"draws", cfg.sumrate.draws},
                  {"eps", cfg.sumrate.eps},
                  {"max_iter", cfg.sumrate.max_iter},
                  {"es_grid", cfg.sumrate.es_grid}};
  return j;
}

inline std::string serialize_config(const Config& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace fdnoma
