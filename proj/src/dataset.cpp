#include "sqz/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace sqz {

namespace {

using ordered_json = nlohmann::ordered_json;
constexpr double tp = 2.0 * pi;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw std::invalid_argument(path + ": " + message);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// Splits "12.5 kHz" (or "12.5kHz") into value and unit text.
void split_quantity(const std::string& text, const std::string& path,
                    double& value, std::string& unit) {
  std::size_t pos = 0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    fail(path, "expected a number with an optional unit, got '" + text + "'");
  }
  unit = trim(text.substr(pos));
}

}  // namespace

double parse_frequency(const std::string& text, const std::string& path) {
  double v = 0;
  std::string unit;
  split_quantity(text, path, v, unit);
  if (unit.empty() || unit == "rad/s") return v;
  if (unit == "Hz") return v * tp;
  if (unit == "kHz") return v * (tp * 1e3);
  if (unit == "MHz") return v * (tp * 1e6);
  fail(path, "unknown frequency unit '" + unit +
                 "' (use Hz, kHz, MHz, or rad/s)");
}

double parse_time(const std::string& text, const std::string& path) {
  double v = 0;
  std::string unit;
  split_quantity(text, path, v, unit);
  if (unit.empty() || unit == "s") return v;
  if (unit == "ms") return v * 1e-3;
  if (unit == "us") return v * 1e-6;
  if (unit == "ns") return v * 1e-9;
  fail(path, "unknown time unit '" + unit + "' (use s, ms, us, or ns)");
}

double parse_angle(const std::string& text, const std::string& path) {
  double v = 0;
  std::string unit;
  split_quantity(text, path, v, unit);
  if (unit.empty() || unit == "rad") return v;
  if (unit == "deg") return v * pi / 180.0;
  if (unit == "pi") return v * pi;
  fail(path, "unknown angle unit '" + unit + "' (use rad, deg, or pi)");
}

double parse_rate(const std::string& text, const std::string& path) {
  double v = 0;
  std::string unit;
  split_quantity(text, path, v, unit);
  if (unit.empty() || unit == "/s" || unit == "1/s") return v;
  fail(path, "unknown rate unit '" + unit + "' (use /s)");
}

double leg_rabi_for_power(double power_mw, bool axial) {
  if (power_mw < 0)
    throw std::invalid_argument("leg_rabi_for_power: power must be >= 0");
  const double rabi_1mw = axial ? tp * 1.3e3 : tp * 6.5e3;
  return rabi_1mw * std::sqrt(power_mw);
}

// ----------------------------- config parsing --------------------------------

namespace {

// Returns true (and the power in mW) when the text carries a power unit.
bool try_parse_power(const std::string& text, const std::string& path,
                     double& power_mw) {
  double v = 0;
  std::string unit;
  split_quantity(text, path, v, unit);
  if (unit == "mW") {
    power_mw = v;
    return true;
  }
  if (unit == "uW") {
    power_mw = v * 1e-3;
    return true;
  }
  return false;
}

double number_or(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

using Parser = double (*)(const std::string&, const std::string&);

double quantity_field(const ordered_json& j, const std::string& path,
                      Parser parse) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse(j.get<std::string>(), path);
  fail(path, "expected a number or a unit-annotated string");
}

// A force-leg strength: frequency or drive power.
double leg_strength_field(const ordered_json& j, const std::string& path,
                          bool axial) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    double power_mw = 0;
    if (try_parse_power(j.get<std::string>(), path, power_mw))
      return leg_rabi_for_power(power_mw, axial);
    return parse_frequency(j.get<std::string>(), path);
  }
  fail(path, "expected a frequency, a power, or a number (rad/s)");
}

void check_keys(const ordered_json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      fail(path.empty() ? item.key() : path + "." + item.key(),
           "unknown field");
}

void parse_oscillator(const ordered_json& j, OscillatorParams& osc) {
  check_keys(j, "interaction.oscillator", {"freq", "nbar", "heating_rate"});
  if (j.contains("freq"))
    osc.freq = quantity_field(j["freq"], "interaction.oscillator.freq",
                              parse_frequency);
  if (j.contains("nbar"))
    osc.nbar = number_or(j["nbar"], "interaction.oscillator.nbar");
  if (j.contains("heating_rate"))
    osc.heating_rate = quantity_field(
        j["heating_rate"], "interaction.oscillator.heating_rate", parse_rate);
}

void parse_interaction(const ordered_json& j, InteractionSettings& in) {
  check_keys(j, "interaction",
             {"order", "delta", "omega_alpha", "axis_angle_alpha",
              "omega_alpha_prime", "axis_alpha_prime", "phi_alpha",
              "phi_alpha_prime", "t_sqz", "t_ramp", "lamb_dicke",
              "include_carrier", "rwa_oscillator", "oscillator"});
  if (j.contains("order")) {
    if (!j["order"].is_number_integer())
      fail("interaction.order", "expected an integer");
    in.order = j["order"].get<int>();
  }
  // The axis must be known before the leg strengths: a power-calibrated
  // strength depends on the force geometry.
  if (j.contains("axis_alpha_prime")) {
    const ordered_json& a = j["axis_alpha_prime"];
    if (a.is_string() && a.get<std::string>() == "z") {
      in.alpha_prime_is_z = true;
    } else {
      in.alpha_prime_is_z = false;
      in.axis_angle_alpha_prime =
          quantity_field(a, "interaction.axis_alpha_prime", parse_angle);
    }
  }
  if (j.contains("delta"))
    in.delta = quantity_field(j["delta"], "interaction.delta",
                              parse_frequency);
  if (j.contains("omega_alpha"))
    in.omega_alpha =
        leg_strength_field(j["omega_alpha"], "interaction.omega_alpha", false);
  if (j.contains("axis_angle_alpha"))
    in.axis_angle_alpha = quantity_field(
        j["axis_angle_alpha"], "interaction.axis_angle_alpha", parse_angle);
  if (j.contains("omega_alpha_prime"))
    in.omega_alpha_prime =
        leg_strength_field(j["omega_alpha_prime"],
                           "interaction.omega_alpha_prime",
                           in.alpha_prime_is_z);
  if (j.contains("phi_alpha"))
    in.phi_alpha =
        quantity_field(j["phi_alpha"], "interaction.phi_alpha", parse_angle);
  if (j.contains("phi_alpha_prime"))
    in.phi_alpha_prime = quantity_field(
        j["phi_alpha_prime"], "interaction.phi_alpha_prime", parse_angle);
  if (j.contains("t_sqz"))
    in.t_sqz = quantity_field(j["t_sqz"], "interaction.t_sqz", parse_time);
  if (j.contains("t_ramp"))
    in.t_ramp = quantity_field(j["t_ramp"], "interaction.t_ramp", parse_time);
  if (j.contains("lamb_dicke"))
    in.lamb_dicke = number_or(j["lamb_dicke"], "interaction.lamb_dicke");
  if (j.contains("include_carrier")) {
    if (!j["include_carrier"].is_boolean())
      fail("interaction.include_carrier", "expected a boolean");
    in.include_carrier = j["include_carrier"].get<bool>();
  }
  if (j.contains("rwa_oscillator")) {
    if (!j["rwa_oscillator"].is_boolean())
      fail("interaction.rwa_oscillator", "expected a boolean");
    in.rwa_oscillator = j["rwa_oscillator"].get<bool>();
  }
  if (j.contains("oscillator")) parse_oscillator(j["oscillator"], in.oscillator);
}

void parse_probe(const ordered_json& j, ProbeSettings& probe) {
  check_keys(j, "probe", {"strength", "points", "max_duration", "phase"});
  if (j.contains("strength"))
    probe.strength = leg_strength_field(j["strength"], "probe.strength",
                                        false);
  if (j.contains("points")) {
    if (!j["points"].is_number_integer())
      fail("probe.points", "expected an integer");
    probe.points = j["points"].get<int>();
  }
  if (j.contains("max_duration"))
    probe.max_duration =
        quantity_field(j["max_duration"], "probe.max_duration", parse_time);
  if (j.contains("phase")) {
    const ordered_json& p = j["phase"];
    if (p.is_string() && p.get<std::string>() == "auto") {
      probe.auto_phase = true;
      probe.phase = 0.0;
    } else {
      probe.auto_phase = false;
      probe.phase = quantity_field(p, "probe.phase", parse_angle);
    }
  }
}

Parser scan_parser_for(const std::string& axis) {
  if (axis == "t_sqz" || axis == "t_ramp") return parse_time;
  if (axis == "delta") return parse_frequency;
  return parse_angle;  // probe_phase, delta_phi
}

void parse_scan(const ordered_json& j, ScanAxis& scan) {
  check_keys(j, "scan", {"name", "values"});
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("scan.name", "expected a string");
    scan.name = j["name"].get<std::string>();
  }
  if (j.contains("values")) {
    if (!j["values"].is_array()) fail("scan.values", "expected an array");
    const Parser parse = scan_parser_for(scan.name);
    scan.values.clear();
    int i = 0;
    for (const ordered_json& v : j["values"]) {
      scan.values.push_back(
          quantity_field(v, "scan.values[" + std::to_string(i) + "]", parse));
      ++i;
    }
  }
}

void parse_analysis(const ordered_json& j, AnalysisSettings& an) {
  check_keys(j, "analysis",
             {"dim_interaction", "dim_probe", "chi_points", "chi_extent",
              "wigner_pad", "sideband_max_n", "heating_aware_fit", "shots",
              "rtol", "atol"});
  const auto get_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer())
      fail(std::string("analysis.") + key, "expected an integer");
    out = j[key].get<int>();
  };
  get_int("dim_interaction", an.dim_interaction);
  get_int("dim_probe", an.dim_probe);
  get_int("chi_points", an.chi_points);
  get_int("wigner_pad", an.wigner_pad);
  get_int("sideband_max_n", an.sideband_max_n);
  get_int("shots", an.shots);
  if (j.contains("chi_extent"))
    an.chi_extent = number_or(j["chi_extent"], "analysis.chi_extent");
  if (j.contains("heating_aware_fit")) {
    if (!j["heating_aware_fit"].is_boolean())
      fail("analysis.heating_aware_fit", "expected true or false");
    an.heating_aware_fit = j["heating_aware_fit"].get<bool>();
  }
  if (j.contains("rtol")) an.rtol = number_or(j["rtol"], "analysis.rtol");
  if (j.contains("atol")) an.atol = number_or(j["atol"], "analysis.atol");
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") +
                                e.what());
  }
  check_keys(j, "",
             {"name", "kind", "version", "seed", "interaction", "probe",
              "scan", "analysis"});
  Scenario s;
  if (!j.contains("name") || !j["name"].is_string())
    fail("name", "required string field");
  s.name = j["name"].get<std::string>();
  if (!j.contains("kind") || !j["kind"].is_string())
    fail("kind", "required string field");
  s.kind = scenario_kind_from_string(j["kind"].get<std::string>());
  if (j.contains("version")) {
    if (!j["version"].is_number_integer())
      fail("version", "expected an integer");
    s.version = j["version"].get<int>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail("seed", "expected a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("interaction")) parse_interaction(j["interaction"], s.interaction);
  if (j.contains("probe")) parse_probe(j["probe"], s.probe);
  if (j.contains("scan")) parse_scan(j["scan"], s.scan);
  if (j.contains("analysis")) parse_analysis(j["analysis"], s.analysis);
  return s;
}

Scenario scenario_from_file(const std::string& path) {
  return scenario_from_json_text(read_text_file(path));
}

// --------------------------- config serialization ----------------------------

namespace {

std::string with_unit(double value, const char* unit) {
  return format_double(value) + " " + unit;
}

// Friendly unit only when the scaled value reproduces the stored double
// bit-exactly on parse; otherwise fall back to the base unit so a config
// round trip is lossless (and hash-stable).
std::string scaled_exact(double value, double scale, const char* unit,
                         const char* base_unit) {
  const double scaled = value / scale;
  if (scaled * scale == value && std::isfinite(scaled))
    return with_unit(scaled, unit);
  return with_unit(value, base_unit);
}

std::string freq_khz(double rad_per_s) {
  return scaled_exact(rad_per_s, tp * 1e3, "kHz", "rad/s");
}

std::string freq_mhz(double rad_per_s) {
  return scaled_exact(rad_per_s, tp * 1e6, "MHz", "rad/s");
}

std::string time_us(double seconds) {
  return scaled_exact(seconds, 1e-6, "us", "s");
}

std::string angle_rad(double rad) { return with_unit(rad, "rad"); }

}  // namespace

std::string scenario_to_json_text(const Scenario& s) {
  ordered_json j;
  j["name"] = s.name;
  j["kind"] = to_string(s.kind);
  j["version"] = s.version;
  j["seed"] = s.seed;

  ordered_json in;
  in["order"] = s.interaction.order;
  in["delta"] = freq_khz(s.interaction.delta);
  in["omega_alpha"] = freq_khz(s.interaction.omega_alpha);
  in["axis_angle_alpha"] = angle_rad(s.interaction.axis_angle_alpha);
  in["omega_alpha_prime"] = freq_khz(s.interaction.omega_alpha_prime);
  in["axis_alpha_prime"] =
      s.interaction.alpha_prime_is_z
          ? ordered_json("z")
          : ordered_json(angle_rad(s.interaction.axis_angle_alpha_prime));
  in["phi_alpha"] = angle_rad(s.interaction.phi_alpha);
  in["phi_alpha_prime"] = angle_rad(s.interaction.phi_alpha_prime);
  in["t_sqz"] = time_us(s.interaction.t_sqz);
  in["t_ramp"] = time_us(s.interaction.t_ramp);
  in["lamb_dicke"] = s.interaction.lamb_dicke;
  in["include_carrier"] = s.interaction.include_carrier;
  in["rwa_oscillator"] = s.interaction.rwa_oscillator;
  ordered_json osc;
  osc["freq"] = freq_mhz(s.interaction.oscillator.freq);
  osc["nbar"] = s.interaction.oscillator.nbar;
  osc["heating_rate"] =
      with_unit(s.interaction.oscillator.heating_rate, "/s");
  in["oscillator"] = osc;
  j["interaction"] = in;

  ordered_json probe;
  probe["strength"] = freq_khz(s.probe.strength);
  probe["points"] = s.probe.points;
  probe["max_duration"] = time_us(s.probe.max_duration);
  probe["phase"] = s.probe.auto_phase ? ordered_json("auto")
                                      : ordered_json(angle_rad(s.probe.phase));
  j["probe"] = probe;

  if (!s.scan.name.empty()) {
    ordered_json scan;
    scan["name"] = s.scan.name;
    ordered_json values = ordered_json::array();
    for (double v : s.scan.values) {
      if (s.scan.name == "t_sqz" || s.scan.name == "t_ramp")
        values.push_back(time_us(v));
      else if (s.scan.name == "delta")
        values.push_back(freq_khz(v));
      else
        values.push_back(angle_rad(v));
    }
    scan["values"] = values;
    j["scan"] = scan;
  }

  ordered_json an;
  an["dim_interaction"] = s.analysis.dim_interaction;
  an["dim_probe"] = s.analysis.dim_probe;
  an["chi_points"] = s.analysis.chi_points;
  an["chi_extent"] = s.analysis.chi_extent;
  an["wigner_pad"] = s.analysis.wigner_pad;
  an["sideband_max_n"] = s.analysis.sideband_max_n;
  an["heating_aware_fit"] = s.analysis.heating_aware_fit;
  an["shots"] = s.analysis.shots;
  an["rtol"] = s.analysis.rtol;
  an["atol"] = s.analysis.atol;
  j["analysis"] = an;

  return j.dump(2) + "\n";
}

// --------------------------- result serialization ----------------------------

namespace {

// JSON has no non-finite numbers; encode them as strings.
ordered_json to_jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double from_jnum(const ordered_json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(path, "expected a number or 'nan'/'inf'/'-inf'");
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(to_jnum(v(i)));
  return out;
}

Eigen::VectorXd vector_from_json(const ordered_json& j,
                                 const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        from_jnum(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

}  // namespace

std::string result_to_json_text(const ScenarioResult& res) {
  ordered_json j;
  j["format"] = "sqzlab-result";
  j["format_version"] = 1;

  ordered_json prov;
  prov["config_hash"] = res.provenance.config_hash;
  prov["seed"] = res.provenance.seed;
  prov["tool_version"] = res.provenance.tool_version;
  prov["scenario_name"] = res.provenance.scenario_name;
  prov["kind"] = res.provenance.kind;
  j["provenance"] = prov;

  ordered_json quantities = ordered_json::array();
  for (const FittedQuantity& q : res.quantities) {
    ordered_json e;
    e["name"] = q.name;
    e["value"] = to_jnum(q.value);
    e["uncertainty"] = to_jnum(q.uncertainty);
    e["unit"] = q.unit;
    quantities.push_back(e);
  }
  j["quantities"] = quantities;

  ordered_json tables = ordered_json::array();
  for (const ResultTable& t : res.tables) {
    ordered_json te;
    te["name"] = t.name;
    ordered_json cols = ordered_json::array();
    for (const ResultColumn& c : t.columns) {
      ordered_json ce;
      ce["name"] = c.name;
      ce["unit"] = c.unit;
      ordered_json vals = ordered_json::array();
      for (double v : c.values) vals.push_back(to_jnum(v));
      ce["values"] = vals;
      cols.push_back(ce);
    }
    te["columns"] = cols;
    tables.push_back(te);
  }
  j["tables"] = tables;

  ordered_json chis = ordered_json::array();
  for (const auto& [name, grid] : res.chi_grids) {
    ordered_json g;
    g["name"] = name;
    g["beta_re"] = vector_to_json(grid.beta_re);
    g["beta_im"] = vector_to_json(grid.beta_im);
    // Row-major over (beta_re index, beta_im index).
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (int i = 0; i < grid.values.rows(); ++i)
      for (int k = 0; k < grid.values.cols(); ++k) {
        re.push_back(to_jnum(grid.values(i, k).real()));
        im.push_back(to_jnum(grid.values(i, k).imag()));
      }
    g["values_re"] = re;
    g["values_im"] = im;
    chis.push_back(g);
  }
  j["chi_grids"] = chis;

  ordered_json wigners = ordered_json::array();
  for (const auto& [name, grid] : res.wigner_grids) {
    ordered_json g;
    g["name"] = name;
    g["x"] = vector_to_json(grid.x);
    g["p"] = vector_to_json(grid.p);
    ordered_json vals = ordered_json::array();
    for (int i = 0; i < grid.values.rows(); ++i)
      for (int k = 0; k < grid.values.cols(); ++k)
        vals.push_back(to_jnum(grid.values(i, k)));
    g["values"] = vals;
    g["max_imag"] = to_jnum(grid.max_imag);
    wigners.push_back(g);
  }
  j["wigner_grids"] = wigners;

  ordered_json notes = ordered_json::array();
  for (const std::string& n : res.notes) notes.push_back(n);
  j["notes"] = notes;

  return j.dump() + "\n";
}

ScenarioResult result_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("result: not valid JSON: ") +
                                e.what());
  }
  if (!j.contains("format") || j["format"] != "sqzlab-result")
    fail("format", "not a sqzlab result document");
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    fail("format_version", "unsupported version");

  ScenarioResult res;
  const ordered_json& prov = j.at("provenance");
  res.provenance.config_hash = prov.at("config_hash").get<std::string>();
  res.provenance.seed = prov.at("seed").get<std::uint64_t>();
  res.provenance.tool_version = prov.at("tool_version").get<std::string>();
  res.provenance.scenario_name = prov.at("scenario_name").get<std::string>();
  res.provenance.kind = prov.at("kind").get<std::string>();

  for (const ordered_json& e : j.at("quantities")) {
    FittedQuantity q;
    q.name = e.at("name").get<std::string>();
    q.value = from_jnum(e.at("value"), "quantities.value");
    q.uncertainty = from_jnum(e.at("uncertainty"), "quantities.uncertainty");
    q.unit = e.at("unit").get<std::string>();
    res.quantities.push_back(std::move(q));
  }

  for (const ordered_json& te : j.at("tables")) {
    ResultTable t;
    t.name = te.at("name").get<std::string>();
    for (const ordered_json& ce : te.at("columns")) {
      ResultColumn& c = t.add(ce.at("name").get<std::string>(),
                              ce.at("unit").get<std::string>());
      for (const ordered_json& v : ce.at("values"))
        c.values.push_back(from_jnum(v, t.name + "." + c.name));
    }
    res.tables.push_back(std::move(t));
  }

  for (const ordered_json& g : j.at("chi_grids")) {
    CharacteristicGrid grid;
    grid.beta_re = vector_from_json(g.at("beta_re"), "chi_grids.beta_re");
    grid.beta_im = vector_from_json(g.at("beta_im"), "chi_grids.beta_im");
    const Eigen::VectorXd re =
        vector_from_json(g.at("values_re"), "chi_grids.values_re");
    const Eigen::VectorXd im =
        vector_from_json(g.at("values_im"), "chi_grids.values_im");
    const Eigen::Index rows = grid.beta_re.size(), cols = grid.beta_im.size();
    if (re.size() != rows * cols || im.size() != rows * cols)
      fail("chi_grids.values_re", "grid size mismatch");
    grid.values.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index k = 0; k < cols; ++k)
        grid.values(i, k) =
            complexd(re(i * cols + k), im(i * cols + k));
    res.chi_grids.emplace_back(g.at("name").get<std::string>(),
                               std::move(grid));
  }

  for (const ordered_json& g : j.at("wigner_grids")) {
    WignerGrid grid;
    grid.x = vector_from_json(g.at("x"), "wigner_grids.x");
    grid.p = vector_from_json(g.at("p"), "wigner_grids.p");
    const Eigen::VectorXd vals =
        vector_from_json(g.at("values"), "wigner_grids.values");
    const Eigen::Index rows = grid.x.size(), cols = grid.p.size();
    if (vals.size() != rows * cols)
      fail("wigner_grids.values", "grid size mismatch");
    grid.values.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index k = 0; k < cols; ++k)
        grid.values(i, k) = vals(i * cols + k);
    grid.max_imag = from_jnum(g.at("max_imag"), "wigner_grids.max_imag");
    res.wigner_grids.emplace_back(g.at("name").get<std::string>(),
                                  std::move(grid));
  }

  for (const ordered_json& n : j.at("notes"))
    res.notes.push_back(n.get<std::string>());
  return res;
}

ScenarioResult result_from_file(const std::string& path) {
  return result_from_json_text(read_text_file(path));
}

// ----------------------------------- CSV ------------------------------------

std::string format_double(double value) {
  char buf[40];
  const auto out = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, out.ptr);
}

std::string table_to_csv(const ResultTable& table) {
  table.validate();
  std::string out;
  bool first = true;
  for (const ResultColumn& c : table.columns) {
    if (!first) out += ",";
    out += c.name + " (" + c.unit + ")";
    first = false;
  }
  out += "\n";
  for (std::size_t row = 0; row < table.rows(); ++row) {
    first = true;
    for (const ResultColumn& c : table.columns) {
      if (!first) out += ",";
      out += format_double(c.values[row]);
      first = false;
    }
    out += "\n";
  }
  return out;
}

// ----------------------------------- I/O ------------------------------------

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(content.data(),
            static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace sqz
