// sqzlab — command-line front end for the simulation library.
//
// Subcommands:
//   run <config|preset>   execute a scenario and write its datasets
//   presets               list the built-in configurations
//   validate <config>     schema-check a config file (optionally print hash)
//   wigner <result.json>  reconstruct a Wigner map from a stored χ grid
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sqz/dataset.hpp"
#include "sqz/experiments.hpp"
#include "sqz/plot.hpp"
#include "sqz/tomography.hpp"

namespace fs = std::filesystem;
using namespace sqz;

namespace {

struct OutputOptions {
  std::string out_dir;
  std::vector<std::string> formats;  // csv, json, png

  bool wants(const std::string& f) const {
    for (const std::string& x : formats)
      if (x == f) return true;
    return false;
  }

  std::string path_for(const std::string& stem, const std::string& ext) const {
    return (fs::path(out_dir) / (stem + ext)).string();
  }
};

std::string default_out_dir() {
  if (const char* env = std::getenv("SQZLAB_OUT"); env && *env) return env;
  return "out";
}

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--out", out.out_dir, "Output directory")
      ->default_val(default_out_dir());
  cmd->add_option("--format", out.formats,
                  "Dataset formats to write (repeatable)")
      ->check(CLI::IsMember({"csv", "json", "png"}))
      ->default_val(std::vector<std::string>{"json", "csv"});
}

// Loads either a config file or a named preset.
Scenario load_scenario(const std::string& source) {
  if (fs::exists(source)) return scenario_from_file(source);
  try {
    return preset(source);
  } catch (const std::invalid_argument&) {
    std::string names;
    for (const std::string& n : preset_names()) names += "\n  " + n;
    throw std::invalid_argument(
        "'" + source +
        "' is neither a config file nor a preset; available presets:" + names);
  }
}

std::string config_hash_of(const Scenario& s) {
  return hash_hex(fnv1a64(canonical_config(s)));
}

void print_quantities(const ScenarioResult& res) {
  for (const FittedQuantity& q : res.quantities) {
    std::string line = "  " + q.name + " = " + format_double(q.value);
    if (q.uncertainty > 0) line += " +- " + format_double(q.uncertainty);
    if (!q.unit.empty() && q.unit != "1") line += " " + q.unit;
    std::puts(line.c_str());
  }
}

void write_result_datasets(const ScenarioResult& res, const Scenario& scenario,
                           const OutputOptions& out) {
  const std::string stem = res.provenance.scenario_name;
  if (out.wants("json")) {
    const std::string path = out.path_for(stem, ".json");
    write_text_atomic(path, result_to_json_text(res));
    std::printf("wrote %s\n", path.c_str());
    const std::string cfg_path = out.path_for(stem + "_config", ".json");
    write_text_atomic(cfg_path, scenario_to_json_text(scenario));
    std::printf("wrote %s\n", cfg_path.c_str());
  }
  if (out.wants("csv")) {
    for (const ResultTable& t : res.tables) {
      const std::string path = out.path_for(stem + "_" + t.name, ".csv");
      write_text_atomic(path, table_to_csv(t));
      std::printf("wrote %s\n", path.c_str());
    }
  }
  if (out.wants("png")) {
    if (!png_support())
      throw std::invalid_argument(
          "--format png: this build has no PNG support");
    for (const auto& [name, grid] : res.chi_grids) {
      const std::string path = out.path_for(stem + "_" + name, ".png");
      write_chi_png(grid, path);
      std::printf("wrote %s\n", path.c_str());
    }
    for (const auto& [name, grid] : res.wigner_grids) {
      const std::string path = out.path_for(stem + "_" + name, ".png");
      write_wigner_png(grid, path);
      std::printf("wrote %s\n", path.c_str());
    }
    for (const ResultTable& t : res.tables) {
      if (t.columns.size() < 2 || t.rows() < 2) continue;
      const std::string path = out.path_for(stem + "_" + t.name, ".png");
      write_table_png(t, path);
      std::printf("wrote %s\n", path.c_str());
    }
  }
}

int cmd_run(const std::string& source, OutputOptions& out, int jobs,
            bool quick, long long seed, int shots) {
  Scenario scenario = load_scenario(source);
  if (quick) scenario = quick_profile(std::move(scenario));
  if (seed >= 0) scenario.seed = static_cast<std::uint64_t>(seed);
  if (shots >= 0) scenario.analysis.shots = shots;
  scenario.validate();

  const ScenarioResult res = run_scenario(scenario, jobs);
  std::printf("scenario %s (%s), config %s\n", res.provenance.scenario_name.c_str(),
              res.provenance.kind.c_str(), res.provenance.config_hash.c_str());
  print_quantities(res);
  for (const std::string& note : res.notes)
    std::printf("note: %s\n", note.c_str());
  write_result_datasets(res, scenario, out);
  return 0;
}

int cmd_presets() {
  for (const std::string& name : preset_names())
    std::printf("%-24s %s\n", name.c_str(), preset_summary(name).c_str());
  return 0;
}

int cmd_validate(const std::string& path, bool quick, bool print_hash) {
  Scenario s = scenario_from_file(path);
  if (quick) s = quick_profile(std::move(s));
  s.validate();
  if (print_hash)
    std::printf("%s\n", config_hash_of(s).c_str());
  else
    std::printf("ok: %s (%s)\n", s.name.c_str(), to_string(s.kind));
  return 0;
}

int cmd_wigner(const std::string& path, OutputOptions& out,
               const std::string& grid_name, int pad) {
  const ScenarioResult in = result_from_file(path);
  if (in.chi_grids.empty())
    throw std::invalid_argument(path + ": result holds no chi grid");
  const CharacteristicGrid* chi = &in.chi_grids.front().second;
  std::string used = in.chi_grids.front().first;
  if (!grid_name.empty()) {
    chi = nullptr;
    for (const auto& [name, grid] : in.chi_grids)
      if (name == grid_name) {
        chi = &grid;
        used = name;
      }
    if (!chi)
      throw std::invalid_argument(path + ": no chi grid named '" + grid_name +
                                  "'");
  }

  const WignerGrid wig = wigner_from_characteristic(*chi, pad);
  const Eigen::Index ix = (wig.x.size() - 1) / 2, ip = (wig.p.size() - 1) / 2;
  const double w00 = wig.values(ix, ip);
  std::printf("W(0,0) = %s\n", format_double(w00).c_str());
  std::printf("min W  = %s\n", format_double(wig.min_value()).c_str());
  std::printf("integral = %s\n", format_double(wig.integral()).c_str());

  ScenarioResult res;
  res.provenance = in.provenance;
  res.quantities.push_back({"w_origin", w00, 0.0, "1"});
  res.quantities.push_back({"wigner_min", wig.min_value(), 0.0, "1"});
  res.quantities.push_back({"wigner_integral", wig.integral(), 0.0, "1"});
  res.wigner_grids.emplace_back("wigner", wig);
  res.notes.push_back("Wigner map reconstructed from chi grid '" + used +
                      "' with zero-padding " + std::to_string(pad) + ".");

  const std::string stem =
      fs::path(path).stem().string() + "_wigner";
  if (out.wants("json")) {
    const std::string opath = out.path_for(stem, ".json");
    write_text_atomic(opath, result_to_json_text(res));
    std::printf("wrote %s\n", opath.c_str());
  }
  if (out.wants("png")) {
    if (!png_support())
      throw std::invalid_argument(
          "--format png: this build has no PNG support");
    const std::string opath = out.path_for(stem, ".png");
    write_wigner_png(wig, opath);
    std::printf("wrote %s\n", opath.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sqzlab — spin-mediated nonlinear oscillator interactions"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Execute a scenario");
  std::string run_source;
  run->add_option("config", run_source, "Config file or preset name")
      ->required();
  OutputOptions run_out;
  add_output_flags(run, run_out);
  int jobs = 0;
  run->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  bool quick = false;
  run->add_flag("--quick", quick, "Shrink the scenario for a fast smoke run");
  long long seed = -1;
  run->add_option("--seed", seed, "Override the scenario seed");
  int shots = -1;
  run->add_option("--shots", shots,
                  "Override per-point shots (0 = noise-free)");

  // presets
  app.add_subcommand("presets", "List built-in configurations");

  // validate
  auto* validate = app.add_subcommand("validate", "Schema-check a config file");
  std::string validate_path;
  validate->add_option("config", validate_path, "Config file")->required();
  bool validate_quick = false;
  validate->add_flag("--quick", validate_quick,
                     "Apply the smoke-run shrink before checking/hashing");
  bool validate_hash = false;
  validate->add_flag("--hash", validate_hash,
                     "Print the canonical config hash instead of a summary");

  // wigner
  auto* wigner = app.add_subcommand(
      "wigner", "Reconstruct a Wigner map from a stored chi grid");
  std::string wigner_path;
  wigner->add_option("result", wigner_path, "Result JSON with a chi grid")
      ->required();
  OutputOptions wigner_out;
  add_output_flags(wigner, wigner_out);
  std::string wigner_grid_name;
  wigner->add_option("--grid", wigner_grid_name,
                     "Chi grid name (default: first)");
  int pad = 200;
  wigner->add_option("--pad", pad, "Zero-padding target for the transform");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(run_source, run_out, jobs, quick, seed, shots);
    if (app.get_subcommand("presets")->parsed()) return cmd_presets();
    if (validate->parsed())
      return cmd_validate(validate_path, validate_quick, validate_hash);
    if (wigner->parsed())
      return cmd_wigner(wigner_path, wigner_out, wigner_grid_name, pad);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
