#pragma once
// Scenario layer: declarative descriptions of complete simulation runs
// (state preparation → pulse → readout → fits) and the engine that executes
// them into self-describing result bundles.
//
// A Scenario is a pure value: running the same scenario with the same seed
// produces bit-identical results.  All physics numbers live in configs and
// presets, never hard-wired inside the pipelines.

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqz/hilbert.hpp"
#include "sqz/model.hpp"
#include "sqz/tomography.hpp"

namespace sqz {

// ----------------------------------------------------------------------------
// Scenario description
// ----------------------------------------------------------------------------

enum class ScenarioKind {
  squeezing_characterisation,  // pulse → probe splitting → two-stage r fit
  phase_scan,                  // splitting vs probe phase at fixed duration
  commutativity_scan,          // fitted r vs angle between the two SDF axes
  detuning_scan,               // propagator infidelity vs detuning at fixed r
  ramp_scan,                   // spin-purity deviation vs ramp duration
  unitarity_check,             // pulse–rotation–pulse composition tests
  generalized_squeezing,       // order-3/4 pulse → χ/Wigner reconstruction
  fidelity_benchmark,          // full evolution vs ideal effective unitary
  strength_comparison,         // spin-mediated vs direct-drive rate table
  sideband_analysis,           // Fock populations via blue-sideband flopping
};

const char* to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

// Oscillator pulse drive: two SDF legs at detunings Δ and (1−n)Δ.
struct InteractionSettings {
  int order = 2;                   // n: 2 squeeze, 3 trisqueeze, 4 quadsqueeze
  double delta = 0.0;              // leg-α detuning Δ (rad/s, signed)
  double omega_alpha = 0.0;        // SDF strength of the α leg (rad/s)
  double omega_alpha_prime = 0.0;  // SDF strength of the α′ leg (rad/s)
  double axis_angle_alpha = 0.0;   // equatorial angle of the α spin axis
  bool alpha_prime_is_z = false;   // α′ along σ_z instead of the equator
  double axis_angle_alpha_prime = 0.0;  // equatorial angle when not σ_z
  double phi_alpha = 0.0;               // motional phase of the α leg
  double phi_alpha_prime = 0.0;         // motional phase of the α′ leg
  double t_sqz = 0.0;    // pulse exposure ∫g(t)^n dt (seconds)
  double t_ramp = 0.0;   // sin² edge duration (seconds)
  double lamb_dicke = 0.0;  // η of the underlying drive (0 = unspecified)
  // Laboratory-level modelling switches (both default to the effective RWA
  // force picture the analysis pipelines use):
  bool include_carrier = false;  // add each leg's off-resonant spin-flip term
  bool rwa_oscillator = true;    // false: keep the e^{±iω_osc t} leg factors
  OscillatorParams oscillator;  // frequency, initial occupation, heating rate

  SpinAxis spin_axis_alpha() const;
  SpinAxis spin_axis_alpha_prime() const;
  // Wall-clock pulse duration for the equivalent-exposure convention:
  // t_total = t_sqz + 2(1 − c_n)·t_ramp with c_n = ∫₀¹ sin^{2n}(πu/2) du.
  double total_duration() const;
  RampShape ramp() const;
  // Two-leg configuration with the exposure-preserving ramp attached.
  InteractionConfig build() const;
  // Ideal effective interaction (magnitude, axis, phase) of build().
  EffectiveInteraction effective() const;
  void validate() const;
};

struct ProbeSettings {
  double strength = 0.0;      // probe SDF strength Ω_p (rad/s)
  int points = 25;            // samples along the duration grid
  double max_duration = 0.0;  // seconds; 0 → window chosen from expected r
  double phase = 0.0;         // probe motional phase (rad)
  bool auto_phase = true;     // derive the phase from the measured quadrature
                              // axis of the prepared state (order-2 only)
  void validate() const;
};

// One scan axis; what it parameterises depends on the scenario kind.
struct ScanAxis {
  std::string name;  // e.g. "t_sqz", "probe_phase", "delta_phi", "delta",
                     // "t_ramp", "duration"
  std::vector<double> values;
};

struct AnalysisSettings {
  int dim_interaction = 0;  // Fock levels for the pulse stage; 0 → automatic
  int dim_probe = 150;      // minimum Fock levels for the probe stage
  int chi_points = 41;      // characteristic-function grid edge (odd)
  double chi_extent = 3.0;  // characteristic-function half-width
  int wigner_pad = 200;     // zero-padding target for the Wigner transform
  int sideband_max_n = 12;  // highest Fock level unfolded from flopping
  bool heating_aware_fit = true;  // stage-2 fit occupation includes rate·t
  int shots = 0;            // per-point binomial shots; 0 → noise-free
  double rtol = 1e-8;       // integrator relative tolerance
  double atol = 1e-10;      // integrator absolute tolerance
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::squeezing_characterisation;
  int version = 1;
  std::uint64_t seed = 0;
  InteractionSettings interaction;
  ProbeSettings probe;
  ScanAxis scan;
  AnalysisSettings analysis;

  void validate() const;  // throws std::invalid_argument with a field path
};

// Fully-populated ready-to-run configurations; names are stable identifiers.
std::vector<std::string> preset_names();
Scenario preset(const std::string& name);
std::string preset_summary(const std::string& name);

// Shrink a scenario for smoke tests: smaller Hilbert spaces, fewer scan and
// probe points, shorter pulses.  Physics parameters (strengths, detunings,
// axes) are untouched.
Scenario quick_profile(Scenario s);

// ----------------------------------------------------------------------------
// Results
// ----------------------------------------------------------------------------

struct ResultColumn {
  std::string name;
  std::string unit;  // "s", "Hz", "rad", "1", ...
  std::vector<double> values;
};

struct ResultTable {
  std::string name;
  // deque: rows of add() may hold references to earlier columns, which must
  // survive later insertions.
  std::deque<ResultColumn> columns;

  ResultColumn& add(std::string column_name, std::string unit);
  const ResultColumn& column(const std::string& column_name) const;  // throws
  ResultColumn& column(const std::string& column_name);              // throws
  std::size_t rows() const;
  void validate() const;  // all columns equally long
};

struct FittedQuantity {
  std::string name;
  double value = 0.0;
  double uncertainty = 0.0;
  std::string unit;
};

struct Provenance {
  std::string config_hash;  // fnv1a-64 of the canonical config, hex
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string scenario_name;
  std::string kind;
};

struct ScenarioResult {
  Provenance provenance;
  std::vector<ResultTable> tables;
  std::vector<FittedQuantity> quantities;
  std::vector<std::pair<std::string, CharacteristicGrid>> chi_grids;
  std::vector<std::pair<std::string, WignerGrid>> wigner_grids;
  std::vector<std::string> notes;

  const ResultTable& table(const std::string& name) const;        // throws
  const FittedQuantity& quantity(const std::string& name) const;  // throws
};

// ----------------------------------------------------------------------------
// Execution
// ----------------------------------------------------------------------------

// Runs a scenario to completion.  jobs = 0 picks the hardware concurrency;
// scan points execute in a worker pool and are gathered in scan order.
// Errors from any stage propagate wrapped with scenario context.
ScenarioResult run_scenario(const Scenario& scenario, int jobs = 0);

// ----------------------------------------------------------------------------
// Helpers shared by pipelines, tools, and tests
// ----------------------------------------------------------------------------

// Deterministic flat text rendering of every field that influences the
// output; hashing it yields the provenance hash.
std::string canonical_config(const Scenario& scenario);
std::uint64_t fnv1a64(std::string_view text);
std::string hash_hex(std::uint64_t value);

// Fock-space size such that a squeezed thermal state (parameter r on top of
// occupation nbar) keeps its population leakage below ~2e-5.
int oscillator_dim_for(double r, double nbar, int floor_dim = 50);

// Runs body(0..count-1) on up to `jobs` threads (0 → hardware concurrency);
// rethrows the first exception after all workers finish.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

}  // namespace sqz
