// Writes a reference dataset holding the analytic vacuum characteristic
// function chi(beta) = exp(-|beta|^2 / 2) on the standard 41x41 grid.  The
// values are closed-form, independent of the simulation code, so the dataset
// doubles as a fixture for checking the Wigner reconstruction end to end
// (the reconstructed map must satisfy W(0,0) = 1/pi).

#include <cmath>
#include <cstdio>

#include "sqz/dataset.hpp"
#include "sqz/experiments.hpp"

using namespace sqz;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: gen_vacuum_chi <output.json>\n");
    return 1;
  }

  CharacteristicGrid chi;
  chi.beta_re = Eigen::VectorXd::LinSpaced(41, -3.0, 3.0);
  chi.beta_im = Eigen::VectorXd::LinSpaced(41, -3.0, 3.0);
  chi.values.resize(41, 41);
  for (int i = 0; i < 41; ++i)
    for (int k = 0; k < 41; ++k) {
      const double b2 = chi.beta_re(i) * chi.beta_re(i) +
                        chi.beta_im(k) * chi.beta_im(k);
      chi.values(i, k) = std::exp(-b2 / 2.0);
    }

  ScenarioResult res;
  res.provenance.config_hash = hash_hex(fnv1a64("analytic-vacuum-chi"));
  res.provenance.seed = 0;
  res.provenance.tool_version = "0.1.0";
  res.provenance.scenario_name = "vacuum_chi";
  res.provenance.kind = "reference";
  res.chi_grids.emplace_back("chi", std::move(chi));
  res.notes.push_back(
      "Analytic vacuum characteristic function exp(-|beta|^2/2), 41x41, "
      "extent 3.");

  write_text_atomic(argv[1], result_to_json_text(res));
  return 0;
}
