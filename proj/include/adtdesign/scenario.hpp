#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adtdesign/error.hpp"
#include "adtdesign/model.hpp"
#include "adtdesign/sweeps.hpp"
#include "adtdesign/time_plan.hpp"

namespace adt {

enum class OutputFormat { Csv, Json };

struct OutputSpec {
  OutputFormat format = OutputFormat::Csv;
  std::string path;
};

/// A fully validated scenario document. Schema (JSON):
///
///   model.stress_basis   "affine" | {"polynomial": d}
///   model.time_basis     "affine" | {"polynomial": d}
///   model.beta           [p1*p2 numbers], lexicographic (stress index outer)
///   model.sigma1, model.sigma2, model.rho   random intercept/slope (affine time)
///   model.sigma_gamma    [[...]] full p2 x p2 matrix (alternative to the above)
///   model.sigma_eps      number > 0
///   model.x_u, model.y0  numbers
///   grid.J, grid.k       optional
///   sweep.variable       "t_median" | "sigma_ratio"; sweep.lo, sweep.hi, sweep.n,
///   sweep.candidates     subset of ["zeta_star_nominal", "xi_star_tau2", "xi_star_tau6"]
///   output.format        "csv" | "json"; output.path
struct Scenario {
  DegradationModel model;
  std::optional<RandomLineCovariance> line_covariance;
  std::optional<GridSpec> grid;
  std::optional<SweepSpec> sweep;
  std::optional<OutputSpec> output;
};

/// All problems found in a scenario document, one message per entry,
/// each prefixed with its field path (or line:column for syntax errors).
class ScenarioError : public ConfigurationError {
 public:
  explicit ScenarioError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses and validates the whole document, collecting every error before throwing.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

std::string serialize_scenario(const Scenario& scenario);

}  // namespace adt
