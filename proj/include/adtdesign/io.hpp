#pragma once

#include <string>
#include <vector>

#include "adtdesign/model.hpp"
#include "adtdesign/sweeps.hpp"
#include "adtdesign/time_plan.hpp"

namespace adt {

/// Shortest representation that round-trips to the same double; "nan" for NaN.
std::string format_number(double v);

/// Design CSV, header `t,weight,sensitivity,saturated`.
std::string design_csv(const ApproximateDesign& design, const std::vector<double>& sensitivity,
                       const std::vector<bool>& saturated);
std::string design_csv(const TimePlan& plan);

/// Reads a design from CSV with at least the columns `t,weight`. Rows with
/// zero weight are kept; the weights must already sum to 1.
ApproximateDesign read_design_csv(const std::string& text);
ApproximateDesign load_design_csv(const std::string& path);

/// Sweep CSV, header `abscissa,pi_star,eff_zeta_star,eff_tau2,eff_tau6`.
std::string sweep_csv(const SweepResult& result);

/// Writes via a temporary sibling file and rename, so readers never see a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace adt
