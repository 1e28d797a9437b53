#include "adtdesign/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adtdesign/error.hpp"

namespace adt {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigurationError("design csv line " + std::to_string(line) + ": '" + s +
                             "' is not a number");
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string design_csv(const ApproximateDesign& design, const std::vector<double>& sensitivity,
                       const std::vector<bool>& saturated) {
  std::string out = "t,weight,sensitivity,saturated\n";
  for (std::size_t j = 0; j < design.size(); ++j) {
    out += format_number(design.points()[j]) + "," + format_number(design.weights()[j]) + ",";
    out += (j < sensitivity.size() ? format_number(sensitivity[j]) : "nan") + ",";
    out += (j < saturated.size() && saturated[j]) ? "true\n" : "false\n";
  }
  return out;
}

std::string design_csv(const TimePlan& plan) {
  std::vector<bool> sat(plan.design.size(), false);
  for (auto j : plan.certificate.saturated_set) sat[j] = true;
  return design_csv(plan.design, plan.certificate.sensitivity, sat);
}

ApproximateDesign read_design_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigurationError("design csv is empty");
  const auto header = split(line);
  int t_col = -1;
  int w_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "t") t_col = static_cast<int>(i);
    if (header[i] == "weight") w_col = static_cast<int>(i);
  }
  if (t_col < 0 || w_col < 0) {
    throw ConfigurationError("design csv header must contain columns 't' and 'weight'");
  }
  std::vector<double> t;
  std::vector<double> w;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) <= std::max(t_col, w_col)) {
      throw ConfigurationError("design csv line " + std::to_string(lineno) + ": too few columns");
    }
    t.push_back(parse_number(cells[static_cast<std::size_t>(t_col)], lineno));
    w.push_back(parse_number(cells[static_cast<std::size_t>(w_col)], lineno));
  }
  return ApproximateDesign(std::move(t), std::move(w));
}

ApproximateDesign load_design_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open design file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return read_design_csv(ss.str());
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "abscissa,pi_star,eff_zeta_star,eff_tau2,eff_tau6\n";
  for (const auto& r : result.rows) {
    out += format_number(r.abscissa) + "," + format_number(r.pi_star) + "," +
           format_number(r.eff_zeta_star) + "," + format_number(r.eff_tau2) + "," +
           format_number(r.eff_tau6) + "\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigurationError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigurationError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigurationError("cannot rename to '" + path + "': " + ec.message());
  }
}

}  // namespace adt
