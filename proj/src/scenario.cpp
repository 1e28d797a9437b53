#include "adtdesign/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace adt {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) {
    if (!s.empty()) s += "\n";
    s += e;
  }
  return s;
}

// Reads fields of a JSON object and records problems instead of throwing.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  std::string path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return obj_.is_object() && obj_.contains(key); }

  std::optional<double> number(const std::string& key, bool required = true) {
    if (!has(key)) {
      if (required) errors_.push_back(path(key) + ": missing required field");
      return std::nullopt;
    }
    const json& v = obj_.at(key);
    if (!v.is_number()) {
      errors_.push_back(path(key) + ": expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      errors_.push_back(path(key) + ": must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<int> integer(const std::string& key, bool required = true) {
    if (!has(key)) {
      if (required) errors_.push_back(path(key) + ": missing required field");
      return std::nullopt;
    }
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) {
      errors_.push_back(path(key) + ": expected an integer");
      return std::nullopt;
    }
    return v.get<int>();
  }

  std::optional<std::string> string(const std::string& key, bool required = true) {
    if (!has(key)) {
      if (required) errors_.push_back(path(key) + ": missing required field");
      return std::nullopt;
    }
    const json& v = obj_.at(key);
    if (!v.is_string()) {
      errors_.push_back(path(key) + ": expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back(path(key) + ": " + msg);
  }

  const json& at(const std::string& key) const { return obj_.at(key); }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
};

// "affine" or {"polynomial": d}; returns the degree.
std::optional<int> read_basis(FieldReader& r, const std::string& key) {
  if (!r.has(key)) return 1;
  const json& v = r.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "affine") return 1;
    r.error(key, "unknown basis '" + v.get<std::string>() + "'");
    return std::nullopt;
  }
  if (v.is_object() && v.contains("polynomial") && v.at("polynomial").is_number_integer()) {
    const int d = v.at("polynomial").get<int>();
    if (d < 1) {
      r.error(key, "polynomial degree must be >= 1");
      return std::nullopt;
    }
    return d;
  }
  r.error(key, "expected \"affine\" or {\"polynomial\": degree}");
  return std::nullopt;
}

std::optional<Matrix> read_matrix(FieldReader& r, const std::string& key) {
  const json& v = r.at(key);
  if (!v.is_array() || v.empty()) {
    r.error(key, "expected a non-empty array of rows");
    return std::nullopt;
  }
  const auto n = static_cast<Eigen::Index>(v.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = v.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      r.error(key, "must be a square matrix");
      return std::nullopt;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const json& e = row.at(static_cast<std::size_t>(j));
      if (!e.is_number()) {
        r.error(key, "entries must be numbers");
        return std::nullopt;
      }
      m(i, j) = e.get<double>();
    }
  }
  return m;
}

std::optional<DegradationModel> read_model(const json& doc, std::vector<std::string>& errors,
                                           std::optional<RandomLineCovariance>& line_cov) {
  if (!doc.contains("model") || !doc.at("model").is_object()) {
    errors.push_back("model: missing required object");
    return std::nullopt;
  }
  FieldReader r(doc.at("model"), "model", errors);
  const std::size_t before = errors.size();

  const auto stress_deg = read_basis(r, "stress_basis");
  const auto time_deg = read_basis(r, "time_basis");

  std::optional<Vector> beta;
  if (!r.has("beta")) {
    r.error("beta", "missing required field");
  } else if (!r.at("beta").is_array()) {
    r.error("beta", "expected an array of numbers");
  } else {
    const json& b = r.at("beta");
    Vector v(static_cast<Eigen::Index>(b.size()));
    bool ok = true;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!b[i].is_number()) {
        r.error("beta[" + std::to_string(i) + "]", "expected a number");
        ok = false;
      } else {
        v[static_cast<Eigen::Index>(i)] = b[i].get<double>();
      }
    }
    if (ok) beta = v;
    if (ok && stress_deg && time_deg &&
        v.size() != static_cast<Eigen::Index>((*stress_deg + 1) * (*time_deg + 1))) {
      r.error("beta", "has " + std::to_string(v.size()) + " entries, expected p1*p2 = " +
                          std::to_string((*stress_deg + 1) * (*time_deg + 1)));
    }
  }

  std::optional<Matrix> sigma_gamma;
  if (r.has("sigma_gamma")) {
    sigma_gamma = read_matrix(r, "sigma_gamma");
    if (sigma_gamma && time_deg && sigma_gamma->rows() != *time_deg + 1) {
      r.error("sigma_gamma", "must be " + std::to_string(*time_deg + 1) + "x" +
                                 std::to_string(*time_deg + 1));
    }
    if (r.has("sigma1") || r.has("sigma2") || r.has("rho")) {
      r.error("sigma_gamma", "give either sigma_gamma or (sigma1, sigma2, rho), not both");
    }
  } else {
    const auto s1 = r.number("sigma1");
    const auto s2 = r.number("sigma2");
    const auto rho = r.number("rho");
    if (time_deg && *time_deg != 1) {
      r.error("sigma_gamma", "required as a full matrix for non-affine time bases");
    }
    if (s1 && *s1 < 0.0) r.error("sigma1", "must be >= 0");
    if (s2 && *s2 < 0.0) r.error("sigma2", "must be >= 0");
    if (rho && std::abs(*rho) > 1.0) r.error("rho", "out of [-1,1]");
    if (s1 && s2 && rho) line_cov = RandomLineCovariance{*s1, *s2, *rho};
  }

  const auto se = r.number("sigma_eps");
  if (se && !(*se > 0.0)) r.error("sigma_eps", "must be > 0");
  const auto xu = r.number("x_u");
  const auto y0 = r.number("y0");

  if (errors.size() != before) return std::nullopt;
  try {
    Matrix sg = line_cov ? line_cov->matrix() : *sigma_gamma;
    return DegradationModel(StressBasis::polynomial(*stress_deg),
                            TimeBasis::polynomial(*time_deg), *beta, std::move(sg),
                            Homoscedastic{*se}, *xu, *y0);
  } catch (const ConfigurationError& e) {
    errors.push_back(std::string("model: ") + e.what());
    return std::nullopt;
  }
}

std::optional<GridSpec> read_grid(const json& doc, int p2, std::vector<std::string>& errors) {
  if (!doc.contains("grid")) return std::nullopt;
  if (!doc.at("grid").is_object()) {
    errors.push_back("grid: expected an object");
    return std::nullopt;
  }
  FieldReader r(doc.at("grid"), "grid", errors);
  const auto J = r.integer("J");
  const auto k = r.integer("k");
  if (!J || !k) return std::nullopt;
  GridSpec g{*J, *k};
  try {
    g.validate(p2);
  } catch (const Error& e) {
    errors.push_back(std::string("grid: ") + e.what());
    return std::nullopt;
  }
  return g;
}

std::optional<SweepSpec> read_sweep(const json& doc, std::vector<std::string>& errors) {
  if (!doc.contains("sweep")) return std::nullopt;
  if (!doc.at("sweep").is_object()) {
    errors.push_back("sweep: expected an object");
    return std::nullopt;
  }
  FieldReader r(doc.at("sweep"), "sweep", errors);
  const std::size_t before = errors.size();
  const auto var = r.string("variable");
  SweepSpec s;
  if (var) {
    if (*var == "t_median") {
      s = SweepSpec::defaults(SweepVariable::TMedian);
    } else if (*var == "sigma_ratio") {
      s = SweepSpec::defaults(SweepVariable::SigmaRatio);
    } else {
      r.error("variable", "expected \"t_median\" or \"sigma_ratio\"");
    }
  }
  if (auto lo = r.number("lo", false)) s.lo = *lo;
  if (auto hi = r.number("hi", false)) s.hi = *hi;
  if (auto n = r.integer("n", false)) s.n_points = *n;
  if (r.has("log_spaced")) {
    if (r.at("log_spaced").is_boolean()) {
      s.log_spaced = r.at("log_spaced").get<bool>();
    } else {
      r.error("log_spaced", "expected a boolean");
    }
  }
  if (r.has("candidates")) {
    const json& c = r.at("candidates");
    if (!c.is_array()) {
      r.error("candidates", "expected an array of names");
    } else {
      s.candidates.clear();
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string name = c[i].is_string() ? c[i].get<std::string>() : "";
        if (name == "zeta_star_nominal") {
          s.candidates.push_back(Candidate::ZetaStarNominal);
        } else if (name == "xi_star_tau2") {
          s.candidates.push_back(Candidate::UniformTau2);
        } else if (name == "xi_star_tau6") {
          s.candidates.push_back(Candidate::UniformTau6);
        } else {
          r.error("candidates[" + std::to_string(i) + "]", "unknown candidate design");
        }
      }
    }
  }
  if (errors.size() != before) return std::nullopt;
  try {
    s.validate();
  } catch (const ConfigurationError& e) {
    errors.push_back(e.what());
    return std::nullopt;
  }
  return s;
}

std::optional<OutputSpec> read_output(const json& doc, std::vector<std::string>& errors) {
  if (!doc.contains("output")) return std::nullopt;
  if (!doc.at("output").is_object()) {
    errors.push_back("output: expected an object");
    return std::nullopt;
  }
  FieldReader r(doc.at("output"), "output", errors);
  OutputSpec o;
  if (auto f = r.string("format", false)) {
    if (*f == "csv") {
      o.format = OutputFormat::Csv;
    } else if (*f == "json") {
      o.format = OutputFormat::Json;
    } else {
      r.error("format", "expected \"csv\" or \"json\"");
    }
  }
  if (auto p = r.string("path", false)) o.path = *p;
  return o;
}

json basis_json(int degree) {
  if (degree == 1) return "affine";
  return json{{"polynomial", degree}};
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : ConfigurationError("invalid scenario:\n" + join(errors)), errors_(std::move(errors)) {}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ScenarioError({"syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what()});
  }
  if (!doc.is_object()) throw ScenarioError({"document: expected an object at top level"});

  std::vector<std::string> errors;
  std::optional<RandomLineCovariance> line_cov;
  auto model = read_model(doc, errors, line_cov);
  const int p2 = model ? model->p2() : 2;
  auto grid = read_grid(doc, p2, errors);
  auto sweep = read_sweep(doc, errors);
  auto output = read_output(doc, errors);
  if (!errors.empty() || !model) throw ScenarioError(std::move(errors));
  return Scenario{std::move(*model), line_cov, grid, sweep, output};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  json model;
  model["stress_basis"] = basis_json(s.model.stress_basis().degree());
  model["time_basis"] = basis_json(s.model.time_basis().degree());
  model["beta"] = std::vector<double>(s.model.beta().data(),
                                      s.model.beta().data() + s.model.beta().size());
  if (s.line_covariance) {
    model["sigma1"] = s.line_covariance->sigma1;
    model["sigma2"] = s.line_covariance->sigma2;
    model["rho"] = s.line_covariance->rho;
  } else {
    json rows = json::array();
    const Matrix& g = s.model.sigma_gamma();
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < g.cols(); ++j) row.push_back(g(i, j));
      rows.push_back(row);
    }
    model["sigma_gamma"] = rows;
  }
  model["sigma_eps"] = s.model.sigma_eps();
  model["x_u"] = s.model.x_use();
  model["y0"] = s.model.y0();

  json doc;
  doc["model"] = model;
  if (s.grid) doc["grid"] = {{"J", s.grid->J}, {"k", s.grid->k}};
  if (s.sweep) {
    json c = json::array();
    for (Candidate cand : s.sweep->candidates) c.push_back(to_string(cand));
    doc["sweep"] = {{"variable", to_string(s.sweep->variable)},
                    {"lo", s.sweep->lo},
                    {"hi", s.sweep->hi},
                    {"n", s.sweep->n_points},
                    {"log_spaced", s.sweep->log_spaced},
                    {"candidates", c}};
  }
  if (s.output) {
    doc["output"] = {{"format", s.output->format == OutputFormat::Csv ? "csv" : "json"},
                     {"path", s.output->path}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace adt
