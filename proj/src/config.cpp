#include "qlyap/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace qlyap {

using nlohmann::json;

ControllerConfig ExperimentConfig::make_controller() const {
  return ControllerConfig(build_p(system, p_spec), target, gains, odd, mode);
}

namespace {

struct Collector {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  void fail(const std::string& where, const std::string& what) {
    errors.push_back(where + ": " + what);
  }
  void warn(const std::string& where, const std::string& what) {
    warnings.push_back(where + ": " + what);
  }
};

bool read_complex(const json& v, Complex& out) {
  if (v.is_number()) {
    out = Complex(v.get<double>(), 0.0);
    return true;
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    out = Complex(v[0].get<double>(), v[1].get<double>());
    return true;
  }
  return false;
}

std::optional<Matrix> read_matrix(const json& j, const std::string& name,
                                  Collector& c) {
  if (!j.is_array() || j.empty()) {
    c.fail(name, "expected a nonempty array of rows");
    return std::nullopt;
  }
  const Eigen::Index n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  bool ok = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      std::ostringstream os;
      os << "row " << i + 1 << " must have " << n << " entries";
      c.fail(name, os.str());
      ok = false;
      continue;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      Complex z;
      if (!read_complex(row[static_cast<size_t>(k)], z)) {
        std::ostringstream os;
        os << "entry (" << i + 1 << "," << k + 1
           << ") must be a number or a [re, im] pair";
        c.fail(name, os.str());
        ok = false;
        continue;
      }
      m(i, k) = z;
    }
  }
  if (!ok) {
    return std::nullopt;
  }
  return m;
}

std::optional<Vector> read_vector(const json& j, const std::string& name,
                                  Collector& c) {
  if (!j.is_array() || j.size() < 2) {
    c.fail(name, "expected an array of at least 2 entries");
    return std::nullopt;
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  bool ok = true;
  for (size_t i = 0; i < j.size(); ++i) {
    Complex z;
    if (!read_complex(j[i], z)) {
      std::ostringstream os;
      os << "entry " << i + 1 << " must be a number or a [re, im] pair";
      c.fail(name, os.str());
      ok = false;
      continue;
    }
    v[static_cast<Eigen::Index>(i)] = z;
  }
  if (!ok) {
    return std::nullopt;
  }
  return v;
}

std::optional<Eigen::VectorXd> read_real_vector(const json& j,
                                                const std::string& name,
                                                Collector& c) {
  if (!j.is_array() || j.empty()) {
    c.fail(name, "expected a nonempty array of numbers");
    return std::nullopt;
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      std::ostringstream os;
      os << "entry " << i + 1 << " must be a number";
      c.fail(name, os.str());
      return std::nullopt;
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

// States may be written slightly off unit norm; fix quietly up to 1e-6 and
// report how far off they were.
std::optional<QuantumState> read_state(const json& j, const std::string& name,
                                       Collector& c) {
  auto raw = read_vector(j, name, c);
  if (!raw) {
    return std::nullopt;
  }
  const double norm = raw->norm();
  if (!(norm > 0.0) || !raw->allFinite()) {
    c.fail(name, "state vector must be finite and nonzero");
    return std::nullopt;
  }
  if (std::abs(norm - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "state vector norm is " << norm
       << "; more than 1e-6 away from 1, refusing to renormalize silently";
    c.fail(name, os.str());
    return std::nullopt;
  }
  if (std::abs(norm - 1.0) > QuantumState::kNormTol) {
    std::ostringstream os;
    os << "renormalized (norm was off by " << std::abs(norm - 1.0) << ")";
    c.warn(name, os.str());
  }
  return QuantumState(*raw / norm);
}

std::optional<PSpec> read_p_spec(const json& j, Collector& c) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    c.fail("p", "expected an object with a \"type\" string");
    return std::nullopt;
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "explicit") {
    if (!j.contains("matrix")) {
      c.fail("p", "explicit P needs a \"matrix\" field");
      return std::nullopt;
    }
    auto m = read_matrix(j["matrix"], "p.matrix", c);
    if (!m) return std::nullopt;
    return PSpec(ExplicitPSpec{*m});
  }
  if (type == "commuting") {
    if (!j.contains("eigenvalues")) {
      c.fail("p", "commuting P needs an \"eigenvalues\" field");
      return std::nullopt;
    }
    auto v = read_real_vector(j["eigenvalues"], "p.eigenvalues", c);
    if (!v) return std::nullopt;
    return PSpec(CommutingPSpec{*v});
  }
  if (type == "spectral") {
    if (!j.contains("vectors") || !j.contains("eigenvalues")) {
      c.fail("p", "spectral P needs \"vectors\" and \"eigenvalues\" fields");
      return std::nullopt;
    }
    auto m = read_matrix(j["vectors"], "p.vectors", c);
    auto v = read_real_vector(j["eigenvalues"], "p.eigenvalues", c);
    if (!m || !v) return std::nullopt;
    // vectors are written as rows in the file; columns internally
    return PSpec(SpectralPSpec{m->transpose(), *v});
  }
  if (type == "random") {
    RandomPSpec spec;
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) {
        c.fail("p.seed", "must be a nonnegative integer");
        return std::nullopt;
      }
      spec.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("min_offdiag")) {
      if (!j["min_offdiag"].is_number()) {
        c.fail("p.min_offdiag", "must be a number");
        return std::nullopt;
      }
      spec.min_offdiag = j["min_offdiag"].get<double>();
    }
    if (j.contains("min_eigenvalue")) {
      if (!j["min_eigenvalue"].is_number()) {
        c.fail("p.min_eigenvalue", "must be a number");
        return std::nullopt;
      }
      spec.min_eigenvalue = j["min_eigenvalue"].get<double>();
    }
    if (!(spec.min_offdiag > 0.0) || !(spec.min_eigenvalue > 0.0)) {
      c.fail("p", "random P needs positive min_offdiag and min_eigenvalue");
      return std::nullopt;
    }
    return PSpec(spec);
  }
  c.fail("p.type", "unknown variant \"" + type +
                       "\" (expected explicit, commuting, spectral or random)");
  return std::nullopt;
}

std::optional<OddFunction> read_odd(const json& j, const std::string& name,
                                    Collector& c) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "identity") {
      return OddFunction::identity();
    }
    c.fail(name, "unknown shaping function \"" + s + "\"");
    return std::nullopt;
  }
  if (j.is_object() && j.contains("type") && j["type"].is_string()) {
    const std::string type = j["type"].get<std::string>();
    if (type == "identity") {
      return OddFunction::identity();
    }
    if (type == "tanh-scaled") {
      if (!j.contains("scale") || !j["scale"].is_number()) {
        c.fail(name, "tanh-scaled needs a numeric \"scale\"");
        return std::nullopt;
      }
      const double scale = j["scale"].get<double>();
      if (!(scale > 0.0)) {
        c.fail(name, "tanh-scaled scale must be positive");
        return std::nullopt;
      }
      return OddFunction::tanh_scaled(scale);
    }
    if (type == "saturated-linear") {
      if (!j.contains("limit") || !j["limit"].is_number()) {
        c.fail(name, "saturated-linear needs a numeric \"limit\"");
        return std::nullopt;
      }
      const double limit = j["limit"].get<double>();
      if (!(limit > 0.0)) {
        c.fail(name, "saturated-linear limit must be positive");
        return std::nullopt;
      }
      return OddFunction::saturated_linear(limit);
    }
    c.fail(name, "unknown shaping function type \"" + type + "\"");
    return std::nullopt;
  }
  c.fail(name, "expected \"identity\" or an object with a \"type\" field");
  return std::nullopt;
}

json complex_to_json(const Complex& z) {
  if (z.imag() == 0.0) {
    return json(z.real());
  }
  return json::array({z.real(), z.imag()});
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row.push_back(complex_to_json(m(i, k)));
    }
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(complex_to_json(v[i]));
  }
  return out;
}

json real_vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
  }
  return out;
}

json odd_to_json(const OddFunction& f) {
  switch (f.kind) {
    case OddKind::identity:
      return json("identity");
    case OddKind::tanh_scaled:
      return json{{"type", "tanh-scaled"}, {"scale", f.param}};
    case OddKind::saturated_linear:
      return json{{"type", "saturated-linear"}, {"limit", f.param}};
  }
  return json("identity");
}

}  // namespace

ParseResult parse_config(const std::string& json_text) {
  ParseResult result;
  Collector c;

  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    result.errors.push_back(std::string("config is not valid JSON: ") +
                            e.what());
    return result;
  }
  if (!j.is_object()) {
    result.errors.push_back("config root must be a JSON object");
    return result;
  }

  double hbar = 1.0;
  if (j.contains("hbar")) {
    if (!j["hbar"].is_number() || !(j["hbar"].get<double>() > 0.0)) {
      c.fail("hbar", "must be a positive number");
    } else {
      hbar = j["hbar"].get<double>();
    }
  }

  std::optional<Matrix> h0;
  if (j.contains("h0")) {
    h0 = read_matrix(j["h0"], "h0", c);
  } else {
    c.fail("h0", "missing required field");
  }

  std::vector<Matrix> control_mats;
  bool controls_ok = false;
  if (j.contains("controls")) {
    if (!j["controls"].is_array() || j["controls"].empty()) {
      c.fail("controls", "expected a nonempty array of matrices");
    } else {
      controls_ok = true;
      for (size_t k = 0; k < j["controls"].size(); ++k) {
        std::ostringstream os;
        os << "controls[" << k + 1 << "]";
        auto m = read_matrix(j["controls"][k], os.str(), c);
        if (m) {
          control_mats.push_back(*m);
        } else {
          controls_ok = false;
        }
      }
    }
  } else {
    c.fail("controls", "missing required field");
  }

  std::optional<QuantumState> initial, target;
  if (j.contains("initial")) {
    initial = read_state(j["initial"], "initial", c);
  } else {
    c.fail("initial", "missing required field");
  }
  if (j.contains("target")) {
    target = read_state(j["target"], "target", c);
  } else {
    c.fail("target", "missing required field");
  }

  std::optional<PSpec> p_spec;
  if (j.contains("p")) {
    p_spec = read_p_spec(j["p"], c);
  } else {
    c.fail("p", "missing required field");
  }

  std::vector<double> gains;
  if (j.contains("gains")) {
    auto g = read_real_vector(j["gains"], "gains", c);
    if (g) {
      for (Eigen::Index i = 0; i < g->size(); ++i) {
        if (!((*g)[i] > 0.0) || !std::isfinite((*g)[i])) {
          std::ostringstream os;
          os << "entry " << i + 1 << " must be positive and finite, got "
             << (*g)[i];
          c.fail("gains", os.str());
        }
      }
      gains.assign(g->data(), g->data() + g->size());
    }
  } else {
    c.fail("gains", "missing required field");
  }

  std::vector<OddFunction> odd;
  if (j.contains("odd_functions")) {
    if (!j["odd_functions"].is_array()) {
      c.fail("odd_functions", "expected an array");
    } else {
      for (size_t k = 0; k < j["odd_functions"].size(); ++k) {
        std::ostringstream os;
        os << "odd_functions[" << k + 1 << "]";
        auto f = read_odd(j["odd_functions"][k], os.str(), c);
        if (f) {
          odd.push_back(*f);
        }
      }
    }
  }

  ControlMode mode = ControlMode::full;
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) {
      c.fail("mode", "must be a string");
    } else {
      auto m = control_mode_from_string(j["mode"].get<std::string>());
      if (!m) {
        c.fail("mode", "unknown mode \"" + j["mode"].get<std::string>() +
                           "\" (expected full, drop-target-term or "
                           "identity-p-half)");
      } else {
        mode = *m;
      }
    }
  }

  SimulationConfig sim;
  if (j.contains("simulation")) {
    const json& s = j["simulation"];
    if (!s.is_object()) {
      c.fail("simulation", "must be an object");
    } else {
      if (s.contains("dt")) {
        if (!s["dt"].is_number() || !(s["dt"].get<double>() > 0.0)) {
          c.fail("simulation.dt", "must be a positive number");
        } else {
          sim.dt = s["dt"].get<double>();
        }
      }
      if (s.contains("t_final")) {
        if (!s["t_final"].is_number() || !(s["t_final"].get<double>() >= 0.0)) {
          c.fail("simulation.t_final", "must be a nonnegative number");
        } else {
          sim.t_final = s["t_final"].get<double>();
        }
      } else {
        c.fail("simulation.t_final", "missing required field");
      }
      if (s.contains("record_stride")) {
        if (!s["record_stride"].is_number_integer() ||
            s["record_stride"].get<long>() < 1) {
          c.fail("simulation.record_stride", "must be an integer >= 1");
        } else {
          sim.record_stride = s["record_stride"].get<int>();
        }
      }
      if (s.contains("renormalize")) {
        if (!s["renormalize"].is_boolean()) {
          c.fail("simulation.renormalize", "must be a boolean");
        } else {
          sim.renormalize = s["renormalize"].get<bool>();
        }
      }
    }
  } else {
    c.fail("simulation", "missing required object (needs at least t_final)");
  }

  OutputNames outputs;
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    if (!o.is_object()) {
      c.fail("outputs", "must be an object");
    } else {
      auto grab = [&](const char* key, std::string& into) {
        if (o.contains(key)) {
          if (!o[key].is_string() || o[key].get<std::string>().empty()) {
            c.fail(std::string("outputs.") + key, "must be a nonempty string");
          } else {
            into = o[key].get<std::string>();
          }
        }
      };
      grab("trajectory_csv", outputs.trajectory_csv);
      grab("populations_svg", outputs.populations_svg);
      grab("lyapunov_svg", outputs.lyapunov_svg);
      grab("controls_svg", outputs.controls_svg);
      grab("report_txt", outputs.report_txt);
      grab("comparison_csv", outputs.comparison_csv);
      grab("comparison_svg", outputs.comparison_svg);
      grab("p_operator_json", outputs.p_operator_json);
    }
  }

  std::string notes;
  if (j.contains("notes")) {
    if (!j["notes"].is_string()) {
      c.fail("notes", "must be a string");
    } else {
      notes = j["notes"].get<std::string>();
    }
  }

  // Cross-field checks need the pieces; only run them when those parsed.
  if (h0 && controls_ok) {
    for (size_t k = 0; k < control_mats.size(); ++k) {
      if (control_mats[k].rows() != h0->rows()) {
        std::ostringstream os;
        os << "controls[" << k + 1 << "]";
        c.fail(os.str(), "dimension does not match h0");
        controls_ok = false;
      }
    }
  }
  if (h0 && initial && initial->dim() != h0->rows()) {
    c.fail("initial", "dimension does not match h0");
  }
  if (h0 && target && target->dim() != h0->rows()) {
    c.fail("target", "dimension does not match h0");
  }
  if (controls_ok && !gains.empty() &&
      gains.size() != control_mats.size()) {
    std::ostringstream os;
    os << "expected " << control_mats.size() << " entries (one per control), got "
       << gains.size();
    c.fail("gains", os.str());
  }
  if (odd.empty()) {
    odd.assign(std::max<size_t>(gains.size(), 1), OddFunction::identity());
  } else if (!gains.empty() && odd.size() != gains.size()) {
    std::ostringstream os;
    os << "expected " << gains.size() << " entries (one per gain), got "
       << odd.size();
    c.fail("odd_functions", os.str());
  }

  if (!c.errors.empty()) {
    result.errors = std::move(c.errors);
    result.warnings = std::move(c.warnings);
    return result;
  }

  try {
    std::optional<HermitianOperator> h0_op;
    try {
      h0_op.emplace(*h0);
    } catch (const ValidationError& e) {
      c.fail("h0", e.what());
    }
    std::vector<HermitianOperator> controls;
    controls.reserve(control_mats.size());
    for (size_t k = 0; k < control_mats.size(); ++k) {
      try {
        controls.emplace_back(control_mats[k]);
      } catch (const ValidationError& e) {
        std::ostringstream os;
        os << "controls[" << k + 1 << "]";
        c.fail(os.str(), e.what());
      }
    }
    if (!c.errors.empty()) {
      result.errors = std::move(c.errors);
      result.warnings = std::move(c.warnings);
      return result;
    }
    ControlledSystem system(std::move(*h0_op), std::move(controls), hbar);
    result.config = ExperimentConfig{std::move(system), *initial,    *target,
                                     *p_spec,           gains,       odd,
                                     mode,              sim,         outputs,
                                     notes};
  } catch (const ValidationError& e) {
    c.fail("config", e.what());
  }

  result.errors = std::move(c.errors);
  result.warnings = std::move(c.warnings);
  if (!result.errors.empty()) {
    result.config.reset();
  }
  return result;
}

ParseResult load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.errors.push_back("cannot open config file: " + path);
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg, int indent) {
  json j;
  j["hbar"] = cfg.system.hbar();
  j["h0"] = matrix_to_json(cfg.system.h0().mat());
  json controls = json::array();
  for (const auto& hk : cfg.system.controls()) {
    controls.push_back(matrix_to_json(hk.mat()));
  }
  j["controls"] = controls;
  j["initial"] = vector_to_json(cfg.initial.vec());
  j["target"] = vector_to_json(cfg.target.vec());

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ExplicitPSpec>) {
          j["p"] = {{"type", "explicit"}, {"matrix", matrix_to_json(s.matrix)}};
        } else if constexpr (std::is_same_v<T, CommutingPSpec>) {
          j["p"] = {{"type", "commuting"},
                    {"eigenvalues", real_vector_to_json(s.eigenvalues)}};
        } else if constexpr (std::is_same_v<T, SpectralPSpec>) {
          j["p"] = {{"type", "spectral"},
                    {"vectors", matrix_to_json(s.vectors.transpose())},
                    {"eigenvalues", real_vector_to_json(s.eigenvalues)}};
        } else {
          j["p"] = {{"type", "random"},
                    {"seed", s.seed},
                    {"min_offdiag", s.min_offdiag},
                    {"min_eigenvalue", s.min_eigenvalue}};
        }
      },
      cfg.p_spec);

  j["gains"] = json(cfg.gains);
  json odd = json::array();
  for (const auto& f : cfg.odd) {
    odd.push_back(odd_to_json(f));
  }
  j["odd_functions"] = odd;
  j["mode"] = to_string(cfg.mode);
  j["simulation"] = {{"dt", cfg.sim.dt},
                     {"t_final", cfg.sim.t_final},
                     {"record_stride", cfg.sim.record_stride},
                     {"renormalize", cfg.sim.renormalize}};
  j["outputs"] = {{"trajectory_csv", cfg.outputs.trajectory_csv},
                  {"populations_svg", cfg.outputs.populations_svg},
                  {"lyapunov_svg", cfg.outputs.lyapunov_svg},
                  {"controls_svg", cfg.outputs.controls_svg},
                  {"report_txt", cfg.outputs.report_txt},
                  {"comparison_csv", cfg.outputs.comparison_csv},
                  {"comparison_svg", cfg.outputs.comparison_svg},
                  {"p_operator_json", cfg.outputs.p_operator_json}};
  if (!cfg.notes.empty()) {
    j["notes"] = cfg.notes;
  }
  return j.dump(indent);
}

std::string serialize_p_operator(const HermitianOperator& p,
                                 const ControlledSystem& sys, int indent) {
  json j;
  j["type"] = "explicit";
  j["matrix"] = matrix_to_json(p.mat());
  j["eigenvalues"] = real_vector_to_json(eigendecompose(p).eigenvalues);
  const OffdiagonalCheck chk = check_offdiagonal_condition(p, sys);
  j["offdiagonal_check"] = {{"ok", chk.ok},
                            {"min_offdiagonal", chk.min_offdiagonal},
                            {"threshold", chk.threshold}};
  return j.dump(indent) + "\n";
}

}  // namespace qlyap
