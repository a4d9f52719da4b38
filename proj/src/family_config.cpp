#include "infogeo/family_config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace infogeo {

namespace {

using nlohmann::json;

// A scalar hint expression over the parameter names, e.g. "1/p1".
std::function<double(const Vector&)> hint_fn(const json& j, const std::string& key,
                                             const std::vector<std::string>& params,
                                             double fallback) {
  if (!j.contains(key)) return [fallback](const Vector&) { return fallback; };
  std::string text = j.at(key).is_string() ? j.at(key).get<std::string>()
                                           : json(j.at(key)).dump();
  ExprAst ast = ExprAst::parse(text, params);
  return [ast](const Vector& lam) { return ast.eval(lam); };
}

std::vector<SampleAxis> axes_from_json(const json& j, const std::vector<std::string>& params) {
  if (!j.contains("sample_space") || !j.at("sample_space").is_array())
    throw Error("family config: missing sample_space array");
  std::vector<SampleAxis> axes;
  for (const json& axis : j.at("sample_space")) {
    std::string kind = axis.value("kind", "");
    if (kind == "finite") {
      std::vector<double> pts = axis.at("points").get<std::vector<double>>();
      axes.push_back(finite_axis(std::move(pts)));
    } else if (kind == "line") {
      axes.push_back(line_axis(hint_fn(axis, "center", params, 0.0),
                               hint_fn(axis, "scale", params, 1.0)));
    } else if (kind == "half-line") {
      axes.push_back(half_line_axis(hint_fn(axis, "scale", params, 1.0)));
    } else {
      throw Error("family config: unknown sample_space kind '" + kind + "'");
    }
  }
  return axes;
}

Integration integration_from_json(const json& j, Integration fallback) {
  if (!j.contains("integration")) return fallback;
  const json& ij = j.at("integration");
  Integration out = fallback;
  std::string method = ij.value("method", "");
  if (method == "exact-sum") out.method = Integration::Method::ExactSum;
  else if (method == "gauss-hermite") out.method = Integration::Method::GaussHermite;
  else if (method == "gauss-legendre") out.method = Integration::Method::GaussLegendre;
  else if (method == "monte-carlo") out.method = Integration::Method::MonteCarlo;
  else if (!method.empty()) throw Error("family config: unknown integration method '" + method + "'");
  out.n = ij.value("n", out.n);
  out.n_half_line = ij.value("n_half_line", out.n_half_line);
  out.seed = ij.value("seed", out.seed);
  return out;
}

FamilySpec from_json(const json& j) {
  std::string name = j.value("family", "");
  if (name == "gaussian") {
    FamilySpec f = gaussian_family();
    f.integration = integration_from_json(j, f.integration);
    return f;
  }
  if (name == "bernoulli-logit") {
    FamilySpec f = bernoulli_logit_family();
    f.integration = integration_from_json(j, f.integration);
    return f;
  }
  if (name == "categorical-softmax") {
    FamilySpec f = categorical_softmax_family(j.value("k", 2));
    f.integration = integration_from_json(j, f.integration);
    return f;
  }
  if (name == "exponential-rate") {
    FamilySpec f = exponential_rate_family();
    f.integration = integration_from_json(j, f.integration);
    return f;
  }
  if (name == "linear-reparam") {
    if (!j.contains("inner") || !j.contains("matrix"))
      throw Error("family config: linear-reparam needs 'inner' and 'matrix'");
    FamilySpec inner = from_json(j.at("inner"));
    auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw Error("family config: empty matrix");
    Matrix a(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) throw Error("family config: ragged matrix");
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        a(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
    FamilySpec f = linear_reparam(inner, a);
    f.integration = integration_from_json(j, f.integration);
    return f;
  }
  if (name == "exponential-family-natural") {
    std::vector<std::string> params = j.value("param_names", std::vector<std::string>{});
    if (params.empty()) throw Error("family config: param_names required");
    ExprAst psi = ExprAst::parse(j.value("psi", ""), params);
    std::vector<SampleAxis> axes = axes_from_json(j, params);
    ScalarField base;
    if (j.contains("log_base")) {
      std::vector<std::string> xvars;
      for (std::size_t i = 1; i <= axes.size(); ++i) xvars.push_back("x" + std::to_string(i));
      base = ExprAst::parse(j.at("log_base").get<std::string>(), xvars).field();
    }
    FamilySpec f = exp_family_natural(psi, std::move(axes), base);
    f.integration = integration_from_json(j, f.integration);
    return f;
  }
  if (name == "custom") {
    std::vector<std::string> params = j.value("param_names", std::vector<std::string>{});
    if (params.empty()) throw Error("family config: param_names required");
    std::vector<SampleAxis> axes = axes_from_json(j, params);
    std::vector<std::string> vars;
    for (std::size_t i = 1; i <= axes.size(); ++i) vars.push_back("x" + std::to_string(i));
    vars.insert(vars.end(), params.begin(), params.end());
    ExprAst density = ExprAst::parse(j.value("log_density", ""), vars);
    FamilySpec f;
    f.name = j.value("name", "custom");
    f.param_dim = static_cast<int>(params.size());
    f.param_names = params;
    f.axes = std::move(axes);
    f.log_density = density.field();
    bool continuous = false;
    for (const SampleAxis& ax : f.axes)
      if (ax.kind != AxisKind::Finite) continuous = true;
    f.integration.method =
        continuous ? Integration::Method::GaussHermite : Integration::Method::ExactSum;
    f.integration = integration_from_json(j, f.integration);
    return f;
  }
  throw Error("family config: unknown family '" + name + "'");
}

}  // namespace

FamilySpec family_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("family config: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

FamilySpec load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open family config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return family_from_json_text(ss.str());
}

}  // namespace infogeo
