#include "infogeo/report_json.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace infogeo {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json vector_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json tensor3_json(const Tensor3& t) {
  const int q = t.dim();
  ordered_json out = ordered_json::array();
  for (int i = 0; i < q; ++i) {
    ordered_json mat = ordered_json::array();
    for (int j = 0; j < q; ++j) {
      ordered_json row = ordered_json::array();
      for (int k = 0; k < q; ++k) row.push_back(t(i, j, k));
      mat.push_back(std::move(row));
    }
    out.push_back(std::move(mat));
  }
  return out;
}

ordered_json tensor4_json(const Tensor4& t) {
  const int q = t.dim();
  ordered_json out = ordered_json::array();
  for (int i = 0; i < q; ++i) {
    ordered_json cube = ordered_json::array();
    for (int j = 0; j < q; ++j) {
      ordered_json mat = ordered_json::array();
      for (int k = 0; k < q; ++k) {
        ordered_json row = ordered_json::array();
        for (int l = 0; l < q; ++l) row.push_back(t(i, j, k, l));
        mat.push_back(std::move(row));
      }
      cube.push_back(std::move(mat));
    }
    out.push_back(std::move(cube));
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json_line(const HessianReport& rep, const KahlerCheck* kahler) {
  ordered_json j;
  j["y"] = vector_json(rep.y);
  j["g"] = matrix_json(rep.g);
  j["gamma"] = tensor3_json(rep.gamma_lower);
  j["christoffel"] = tensor3_json(rep.christoffel);
  j["Q"] = tensor4_json(rep.Q);
  j["R"] = tensor4_json(rep.R);
  j["alpha"] = vector_json(rep.alpha);
  j["beta"] = matrix_json(rep.beta);
  j["c_fit"] = rep.c_fit;
  j["c_residual"] = rep.c_residual;
  j["einstein_lambda"] = rep.einstein_lambda;
  j["einstein_residual"] = rep.einstein_residual;
  j["codazzi_residual"] = rep.codazzi_residual;
  j["route_residuals"] = {{"Q", rep.q_route_residual},
                          {"alpha", rep.alpha_route_residual},
                          {"beta", rep.beta_route_residual}};
  j["ok"] = rep.route_checks_ok;
  if (kahler) {
    j["kahler_R_residual"] = kahler->r_residual;
    j["kahler_ricci_residual"] = kahler->ricci_residual;
    j["holo_sectional"] = kahler->holo_sectional;
  }
  return j.dump();
}

std::string report_csv_header(int q) {
  std::ostringstream os;
  for (int i = 1; i <= q; ++i) os << "y" << i << ",";
  os << "det_g,max_Q,max_R,c_fit,c_residual,einstein_lambda,einstein_residual,";
  for (int i = 1; i <= q; ++i) os << "alpha" << i << ",";
  os << "codazzi_residual,q_route_residual,kahler_R_residual,kahler_ricci_residual,"
        "holo_sectional,ok";
  return os.str();
}

std::string report_csv_row(const HessianReport& rep, const KahlerCheck* kahler) {
  std::ostringstream os;
  for (int i = 0; i < rep.y.size(); ++i) os << fmt(rep.y[i]) << ",";
  os << fmt(volume_det(rep.g)) << "," << fmt(max_abs(rep.Q)) << "," << fmt(max_abs(rep.R)) << ","
     << fmt(rep.c_fit) << "," << fmt(rep.c_residual) << "," << fmt(rep.einstein_lambda) << ","
     << fmt(rep.einstein_residual) << ",";
  for (int i = 0; i < rep.alpha.size(); ++i) os << fmt(rep.alpha[i]) << ",";
  os << fmt(rep.codazzi_residual) << "," << fmt(rep.q_route_residual) << ",";
  if (kahler) {
    os << fmt(kahler->r_residual) << "," << fmt(kahler->ricci_residual) << ","
       << fmt(kahler->holo_sectional) << ",";
  } else {
    os << ",,,";
  }
  os << (rep.route_checks_ok ? "1" : "0");
  return os.str();
}

}  // namespace infogeo
