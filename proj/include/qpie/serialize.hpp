#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpie/lpi_sdp.hpp"
#include "qpie/pde2pie.hpp"

namespace qpie {

using Json = nlohmann::json;

inline Json domain_to_json(const Interval& d) {
  return Json::array({to_string(d.a), to_string(d.b)});
}

inline Interval domain_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("domain must be [a, b]");
  auto endpoint = [](const Json& v) {
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    if (v.is_number_integer()) return Rat(v.get<long>());
    throw std::invalid_argument("domain endpoint must be rational");
  };
  return Interval(endpoint(j[0]), endpoint(j[1]));
}

inline Json poly_to_json(const RPoly& p) { return to_string(p); }

inline RPoly poly_from_json(const Json& j) {
  if (j.is_string()) return rpoly_from_string(j.get<std::string>());
  if (j.is_number_integer()) return pconst(Rat(j.get<long>()));
  throw std::invalid_argument("polynomial must be a text term sum");
}

inline Json op_to_json(const RPIOp& op) {
  Json j;
  j["rows"] = op.rows;
  j["cols"] = op.cols;
  j["domain"] = domain_to_json(op.dom);
  auto kernels = [&](const std::vector<RPoly>& K) {
    Json m = Json::array();
    for (int r = 0; r < op.rows; ++r) {
      Json row = Json::array();
      for (int c = 0; c < op.cols; ++c)
        row.push_back(poly_to_json(K[r * op.cols + c]));
      m.push_back(row);
    }
    return m;
  };
  j["R0"] = kernels(op.R0);
  j["R1"] = kernels(op.R1);
  j["R2"] = kernels(op.R2);
  return j;
}

inline RPIOp op_from_json(const Json& j) {
  int rows = j.at("rows").get<int>();
  int cols = j.at("cols").get<int>();
  RPIOp op(rows, cols, domain_from_json(j.at("domain")));
  auto kernels = [&](const Json& m, std::vector<RPoly>& K) {
    if (static_cast<int>(m.size()) != rows)
      throw std::invalid_argument("kernel matrix has wrong row count");
    for (int r = 0; r < rows; ++r) {
      if (static_cast<int>(m[r].size()) != cols)
        throw std::invalid_argument("kernel matrix has wrong column count");
      for (int c = 0; c < cols; ++c) K[r * cols + c] = poly_from_json(m[r][c]);
    }
  };
  kernels(j.at("R0"), op.R0);
  kernels(j.at("R1"), op.R1);
  kernels(j.at("R2"), op.R2);
  return op;
}

inline Json tensor_to_json(const RTensorPIOp& B) {
  Json j;
  j["domain"] = domain_to_json(B.dom);
  j["B1"] = poly_to_json(B.B1);
  j["B2"] = poly_to_json(B.B2);
  j["B3"] = poly_to_json(B.B3);
  return j;
}

inline RTensorPIOp tensor_from_json(const Json& j) {
  return RTensorPIOp(domain_from_json(j.at("domain")),
                     poly_from_json(j.at("B1")), poly_from_json(j.at("B2")),
                     poly_from_json(j.at("B3")));
}

inline Json functional_to_json(const RSimplexFunctional& K) {
  Json j;
  j["domain"] = domain_to_json(K.dom);
  j["K"] = poly_to_json(K.K);
  return j;
}

inline RSimplexFunctional functional_from_json(const Json& j) {
  return RSimplexFunctional(domain_from_json(j.at("domain")),
                            poly_from_json(j.at("K")));
}

inline Json pde_to_json(const PDESpec& spec) {
  Json j;
  j["order"] = spec.N;
  j["domain"] = domain_to_json(spec.dom);
  Json alpha = Json::array();
  for (const RPoly& p : spec.alpha) alpha.push_back(poly_to_json(p));
  j["alpha"] = alpha;
  Json beta = Json::array();
  for (const auto& [bi, bj, bp] : spec.beta)
    beta.push_back(Json::array({bi, bj, poly_to_json(bp)}));
  j["beta"] = beta;
  Json bc = Json::array();
  for (const auto& row : spec.bc) {
    Json r = Json::array();
    for (const Rat& x : row) r.push_back(to_string(x));
    bc.push_back(r);
  }
  j["bc"] = bc;
  return j;
}

inline PDESpec pde_from_json(const Json& j) {
  PDESpec spec;
  spec.N = j.at("order").get<int>();
  spec.dom = domain_from_json(j.at("domain"));
  for (const Json& p : j.at("alpha")) spec.alpha.push_back(poly_from_json(p));
  if (j.contains("beta"))
    for (const Json& t : j.at("beta")) {
      if (!t.is_array() || t.size() != 3)
        throw std::invalid_argument("beta entries are [i, j, poly]");
      spec.beta.emplace_back(t[0].get<int>(), t[1].get<int>(),
                             poly_from_json(t[2]));
    }
  for (const Json& row : j.at("bc")) {
    std::vector<Rat> r;
    for (const Json& x : row)
      r.push_back(x.is_string() ? rat_from_string(x.get<std::string>())
                                : Rat(x.get<long>()));
    spec.bc.push_back(std::move(r));
  }
  spec.validate();
  return spec;
}

inline Json stats_to_json(const SolverStats& st) {
  Json j;
  j["solver_code"] = st.raw_code;
  j["iterations"] = st.iterations;
  j["primal_residual"] = st.r_prim;
  j["dual_residual"] = st.r_dual;
  j["margin"] = st.margin;
  j["conversion_error"] = st.conversion_error;
  return j;
}

inline Json certificate_to_json(const Certificate& cert,
                                const CertificateCheck* check = nullptr,
                                const SolverStats* stats = nullptr) {
  Json j;
  j["P"] = op_to_json(cert.P);
  j["eps"] = to_string(cert.eps);
  j["delta"] = to_string(cert.delta);
  j["mu"] = cert.mu;
  j["decay_rate"] = cert.decay_rate;
  j["transient_bound"] = cert.transient;
  if (check) {
    Json r;
    r["min_rayleigh_positivity"] = check->min_rayleigh_pos;
    r["min_rayleigh_negativity"] = check->min_rayleigh_neg;
    r["max_cubic_coefficient"] = check->max_klin_coeff;
    r["pass"] = check->pass;
    j["residuals"] = r;
  }
  if (stats) j["solver"] = stats_to_json(*stats);
  return j;
}

inline Certificate certificate_from_json(const Json& j) {
  RPIOp P = op_from_json(j.at("P"));
  Certificate cert;
  cert.dom = P.dom;
  cert.P = P;
  cert.eps = rat_from_string(j.at("eps").get<std::string>());
  cert.delta = rat_from_string(j.at("delta").get<std::string>());
  cert.mu = norm_bound(cert.P);
  cert.decay_rate = to_double(cert.delta) / cert.mu;
  cert.transient = cert.mu / to_double(cert.eps);
  return cert;
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

inline void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace qpie
