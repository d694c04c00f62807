#include "ballop/certificate_json.hpp"

#include "ballop/error.hpp"

namespace ballop {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json vector_to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

json matrix_to_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_object() && j.contains("re")) return {j.at("re").get<double>(), j.value("im", 0.0)};
  throw Error(ErrorKind::InvalidArgument, "expected a complex number (number, [re, im] or {re, im}), got " + j.dump());
}

CVector vector_from_json(const json& j) {
  require(j.is_array(), ErrorKind::InvalidArgument, "expected an array for a vector, got " + j.dump());
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
  return v;
}

CMatrix matrix_from_json(const json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::InvalidArgument, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const CVector row = vector_from_json(j[static_cast<std::size_t>(r)]);
    require(row.size() == cols, ErrorKind::InvalidArgument, "matrix rows have different lengths");
    m.row(r) = row.transpose();
  }
  return m;
}

json space_to_json(const SpaceSpec& space) {
  json j{{"n", space.dim()}, {"D", space.cutoff()}};
  if (space.s()) {
    j["s"] = *space.s();
  } else {
    j["beta"] = space.betas();
  }
  return j;
}

json certificate_to_json(const ConjugationCertificate& cert) {
  json params{{"symbol", cert.symbol_kind}};
  if (cert.a.size()) params["a"] = vector_to_json(cert.a);
  if (cert.V.size()) params["V"] = matrix_to_json(cert.V);

  json residuals = json::array();
  for (const auto& r : cert.residuals) {
    residuals.push_back({{"name", r.name},
                         {"value", r.value},
                         {"exactness", std::string(to_string(r.exactness))},
                         {"threshold", r.threshold},
                         {"pass", r.pass()}});
  }
  return json{{"space", space_to_json(cert.space)},
              {"parameters", params},
              {"basis_size", cert.space.size()},
              {"probe_degree", cert.probe_degree},
              {"norm", cert.norm},
              {"residuals", residuals},
              {"diagnostics", cert.diagnostics},
              {"pass", cert.passed()},
              {"calibration_reference", cert.calibration_reference}};
}

}  // namespace ballop
