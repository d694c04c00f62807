#pragma once

#include <json.hpp>

#include "ballop/symmetry.hpp"

namespace ballop {

/// Complex numbers serialize as [re, im]; vectors and matrices as nested arrays.
nlohmann::json complex_to_json(Complex z);
nlohmann::json vector_to_json(const CVector& v);
nlohmann::json matrix_to_json(const CMatrix& m);

/// Accepts a plain number, [re, im] or {"re": .., "im": ..}.
Complex complex_from_json(const nlohmann::json& j);
CVector vector_from_json(const nlohmann::json& j);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json space_to_json(const SpaceSpec& space);

/// Parameters, residuals with exactness flags and thresholds, pass/fail,
/// basis size, diagnostics and calibration reference. The candidate matrix
/// itself is omitted.
nlohmann::json certificate_to_json(const ConjugationCertificate& cert);

}  // namespace ballop
