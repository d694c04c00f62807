#include "ballop/types.hpp"

#include <Eigen/SVD>

namespace ballop {

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double min_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

}  // namespace ballop
