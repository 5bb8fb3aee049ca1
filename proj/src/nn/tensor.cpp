#include "scdt/nn/tensor.hpp"

#include <stdexcept>
#include <string>

namespace scdt::nn {

void require_finite(const Matrix& m, const char* where) {
  if (!m.allFinite()) throw std::domain_error(std::string("non-finite values in ") + where);
}

void require_finite(const Sequence& s, const char* where) {
  for (const auto& m : s) require_finite(m, where);
}

}  // namespace scdt::nn
