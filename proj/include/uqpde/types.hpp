#ifndef UQPDE_TYPES_HPP
#define UQPDE_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uqpde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SpMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

/// Error type for all precondition, dimension and numerical failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& message) {
  if (!cond) throw Error(message);
}

/// Dimension check with a message naming expected and actual sizes.
inline void require_dim(Index expected, Index actual, const std::string& what) {
  if (expected != actual) {
    throw Error(what + ": expected size " + std::to_string(expected) +
                ", got " + std::to_string(actual));
  }
}

/// FNV-1a over raw bytes; used to key cached factorizations by parameter content.
inline std::uint64_t content_hash(const double* data, Index n) {
  std::uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (Index i = 0; i < n * static_cast<Index>(sizeof(double)); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t content_hash(const Vector& v) {
  return content_hash(v.data(), v.size());
}

}  // namespace uqpde

#endif
