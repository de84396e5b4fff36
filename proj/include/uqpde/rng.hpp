#ifndef UQPDE_RNG_HPP
#define UQPDE_RNG_HPP

#include "uqpde/types.hpp"

#include <random>
#include <string>

namespace uqpde {

/// Seeded random stream. Chains are reproducible per (algorithm id, seed);
/// the algorithm id is echoed into run metadata.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  static std::string algorithm() { return "mt19937_64/std-normal"; }

  std::uint64_t seed() const { return seed_; }

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal_(gen_);
    return v;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace uqpde

#endif
