// rng.hpp — seeded random generation with portable output: the engine is the
// fully specified std::mt19937_64, and all real-valued draws are derived by
// bit arithmetic (not std distributions, whose output is implementation
// defined). Identical seeds give identical streams on every platform.

#pragma once

#include "qcpo/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qcpo::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform on [0, 1) with 53 significant bits
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do { u = uniform(); } while (u == 0.0);
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Complex gaussian_complex() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im) / std::sqrt(2.0);
  }

  // independent child stream, deterministic in (parent seed, tag)
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return splitmix64(master ^ splitmix64(tag + 0x71c9u));
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline Matrix random_matrix(Generator& g, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = g.gaussian_complex();
  }
  return m;
}

inline Matrix random_hermitian(Generator& g, Index n) {
  return linalg::hermitize(random_matrix(g, n, n));
}

// Full-rank density matrix: G G† regularized and trace-normalized.
inline Matrix random_density(Generator& g, Index n, double regularize = 1e-3) {
  Matrix ggh = random_matrix(g, n, n);
  ggh = (ggh * ggh.adjoint() + regularize * Matrix::Identity(n, n)).eval();
  return ggh / ggh.trace().real();
}

inline Vector random_unit_vector(Generator& g, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g.gaussian_complex();
  return v / v.norm();
}

}  // namespace qcpo::rng
