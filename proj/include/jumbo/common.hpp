#ifndef JUMBO_COMMON_HPP
#define JUMBO_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jumbo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Thrown when linear algebra breaks down (failed Cholesky, singular
// precision, diverged training) as opposed to a caller mistake.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_finite(const VectorXd& v, const std::string& name) {
  if (!v.allFinite()) throw std::invalid_argument(name + " contains non-finite values");
}

inline void require_finite(const MatrixXd& m, const std::string& name) {
  if (!m.allFinite()) throw std::invalid_argument(name + " contains non-finite values");
}

// splitmix64, used to derive independent RNG streams from (seed, tag...)
// so that runs are reproducible and streams never alias across rounds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(seed) ^ a) ^ b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return std::mt19937_64(derive_seed(seed, a, b));
}

inline double median_of(std::vector<double> values) {
  require(!values.empty(), "median_of: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Standard error of the mean; zero for a single value.
inline double stderr_of(const std::vector<double>& values) {
  require(!values.empty(), "stderr_of: empty input");
  const std::size_t n = values.size();
  if (n == 1) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

}  // namespace jumbo

#endif
