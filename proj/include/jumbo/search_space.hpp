#ifndef JUMBO_SEARCH_SPACE_HPP
#define JUMBO_SEARCH_SPACE_HPP

#include <cmath>
#include <random>
#include <vector>

#include "jumbo/common.hpp"

namespace jumbo {

enum class VarKind { Continuous, Integer, Categorical };

// One search variable. Categorical variables occupy n_choices encoded
// coordinates (one-hot relaxation in [0,1] each); the others occupy one.
struct VarSpec {
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = 1.0;
  int n_choices = 0;

  static VarSpec continuous(double lo, double hi) {
    return {VarKind::Continuous, lo, hi, 0};
  }
  static VarSpec integer(double lo, double hi) {
    return {VarKind::Integer, lo, hi, 0};
  }
  static VarSpec categorical(int n) { return {VarKind::Categorical, 0.0, 1.0, n}; }

  Eigen::Index width() const {
    return kind == VarKind::Categorical ? n_choices : 1;
  }
};

struct SearchSpace {
  std::vector<VarSpec> vars;

  Eigen::Index encoded_dim() const {
    Eigen::Index d = 0;
    for (const VarSpec& v : vars) d += v.width();
    return d;
  }
};

inline void validate(const SearchSpace& space) {
  require(!space.vars.empty(), "search space has no variables");
  for (const VarSpec& v : space.vars) {
    if (v.kind == VarKind::Categorical) {
      require(v.n_choices >= 2, "categorical variable needs >= 2 choices");
    } else {
      require(std::isfinite(v.lo) && std::isfinite(v.hi) && v.lo < v.hi,
              "variable bounds must satisfy lo < hi");
      if (v.kind == VarKind::Integer)
        require(std::floor(v.lo) == v.lo && std::floor(v.hi) == v.hi,
                "integer variable bounds must be integers");
    }
  }
}

// Relaxed optimization box: [lo,hi] per continuous/integer coordinate,
// [0,1] per one-hot coordinate.
inline void space_box(const SearchSpace& space, VectorXd& lo, VectorXd& hi) {
  const Eigen::Index d = space.encoded_dim();
  lo.resize(d);
  hi.resize(d);
  Eigen::Index j = 0;
  for (const VarSpec& v : space.vars) {
    if (v.kind == VarKind::Categorical) {
      for (int c = 0; c < v.n_choices; ++c, ++j) {
        lo(j) = 0.0;
        hi(j) = 1.0;
      }
    } else {
      lo(j) = v.lo;
      hi(j) = v.hi;
      ++j;
    }
  }
}

// Deterministic rounding map from the relaxed box onto valid encoded
// points: continuous coordinates pass through, integers round half-up,
// one-hot blocks snap to the argmax coordinate (ties to the lowest index).
// Idempotent by construction.
inline VectorXd transform_encoded(const SearchSpace& space, const VectorXd& x) {
  validate(space);
  require(x.size() == space.encoded_dim(), "transform_encoded: dimension mismatch");
  require_finite(x, "x");
  VectorXd lo, hi;
  space_box(space, lo, hi);
  for (Eigen::Index j = 0; j < x.size(); ++j)
    require(x(j) >= lo(j) - 1e-9 && x(j) <= hi(j) + 1e-9,
            "transform_encoded: point outside the relaxed box");

  VectorXd out = x;
  Eigen::Index j = 0;
  for (const VarSpec& v : space.vars) {
    switch (v.kind) {
      case VarKind::Continuous:
        out(j) = std::min(v.hi, std::max(v.lo, x(j)));
        ++j;
        break;
      case VarKind::Integer:
        out(j) = std::min(v.hi, std::max(v.lo, std::floor(x(j) + 0.5)));
        ++j;
        break;
      case VarKind::Categorical: {
        Eigen::Index best = j;
        for (int c = 1; c < v.n_choices; ++c)
          if (x(j + c) > x(best)) best = j + c;
        for (int c = 0; c < v.n_choices; ++c) out(j + c) = 0.0;
        out(best) = 1.0;
        j += v.n_choices;
        break;
      }
    }
  }
  return out;
}

// Uniform sample in the relaxed box, snapped to a valid encoded point.
inline VectorXd sample_point(const SearchSpace& space, std::mt19937_64& rng) {
  VectorXd lo, hi;
  space_box(space, lo, hi);
  VectorXd x(lo.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    std::uniform_real_distribution<double> dist(lo(j), hi(j));
    x(j) = dist(rng);
  }
  return transform_encoded(space, x);
}

}  // namespace jumbo

#endif
