#pragma once

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace causalflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Exact weight arithmetic for oracle-grade runs. Instance generators keep
// denominators dyadic so long long never overflows at desk scale.
using Exact = boost::rational<long long>;

inline double to_double(double w) { return w; }
inline double to_double(const Exact& w) {
  return static_cast<double>(w.numerator()) / static_cast<double>(w.denominator());
}

template <class W>
struct WeightTraits;

template <>
struct WeightTraits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  // Comparison slack for marginal/normalization checks.
  static double tol() { return 1e-9; }
};

template <>
struct WeightTraits<Exact> {
  static constexpr bool exact = true;
  static Exact zero() { return Exact(0); }
  static Exact one() { return Exact(1); }
  static Exact tol() { return Exact(0); }
};

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched particle count / spatial dimension between operands.
struct DimensionError : Error {
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// Malformed user input (files, flags, non-finite data, bad weights).
struct InputError : Error {
  explicit InputError(const std::string& msg) : Error(msg) {}
};

// A soft resource limit tripped (atom counts, joint-grid cell budget).
struct ResourceError : Error {
  explicit ResourceError(const std::string& msg) : Error(msg) {}
};

struct ModelParams {
  double c = 1.0;  // speed of light in box units
  int n = 3;       // spatial dimension per particle
  int N = 1;       // particle count

  void validate() const {
    if (!(c > 0.0)) throw InputError("ModelParams: c must be positive");
    if (n < 1) throw InputError("ModelParams: n must be >= 1");
    if (N < 1) throw InputError("ModelParams: N must be >= 1");
  }

  int config_dim() const { return n * N; }

  ModelParams single_particle() const { return ModelParams{c, n, 1}; }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.c == b.c && a.n == b.n && a.N == b.N;
  }
};

// Deterministic rounding to `digits` significant decimal digits. Used as the
// canonical atom-coordinate representation so that duplicate detection is a
// plain bitwise comparison.
inline double round_sig(double v, int digits = 12) {
  if (v == 0.0) return 0.0;
  if (!std::isfinite(v)) throw InputError("round_sig: non-finite coordinate");
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*e", digits - 1, v);
  return std::strtod(buf, nullptr);
}

inline Vec round_sig(const Vec& v, int digits = 12) {
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = round_sig(v[i], digits);
  return out;
}

// A point (t, x_1, ..., x_N) of the N-particle configuration spacetime,
// with the spatial blocks flattened into one vector of size n*N.
struct ConfigEvent {
  double t = 0.0;
  Vec x;

  ConfigEvent() = default;
  ConfigEvent(double time, Vec position) : t(time), x(std::move(position)) {}

  Eigen::VectorBlock<const Vec> particle(int j, int n) const {
    return x.segment(static_cast<Eigen::Index>(j) * n, n);
  }

  void check_dims(const ModelParams& params, const char* who) const {
    if (x.size() != params.config_dim())
      throw DimensionError(std::string(who) + ": event has " + std::to_string(x.size()) +
                           " coordinates, params require " + std::to_string(params.config_dim()));
    if (!std::isfinite(t) || !x.allFinite())
      throw InputError(std::string(who) + ": non-finite event coordinates");
  }

  friend bool operator==(const ConfigEvent& a, const ConfigEvent& b) {
    return a.t == b.t && a.x.size() == b.x.size() && a.x == b.x;
  }
};

}  // namespace causalflow
