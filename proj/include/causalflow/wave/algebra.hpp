#pragma once

#include "causalflow/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <random>

namespace causalflow::wave {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix3c = Eigen::Matrix3cd;
using Matrix4c = Eigen::Matrix4cd;
using Matrix6c = Eigen::Matrix<Complex, 6, 6>;
using Vector3c = Eigen::Vector3cd;
using Vector4c = Eigen::Vector4cd;
using Vector6c = Eigen::Matrix<Complex, 6, 1>;

enum class Species { photon, fermion };

inline int components(Species s) { return s == Species::photon ? 6 : 4; }

// Spin-1 rotation generators: (S_k)_{lm} = -i eps_{klm}.
inline const std::array<Matrix3c, 3>& spin1() {
  static const std::array<Matrix3c, 3> s = [] {
    const Complex i(0.0, 1.0);
    std::array<Matrix3c, 3> m;
    m[0] << 0, 0, 0, 0, 0, -i, 0, i, 0;
    m[1] << 0, 0, i, 0, 0, 0, -i, 0, 0;
    m[2] << 0, -i, 0, i, 0, 0, 0, 0, 0;
    return m;
  }();
  return s;
}

inline const std::array<Matrix2c, 3>& pauli() {
  static const std::array<Matrix2c, 3> s = [] {
    const Complex i(0.0, 1.0);
    std::array<Matrix2c, 3> m;
    m[0] << 0, 1, 1, 0;
    m[1] << 0, -i, i, 0;
    m[2] << 1, 0, 0, -1;
    return m;
  }();
  return s;
}

// Chiral-basis gamma matrices: gamma^0 off-diagonal identities, gamma^k
// off-diagonal +/- sigma^k.
inline Matrix4c gamma0() {
  Matrix4c g = Matrix4c::Zero();
  g.block<2, 2>(0, 2) = Matrix2c::Identity();
  g.block<2, 2>(2, 0) = Matrix2c::Identity();
  return g;
}

inline Matrix4c gamma_spatial(int k) {
  Matrix4c g = Matrix4c::Zero();
  g.block<2, 2>(0, 2) = pauli()[static_cast<std::size_t>(k)];
  g.block<2, 2>(2, 0) = -pauli()[static_cast<std::size_t>(k)];
  return g;
}

// Velocity operators entering the probability current: block-diagonal
// spin projections for the photon, gamma^0 gamma^k for the fermion.
inline Matrix6c photon_velocity_matrix(int k) {
  Matrix6c m = Matrix6c::Zero();
  m.block<3, 3>(0, 0) = spin1()[static_cast<std::size_t>(k)];
  m.block<3, 3>(3, 3) = -spin1()[static_cast<std::size_t>(k)];
  return m;
}

inline Matrix4c fermion_velocity_matrix(int k) { return gamma0() * gamma_spatial(k); }

// Fourier symbols of the two Hamiltonians (hbar = 1): the photon transport
// generator splits into helicity blocks +/- c S.k, the fermion one is
// c gamma^0 gamma.k + m c^2 gamma^0.
inline Matrix6c photon_hamiltonian_symbol(const Eigen::Vector3d& k, double c) {
  Matrix3c sk = Matrix3c::Zero();
  for (int a = 0; a < 3; ++a) sk += k[a] * spin1()[static_cast<std::size_t>(a)];
  Matrix6c h = Matrix6c::Zero();
  h.block<3, 3>(0, 0) = c * sk;
  h.block<3, 3>(3, 3) = -c * sk;
  return h;
}

inline Matrix4c fermion_hamiltonian_symbol(const Eigen::Vector3d& k, double c, double mass) {
  Matrix4c h = Matrix4c::Zero();
  for (int a = 0; a < 3; ++a) h += c * k[a] * fermion_velocity_matrix(a);
  h += mass * c * c * gamma0();
  return h;
}

// exp(-i theta S.khat) restricted to C^3: the complexified axis rotation.
// Uses (S.khat)^3 = S.khat and (S.khat)u = i khat x u.
inline Vector3c rotate_block(const Vector3c& u, const Eigen::Vector3d& khat, double theta) {
  const Vector3c khat_c = khat.cast<Complex>();
  const Vector3c cross = khat_c.cross(u);
  const Complex axial = khat_c.dot(u);  // plain sum, khat is real
  return std::cos(theta) * u + std::sin(theta) * cross + (1.0 - std::cos(theta)) * axial * khat_c;
}

// Exact free propagator exp(-i H(k) dt) for one wave vector.
inline Vector6c photon_propagate(const Vector6c& f, const Eigen::Vector3d& k, double c, double dt) {
  const double knorm = k.norm();
  if (knorm == 0.0) return f;
  const Eigen::Vector3d khat = k / knorm;
  const double theta = c * knorm * dt;
  Vector6c out;
  out.head<3>() = rotate_block(f.head<3>(), khat, theta);
  out.tail<3>() = rotate_block(f.tail<3>(), khat, -theta);
  return out;
}

inline Vector4c fermion_propagate(const Vector4c& z, const Eigen::Vector3d& k, double c, double mass,
                                  double dt) {
  const double energy = std::hypot(c * k.norm(), mass * c * c);
  if (energy == 0.0) return z;
  // H^2 = E^2, so exp(-i H dt) = cos(E dt) - i sin(E dt) H / E.
  Matrix2c sk = Matrix2c::Zero();
  for (int a = 0; a < 3; ++a) sk += k[a] * pauli()[static_cast<std::size_t>(a)];
  const Eigen::Vector2cd za = z.head<2>(), zb = z.tail<2>();
  Vector4c hz;
  hz.head<2>() = -c * (sk * za) + mass * c * c * zb;
  hz.tail<2>() = c * (sk * zb) + mass * c * c * za;
  const double phase = energy * dt;
  const Complex minus_i_sin(0.0, -std::sin(phase));
  return std::cos(phase) * z + (minus_i_sin / energy) * hz;
}

// Left-hand minus right-hand side of the current-speed inequalities; both
// are <= 0 for every input, which is what bounds the velocity fields by c.
inline double photon_subluminality_residual(const Vector3c& u, const Vector3c& w) {
  double lhs = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double term = (u.dot(spin1()[static_cast<std::size_t>(k)] * u) -
                         w.dot(spin1()[static_cast<std::size_t>(k)] * w))
                            .real();
    lhs += term * term;
  }
  const double rhs = u.squaredNorm() + w.squaredNorm();
  return lhs - rhs * rhs;
}

inline double fermion_subluminality_residual(const Vector4c& z) {
  double lhs = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double term = z.dot(fermion_velocity_matrix(k) * z).real();
    lhs += term * term;
  }
  const double rhs = z.squaredNorm();
  return lhs - rhs * rhs;
}

// (z'z)^2 - sum_k (z'g0gk z)^2 equals 4 |z0 conj(z2) + z1 conj(z3)|^2 in the
// chiral basis; returns the difference of the two sides.
inline double fermion_chiral_identity_residual(const Vector4c& z) {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double term = z.dot(fermion_velocity_matrix(k) * z).real();
    sum += term * term;
  }
  const double rhs = z.squaredNorm();
  const Complex cross = z[0] * std::conj(z[2]) + z[1] * std::conj(z[3]);
  return (rhs * rhs - sum) - 4.0 * std::norm(cross);
}

struct SubluminalityReport {
  double max_relative_residual = 0.0;      // max (lhs - rhs)/rhs, should be <= 0 + eps
  double max_identity_residual = 0.0;      // fermion only, relative
  std::size_t samples = 0;
};

// Randomized sweep of the algebraic inequalities underpinning the speed
// bound. Returns relative residuals (normalized by the right-hand side).
inline SubluminalityReport check_subluminality_algebra(Species species, std::size_t samples,
                                                       std::mt19937_64& rng) {
  if (samples < 1) throw InputError("check_subluminality_algebra: need samples >= 1");
  std::uniform_real_distribution<double> comp(-1.0, 1.0);
  const auto draw3 = [&] {
    Vector3c v;
    for (int i = 0; i < 3; ++i) v[i] = Complex(comp(rng), comp(rng));
    return v;
  };
  const auto draw4 = [&] {
    Vector4c v;
    for (int i = 0; i < 4; ++i) v[i] = Complex(comp(rng), comp(rng));
    return v;
  };

  SubluminalityReport report;
  report.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    if (species == Species::photon) {
      const Vector3c u = draw3(), w = draw3();
      const double rhs = u.squaredNorm() + w.squaredNorm();
      if (rhs == 0.0) continue;
      report.max_relative_residual =
          std::max(report.max_relative_residual, photon_subluminality_residual(u, w) / (rhs * rhs));
    } else {
      const Vector4c z = draw4();
      const double rhs = z.squaredNorm();
      if (rhs == 0.0) continue;
      report.max_relative_residual =
          std::max(report.max_relative_residual, fermion_subluminality_residual(z) / (rhs * rhs));
      report.max_identity_residual = std::max(
          report.max_identity_residual, std::abs(fermion_chiral_identity_residual(z)) / (rhs * rhs));
    }
  }
  return report;
}

}  // namespace causalflow::wave
