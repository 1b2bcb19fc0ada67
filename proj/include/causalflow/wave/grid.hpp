#pragma once

#include "causalflow/types.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace causalflow::wave {

// Periodic cubic grid for the single-particle fields. Sample points are
// x_i = -L/2 + i h per axis; wave numbers follow the usual DFT layout.
struct GridSpec {
  int M = 16;    // points per axis, power of two
  double L = 16.0;

  void validate() const {
    if (M < 4) throw InputError("GridSpec: M must be >= 4");
    if ((M & (M - 1)) != 0) throw InputError("GridSpec: M must be a power of two");
    if (!(L > 0.0)) throw InputError("GridSpec: L must be positive");
  }

  double h() const { return L / M; }
  Eigen::Index cells() const { return static_cast<Eigen::Index>(M) * M * M; }

  double coord(int i) const { return -0.5 * L + i * h(); }

  // Signed periodic displacement into [-L/2, L/2).
  double wrap(double dx) const {
    while (dx < -0.5 * L) dx += L;
    while (dx >= 0.5 * L) dx -= L;
    return dx;
  }

  double wavenumber(int i) const {
    const int f = (i <= M / 2 - 1) ? i : i - M;
    return 2.0 * M_PI * f / L;
  }

  Eigen::Index flat(int ix, int iy, int iz) const {
    return static_cast<Eigen::Index>(ix) + static_cast<Eigen::Index>(M) * (iy + static_cast<Eigen::Index>(M) * iz);
  }

  Eigen::Vector3d point(Eigen::Index flat_index) const {
    const int ix = static_cast<int>(flat_index % M);
    const int iy = static_cast<int>((flat_index / M) % M);
    const int iz = static_cast<int>(flat_index / (static_cast<Eigen::Index>(M) * M));
    return {coord(ix), coord(iy), coord(iz)};
  }

  Eigen::Vector3d wavevector(Eigen::Index flat_index) const {
    const int ix = static_cast<int>(flat_index % M);
    const int iy = static_cast<int>((flat_index / M) % M);
    const int iz = static_cast<int>(flat_index / (static_cast<Eigen::Index>(M) * M));
    return {wavenumber(ix), wavenumber(iy), wavenumber(iz)};
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) { return a.M == b.M && a.L == b.L; }
};

// In-place 3-D DFT of a flattened complex field, one 1-D pass per axis.
// forward: sum_x f e^{-ikx}; inverse carries the 1/M^3 normalization.
inline void fft3(const GridSpec& grid, Eigen::VectorXcd& field, bool forward) {
  const int M = grid.M;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line(static_cast<std::size_t>(M));
  std::vector<std::complex<double>> transformed(static_cast<std::size_t>(M));
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::Index stride = (axis == 0) ? 1 : (axis == 1) ? M : static_cast<Eigen::Index>(M) * M;
    for (int a = 0; a < M; ++a) {
      for (int b = 0; b < M; ++b) {
        // Base index of the line with the two non-axis coordinates (a, b).
        Eigen::Index base;
        if (axis == 0)
          base = grid.flat(0, a, b);
        else if (axis == 1)
          base = grid.flat(a, 0, b);
        else
          base = grid.flat(a, b, 0);
        for (int i = 0; i < M; ++i) line[static_cast<std::size_t>(i)] = field[base + i * stride];
        if (forward)
          fft.fwd(transformed, line);
        else
          fft.inv(transformed, line);
        for (int i = 0; i < M; ++i) field[base + i * stride] = transformed[static_cast<std::size_t>(i)];
      }
    }
  }
}

}  // namespace causalflow::wave
