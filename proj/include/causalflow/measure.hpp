#pragma once

#include "causalflow/spacetime.hpp"
#include "causalflow/types.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace causalflow {

inline constexpr std::size_t kMaxAtomsPerSlice = 100000;

namespace detail {
// Lexicographic key for canonicalized coordinates; positions are rounded to
// 12 significant digits at construction so bitwise comparison is meaningful.
struct VecLess {
  bool operator()(const Vec& a, const Vec& b) const {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  }
};
}  // namespace detail

// A finitely-supported probability measure concentrated on the slice at time
// t. Positions are stored rowwise (atoms x n*N); weights are positive and sum
// to one. Duplicate positions are merged at construction.
template <class W>
struct SliceMeasure {
  double t = 0.0;
  ModelParams params;
  Mat positions;           // atoms x (n*N), canonically rounded
  std::vector<W> weights;  // positive, summing to one

  SliceMeasure() = default;

  SliceMeasure(double time, const ModelParams& p, const std::vector<Vec>& atom_positions,
               const std::vector<W>& atom_weights)
      : t(time), params(p) {
    params.validate();
    if (atom_positions.empty()) throw InputError("SliceMeasure: no atoms");
    if (atom_positions.size() != atom_weights.size())
      throw InputError("SliceMeasure: positions/weights size mismatch");
    if (atom_positions.size() > kMaxAtomsPerSlice)
      throw ResourceError("SliceMeasure: atom count " + std::to_string(atom_positions.size()) +
                          " exceeds soft limit " + std::to_string(kMaxAtomsPerSlice));

    std::map<Vec, W, detail::VecLess> merged;
    for (std::size_t i = 0; i < atom_positions.size(); ++i) {
      if (atom_positions[i].size() != params.config_dim())
        throw DimensionError("SliceMeasure: atom dimension mismatch");
      if (!(atom_weights[i] > WeightTraits<W>::zero()))
        throw InputError("SliceMeasure: weights must be positive");
      merged[round_sig(atom_positions[i])] += atom_weights[i];
    }

    positions.resize(static_cast<Eigen::Index>(merged.size()), params.config_dim());
    weights.reserve(merged.size());
    Eigen::Index r = 0;
    W total = WeightTraits<W>::zero();
    for (const auto& [pos, w] : merged) {
      positions.row(r++) = pos;
      weights.push_back(w);
      total += w;
    }
    check_normalized(total);
  }

  // Rescales arbitrary positive weights to total mass one (used when atoms
  // come from thresholded grid densities rather than exact constructions).
  static SliceMeasure normalized(double time, const ModelParams& p,
                                 const std::vector<Vec>& atom_positions, std::vector<W> atom_weights) {
    W total = WeightTraits<W>::zero();
    for (const auto& w : atom_weights) total += w;
    if (!(total > WeightTraits<W>::zero())) throw InputError("SliceMeasure: zero total mass");
    for (auto& w : atom_weights) w = w / total;
    return SliceMeasure(time, p, atom_positions, atom_weights);
  }

  Eigen::Index size() const { return positions.rows(); }

  ConfigEvent atom(Eigen::Index i) const { return ConfigEvent(t, positions.row(i)); }

  W total_mass() const {
    return std::accumulate(weights.begin(), weights.end(), WeightTraits<W>::zero());
  }

  friend bool operator==(const SliceMeasure& a, const SliceMeasure& b) {
    return a.t == b.t && a.params == b.params && a.positions.rows() == b.positions.rows() &&
           a.positions == b.positions && a.weights == b.weights;
  }

 private:
  void check_normalized(const W& total) const {
    if constexpr (WeightTraits<W>::exact) {
      if (total != WeightTraits<W>::one()) throw InputError("SliceMeasure: weights must sum to 1");
    } else {
      if (std::abs(to_double(total) - 1.0) > 1e-12)
        throw InputError("SliceMeasure: weights sum to " + std::to_string(to_double(total)) +
                         ", expected 1");
    }
  }
};

// Product of N single-particle measures on a common slice.
template <class W>
SliceMeasure<W> product_measure(double t, const std::vector<SliceMeasure<W>>& factors) {
  if (factors.empty()) throw InputError("product_measure: no factors");
  const int n = factors.front().params.n;
  const double c = factors.front().params.c;
  std::size_t count = 1;
  for (const auto& f : factors) {
    if (f.params.N != 1) throw DimensionError("product_measure: factors must be single-particle");
    if (f.params.n != n || f.params.c != c) throw DimensionError("product_measure: factor params differ");
    count *= static_cast<std::size_t>(f.size());
    if (count > kMaxAtomsPerSlice) throw ResourceError("product_measure: atom budget exceeded");
  }
  const ModelParams params{c, n, static_cast<int>(factors.size())};

  std::vector<Vec> pos;
  std::vector<W> wts;
  pos.reserve(count);
  wts.reserve(count);
  std::vector<Eigen::Index> idx(factors.size(), 0);
  while (true) {
    Vec x(params.config_dim());
    W w = WeightTraits<W>::one();
    for (std::size_t j = 0; j < factors.size(); ++j) {
      x.segment(static_cast<Eigen::Index>(j) * n, n) = factors[j].positions.row(idx[j]);
      w = w * factors[j].weights[static_cast<std::size_t>(idx[j])];
    }
    pos.push_back(std::move(x));
    wts.push_back(w);
    std::size_t j = factors.size();
    while (j > 0) {
      --j;
      if (++idx[j] < factors[j].size()) break;
      idx[j] = 0;
      if (j == 0) return SliceMeasure<W>(t, params, pos, wts);
    }
  }
}

// Averages the N! coordinate-block permutations of every atom. Idempotent;
// the result is invariant under any particle-index permutation.
template <class W>
SliceMeasure<W> symmetrize(const SliceMeasure<W>& mu) {
  const int N = mu.params.N;
  const int n = mu.params.n;
  if (N < 2) throw InputError("symmetrize: requires N >= 2");

  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t factorial = 1;
  for (int k = 2; k <= N; ++k) factorial *= static_cast<std::size_t>(k);
  if (static_cast<std::size_t>(mu.size()) * factorial > kMaxAtomsPerSlice)
    throw ResourceError("symmetrize: atom budget exceeded");

  const W inv_factorial = WeightTraits<W>::one() / static_cast<W>(static_cast<long long>(factorial));

  std::vector<Vec> pos;
  std::vector<W> wts;
  pos.reserve(static_cast<std::size_t>(mu.size()) * factorial);
  wts.reserve(pos.capacity());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Vec x(mu.params.config_dim());
      for (int j = 0; j < N; ++j)
        x.segment(static_cast<Eigen::Index>(j) * n, n) =
            mu.positions.row(i).segment(static_cast<Eigen::Index>(perm[j]) * n, n);
      pos.push_back(std::move(x));
      wts.push_back(mu.weights[static_cast<std::size_t>(i)] * inv_factorial);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return SliceMeasure<W>(mu.t, mu.params, pos, wts);
}

// Pushforward under (t, x_1..x_N) -> (t, x_j); weights of coinciding images
// are merged by the constructor. j is 1-based.
template <class W>
SliceMeasure<W> particle_marginal(const SliceMeasure<W>& mu, int j) {
  if (j < 1 || j > mu.params.N) throw InputError("particle_marginal: index out of range");
  std::vector<Vec> pos;
  std::vector<W> wts;
  pos.reserve(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    pos.push_back(mu.positions.row(i).segment(static_cast<Eigen::Index>(j - 1) * mu.params.n, mu.params.n));
    wts.push_back(mu.weights[static_cast<std::size_t>(i)]);
  }
  return SliceMeasure<W>(mu.t, mu.params.single_particle(), pos, wts);
}

// Mass of the atoms satisfying an arbitrary predicate on configuration events.
template <class W>
W measure_of_region(const SliceMeasure<W>& mu, const std::function<bool(const ConfigEvent&)>& contains) {
  W mass = WeightTraits<W>::zero();
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (contains(mu.atom(i))) mass += mu.weights[static_cast<std::size_t>(i)];
  return mass;
}

// Mass of the causal future of a compact region.
template <class W>
W mass_in_future(const SliceMeasure<W>& mu, const CompactRegion& K) {
  W mass = WeightTraits<W>::zero();
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (future_contains(K, mu.atom(i), mu.params)) mass += mu.weights[static_cast<std::size_t>(i)];
  return mass;
}

// An evolution of slice measures on a strictly increasing finite time grid.
template <class W>
struct Evolution {
  std::vector<SliceMeasure<W>> slices;

  Evolution() = default;
  explicit Evolution(std::vector<SliceMeasure<W>> s) : slices(std::move(s)) { validate(); }

  void validate() const {
    if (slices.empty()) throw InputError("Evolution: no slices");
    for (std::size_t k = 0; k + 1 < slices.size(); ++k) {
      if (!(slices[k].t < slices[k + 1].t)) throw InputError("Evolution: grid not strictly increasing");
      if (!(slices[k].params == slices[k + 1].params)) throw DimensionError("Evolution: params differ");
    }
  }

  std::vector<double> grid() const {
    std::vector<double> g;
    g.reserve(slices.size());
    for (const auto& s : slices) g.push_back(s.t);
    return g;
  }
};

}  // namespace causalflow
