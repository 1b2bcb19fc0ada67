#pragma once

#include "causalflow/causal_order.hpp"
#include "causalflow/measure.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace causalflow {

// A piecewise-linear N-particle path parametrized by coordinate time: one
// configuration per grid time, linearly interpolated in between. Linear
// interpolation preserves the per-segment cone bound pointwise.
struct Trajectory {
  std::vector<double> grid;
  Mat positions;  // grid.size() x (n*N)

  Vec position_at(double t) const {
    if (grid.empty()) throw InputError("Trajectory: empty grid");
    if (t < grid.front() || t > grid.back()) throw InputError("Trajectory: time outside grid span");
    std::size_t k = 0;
    while (k + 2 < grid.size() && t > grid[k + 1]) ++k;
    const double span = grid[k + 1] - grid[k];
    const double theta = (t - grid[k]) / span;
    return (1.0 - theta) * positions.row(static_cast<Eigen::Index>(k)).transpose() +
           theta * positions.row(static_cast<Eigen::Index>(k + 1)).transpose();
  }
};

inline bool trajectory_is_causal(const Trajectory& traj, const ModelParams& params, double slack = 0.0) {
  for (std::size_t k = 0; k + 1 < traj.grid.size(); ++k) {
    const double dt = traj.grid[k + 1] - traj.grid[k];
    if (dt < 0.0) return false;
    for (int j = 0; j < params.N; ++j) {
      const Eigen::Index off = static_cast<Eigen::Index>(j) * params.n;
      const double step = (traj.positions.row(static_cast<Eigen::Index>(k + 1)).segment(off, params.n) -
                           traj.positions.row(static_cast<Eigen::Index>(k)).segment(off, params.n))
                              .norm();
      if (step > params.c * dt + slack) return false;
    }
  }
  return true;
}

// A weighted finite family of causal trajectories on a shared grid; the
// discrete stand-in for a probability measure on the space of N-particle
// worldlines.
template <class W>
struct TrajectoryMeasure {
  ModelParams params;
  std::vector<double> grid;
  std::vector<Trajectory> trajectories;
  std::vector<W> weights;
  double pruned_mass = 0.0;     // total weight dropped during construction
  double prune_threshold = 0.0; // threshold used (0 in exact mode)

  std::size_t size() const { return trajectories.size(); }

  W total_mass() const {
    return std::accumulate(weights.begin(), weights.end(), WeightTraits<W>::zero());
  }
};

template <class W>
struct TrajectoryBuildFailure {
  std::size_t pair_index = 0;  // first infeasible consecutive slice pair (k, k+1)
  PrecedenceCertificate<W> certificate;
};

template <class W>
struct TrajectoryBuildResult {
  std::optional<TrajectoryMeasure<W>> sigma;
  std::optional<TrajectoryBuildFailure<W>> failure;
  bool ok() const { return sigma.has_value(); }
};

struct TrajectoryBuildOptions {
  double slack = 0.0;             // pair predicate slack passed to the coupling solver
  double prune_threshold = 1e-12; // float mode only; exact mode never prunes
};

// Reconstructs a trajectory measure from a causal evolution: couples each
// consecutive slice pair by transshipment, realizes coupled atom pairs as
// straight segments (causal in Minkowski by the segment criterion), and
// chains the couplings through interior slices by independent proportional
// splitting of each atom's incoming and outgoing mass. The pushforward of
// the result at every grid time reproduces the input slices. Fails with the
// offending pair's certificate as soon as one coupling is infeasible.
template <class W>
TrajectoryBuildResult<W> build_trajectory_measure(const Evolution<W>& evo,
                                                  const TrajectoryBuildOptions& opts = {}) {
  evo.validate();
  if (evo.slices.size() < 2) throw InputError("build_trajectory_measure: need at least 2 slices");
  const ModelParams params = evo.slices.front().params;

  TrajectoryBuildResult<W> result;
  std::vector<Coupling<W>> couplings;
  couplings.reserve(evo.slices.size() - 1);
  for (std::size_t k = 0; k + 1 < evo.slices.size(); ++k) {
    auto cert = precedes_measures(evo.slices[k], evo.slices[k + 1], opts.slack);
    if (!cert.yes) {
      result.failure = TrajectoryBuildFailure<W>{k, std::move(cert)};
      return result;
    }
    couplings.push_back(std::move(*cert.witness));
  }

  struct Path {
    std::vector<Eigen::Index> atoms;
    W weight;
  };

  std::vector<Path> paths;
  for (Eigen::Index i = 0; i < evo.slices.front().size(); ++i)
    paths.push_back({{i}, evo.slices.front().weights[static_cast<std::size_t>(i)]});

  const W prune_w = [&] {
    if constexpr (WeightTraits<W>::exact)
      return WeightTraits<W>::zero();
    else
      return opts.prune_threshold;
  }();
  double pruned_total = 0.0;

  for (const auto& coupling : couplings) {
    std::vector<std::vector<std::pair<Eigen::Index, W>>> outgoing(
        static_cast<std::size_t>(coupling.rows));
    std::vector<W> row_mass(static_cast<std::size_t>(coupling.rows), WeightTraits<W>::zero());
    for (const auto& e : coupling.entries) {
      outgoing[static_cast<std::size_t>(e.row)].emplace_back(e.col, e.weight);
      row_mass[static_cast<std::size_t>(e.row)] += e.weight;
    }

    std::vector<Path> next;
    next.reserve(paths.size());
    W kept = WeightTraits<W>::zero();
    for (auto& path : paths) {
      const auto row = static_cast<std::size_t>(path.atoms.back());
      for (const auto& [col, w] : outgoing[row]) {
        // Split the path's mass in proportion to the atom's outgoing coupling.
        W weight = path.weight * (w / row_mass[row]);
        if (!(weight > prune_w)) {
          pruned_total += to_double(weight);
          continue;
        }
        Path extended = path;
        extended.atoms.push_back(col);
        extended.weight = weight;
        kept += weight;
        next.push_back(std::move(extended));
      }
    }
    if (next.empty()) throw Error("build_trajectory_measure: all paths pruned");
    if constexpr (!WeightTraits<W>::exact) {
      const double scale = 1.0 / to_double(kept);
      for (auto& p : next) p.weight *= scale;
    }
    paths = std::move(next);
  }

  TrajectoryMeasure<W> sigma;
  sigma.params = params;
  sigma.grid = evo.grid();
  sigma.pruned_mass = pruned_total;
  sigma.prune_threshold = to_double(prune_w);
  sigma.trajectories.reserve(paths.size());
  sigma.weights.reserve(paths.size());
  for (const auto& path : paths) {
    Trajectory traj;
    traj.grid = sigma.grid;
    traj.positions.resize(static_cast<Eigen::Index>(path.atoms.size()), params.config_dim());
    for (std::size_t k = 0; k < path.atoms.size(); ++k)
      traj.positions.row(static_cast<Eigen::Index>(k)) = evo.slices[k].positions.row(path.atoms[k]);
    sigma.trajectories.push_back(std::move(traj));
    sigma.weights.push_back(path.weight);
  }
  result.sigma = std::move(sigma);
  return result;
}

// Evaluation pushforward at time t: every trajectory contributes its weight
// at its interpolated position; coinciding positions merge.
template <class W>
SliceMeasure<W> evaluate_pushforward(const TrajectoryMeasure<W>& sigma, double t) {
  if (sigma.trajectories.empty()) throw InputError("evaluate_pushforward: empty trajectory measure");
  if (t < sigma.grid.front() || t > sigma.grid.back())
    throw InputError("evaluate_pushforward: time outside grid span");
  std::vector<Vec> pos;
  pos.reserve(sigma.size());
  for (const auto& traj : sigma.trajectories) pos.push_back(traj.position_at(t));
  if constexpr (WeightTraits<W>::exact) {
    return SliceMeasure<W>(t, sigma.params, pos, sigma.weights);
  } else {
    // Float-mode path weights carry renormalization round-off; rescale.
    return SliceMeasure<W>::normalized(t, sigma.params, pos, sigma.weights);
  }
}

template <class W>
struct EvolutionCausalityReport {
  bool all_pass = true;
  // pass[s][t] for grid indices s < t; diagonal and lower triangle unused.
  std::vector<std::vector<char>> pass;
  std::vector<std::pair<std::size_t, std::size_t>> failures;
  std::optional<PrecedenceCertificate<W>> first_failure;
};

// Checks all ordered grid pairs, not just consecutive ones. Consecutive
// feasibility implies the rest by transitivity; checking everything doubles
// as a solver self-test.
template <class W>
EvolutionCausalityReport<W> verify_causal_evolution(const Evolution<W>& evo, double slack = 0.0) {
  evo.validate();
  const std::size_t m = evo.slices.size();
  EvolutionCausalityReport<W> report;
  report.pass.assign(m, std::vector<char>(m, 1));
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t t = s + 1; t < m; ++t) {
      auto cert = precedes_measures(evo.slices[s], evo.slices[t], slack);
      report.pass[s][t] = cert.yes ? 1 : 0;
      if (!cert.yes) {
        report.all_pass = false;
        report.failures.emplace_back(s, t);
        if (!report.first_failure) report.first_failure = std::move(cert);
      }
    }
  }
  return report;
}

}  // namespace causalflow
