#pragma once

#include "causalflow/maxflow.hpp"
#include "causalflow/measure.hpp"
#include "causalflow/spacetime.hpp"

#include <optional>
#include <random>
#include <vector>

namespace causalflow {

inline constexpr std::size_t kMaxCausalPairs = 50000000;

// Nonnegative weights on atom pairs witnessing mu <= nu: row sums reproduce
// mu's weights, column sums nu's, and every positive entry joins a causally
// related pair.
template <class W>
struct Coupling {
  struct Entry {
    Eigen::Index row, col;
    W weight;
  };
  double t_mu = 0.0, t_nu = 0.0;
  Eigen::Index rows = 0, cols = 0;
  std::vector<Entry> entries;
};

template <class W>
struct PrecedenceCertificate {
  bool yes = false;
  W flow = WeightTraits<W>::zero();
  std::optional<Coupling<W>> witness;               // present on yes (flow decision)
  std::optional<std::vector<Eigen::Index>> violator;  // mu-atom indices, present on no
  W violator_mass = WeightTraits<W>::zero();        // mu(S)
  W violator_future_mass = WeightTraits<W>::zero(); // nu(J+(S))
};

namespace detail {

template <class W>
void require_compatible(const SliceMeasure<W>& mu, const SliceMeasure<W>& nu, const char* who) {
  if (!(mu.params == nu.params)) throw DimensionError(std::string(who) + ": parameter mismatch");
  if (mu.size() == 0 || nu.size() == 0) throw InputError(std::string(who) + ": empty measure");
}

// eta == 0 gives the exact predicate.
inline bool atoms_causal(const Mat& mu_pos, Eigen::Index i, double mu_t, const Mat& nu_pos,
                         Eigen::Index j, double nu_t, const ModelParams& params, double eta) {
  const double dt = nu_t - mu_t;
  if (dt < 0.0) return false;
  if (eta == 0.0) {
    const double reach2 = params.c * dt * (params.c * dt);
    for (int p = 0; p < params.N; ++p) {
      const Eigen::Index off = static_cast<Eigen::Index>(p) * params.n;
      if ((nu_pos.row(j).segment(off, params.n) - mu_pos.row(i).segment(off, params.n)).squaredNorm() >
          reach2)
        return false;
    }
    return true;
  }
  const double reach = params.c * dt + eta;
  for (int p = 0; p < params.N; ++p) {
    const Eigen::Index off = static_cast<Eigen::Index>(p) * params.n;
    if ((nu_pos.row(j).segment(off, params.n) - mu_pos.row(i).segment(off, params.n)).norm() > reach)
      return false;
  }
  return true;
}

}  // namespace detail

// Decides mu <= nu by transshipment feasibility: a source feeding mu's atoms,
// a sink drained by nu's atoms, and an uncapacitated edge for every causally
// related atom pair. The verdict is yes iff the maximum flow carries the whole
// unit mass; the flow then is a causal coupling, and otherwise the residual
// min cut yields a mu-atom subset S with mu(S) > nu(J+(S)).
//
// `slack` relaxes the pair predicate additively (used on PDE-discretized
// data); the default 0 is the exact decision.
template <class W>
PrecedenceCertificate<W> precedes_measures(const SliceMeasure<W>& mu, const SliceMeasure<W>& nu,
                                           double slack = 0.0) {
  detail::require_compatible(mu, nu, "precedes_measures");
  const Eigen::Index m = mu.size(), k = nu.size();
  if (static_cast<std::size_t>(m) * static_cast<std::size_t>(k) > kMaxCausalPairs)
    throw ResourceError("precedes_measures: causal pair budget exceeded");

  MaxFlow<W> flow(static_cast<int>(m + k) + 2);
  const int source = 0, sink = static_cast<int>(m + k) + 1;
  std::vector<typename MaxFlow<W>::EdgeRef> pair_edges;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pair_index;

  for (Eigen::Index i = 0; i < m; ++i)
    flow.add_edge(source, static_cast<int>(i) + 1, mu.weights[static_cast<std::size_t>(i)]);
  for (Eigen::Index j = 0; j < k; ++j)
    flow.add_edge(static_cast<int>(m + j) + 1, sink, nu.weights[static_cast<std::size_t>(j)]);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (detail::atoms_causal(mu.positions, i, mu.t, nu.positions, j, nu.t, mu.params, slack)) {
        // Unit capacity suffices as "infinite": no edge can carry more mass.
        pair_edges.push_back(flow.add_edge(static_cast<int>(i) + 1, static_cast<int>(m + j) + 1,
                                           WeightTraits<W>::one()));
        pair_index.emplace_back(i, j);
      }
    }
  }

  PrecedenceCertificate<W> cert;
  cert.flow = flow.run(source, sink);
  if constexpr (WeightTraits<W>::exact) {
    cert.yes = (cert.flow == WeightTraits<W>::one());
  } else {
    cert.yes = (to_double(cert.flow) >= 1.0 - 1e-9);
  }

  if (cert.yes) {
    Coupling<W> witness;
    witness.t_mu = mu.t;
    witness.t_nu = nu.t;
    witness.rows = m;
    witness.cols = k;
    for (std::size_t e = 0; e < pair_edges.size(); ++e) {
      W f = flow.edge_flow(pair_edges[e]);
      if (f > WeightTraits<W>::zero())
        witness.entries.push_back({pair_index[e].first, pair_index[e].second, f});
    }
    cert.witness = std::move(witness);
  } else {
    // Atoms are stored lexicographically sorted, so the residual BFS (and
    // hence the reported cut) is deterministic.
    const std::vector<char> reach = flow.min_cut_side();
    std::vector<Eigen::Index> violator;
    for (Eigen::Index i = 0; i < m; ++i)
      if (reach[static_cast<std::size_t>(i) + 1]) violator.push_back(i);
    for (Eigen::Index i : violator) cert.violator_mass += mu.weights[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j) {
      bool in_future = false;
      for (Eigen::Index i : violator) {
        if (detail::atoms_causal(mu.positions, i, mu.t, nu.positions, j, nu.t, mu.params, slack)) {
          in_future = true;
          break;
        }
      }
      if (in_future) cert.violator_future_mass += nu.weights[static_cast<std::size_t>(j)];
    }
    cert.violator = std::move(violator);
  }
  return cert;
}

// Independent oracle: checks mu(S) <= nu(J+(S)) for every subset S of mu's
// atoms by explicit enumeration. Exponential; guarded by max_atoms. Subsets
// are scanned in increasing bitmask order over the lexicographically sorted
// atoms, so the first violator reported is deterministic. A yes verdict
// carries no witness (this check never builds a coupling).
template <class W>
PrecedenceCertificate<W> oracle_subset_condition(const SliceMeasure<W>& mu, const SliceMeasure<W>& nu,
                                                 int max_atoms = 20, double slack = 0.0) {
  detail::require_compatible(mu, nu, "oracle_subset_condition");
  const Eigen::Index m = mu.size(), k = nu.size();
  if (m > max_atoms)
    throw ResourceError("oracle_subset_condition: " + std::to_string(m) + " atoms exceed guard " +
                        std::to_string(max_atoms));

  std::vector<std::vector<char>> causal(static_cast<std::size_t>(m),
                                        std::vector<char>(static_cast<std::size_t>(k), 0));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      causal[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          detail::atoms_causal(mu.positions, i, mu.t, nu.positions, j, nu.t, mu.params, slack);

  PrecedenceCertificate<W> cert;
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << m); ++mask) {
    W mu_mass = WeightTraits<W>::zero();
    for (Eigen::Index i = 0; i < m; ++i)
      if (mask & (std::uint64_t(1) << i)) mu_mass += mu.weights[static_cast<std::size_t>(i)];
    W nu_mass = WeightTraits<W>::zero();
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) {
        if ((mask & (std::uint64_t(1) << i)) && causal[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
          nu_mass += nu.weights[static_cast<std::size_t>(j)];
          break;
        }
      }
    }
    const bool violated = WeightTraits<W>::exact
                              ? (mu_mass > nu_mass)
                              : (to_double(mu_mass) > to_double(nu_mass) + 1e-9);
    if (violated) {
      std::vector<Eigen::Index> violator;
      for (Eigen::Index i = 0; i < m; ++i)
        if (mask & (std::uint64_t(1) << i)) violator.push_back(i);
      cert.yes = false;
      cert.violator = std::move(violator);
      cert.violator_mass = mu_mass;
      cert.violator_future_mass = nu_mass;
      return cert;
    }
  }
  cert.yes = true;
  cert.flow = WeightTraits<W>::one();
  return cert;
}

template <class W>
struct FutureSetCheck {
  CompactRegion region;
  W mu_mass = WeightTraits<W>::zero();
  W nu_mass = WeightTraits<W>::zero();
  bool pass = false;
};

// Necessary condition via future-set masses: mu(J+(K)) <= nu(J+(K)) for each
// supplied compact. A failure refutes mu <= nu; passes prove nothing.
template <class W>
std::vector<FutureSetCheck<W>> check_future_set_condition(const SliceMeasure<W>& mu,
                                                          const SliceMeasure<W>& nu,
                                                          const std::vector<CompactRegion>& regions) {
  detail::require_compatible(mu, nu, "check_future_set_condition");
  std::vector<FutureSetCheck<W>> out;
  out.reserve(regions.size());
  for (const auto& K : regions) {
    FutureSetCheck<W> chk;
    chk.region = K;
    chk.mu_mass = mass_in_future(mu, K);
    chk.nu_mass = mass_in_future(nu, K);
    if constexpr (WeightTraits<W>::exact)
      chk.pass = !(chk.mu_mass > chk.nu_mass);
    else
      chk.pass = to_double(chk.mu_mass) <= to_double(chk.nu_mass) + 1e-9;
    out.push_back(std::move(chk));
  }
  return out;
}

// The same inequalities read through bounded causal functions: for the
// indicator tau_K of a future set, the integral of tau_K against a slice
// measure is exactly the future-set mass, so this check is numerically the
// integral form of check_future_set_condition.
template <class W>
std::vector<bool> check_causal_function_condition(const SliceMeasure<W>& mu, const SliceMeasure<W>& nu,
                                                  const std::vector<CompactRegion>& regions) {
  detail::require_compatible(mu, nu, "check_causal_function_condition");
  std::vector<bool> out;
  out.reserve(regions.size());
  for (const auto& K : regions) {
    const auto tau = [&](const ConfigEvent& e) { return future_contains(K, e, mu.params); };
    const W mu_integral = measure_of_region(mu, tau);
    const W nu_integral = measure_of_region(nu, tau);
    if constexpr (WeightTraits<W>::exact)
      out.push_back(!(mu_integral > nu_integral));
    else
      out.push_back(to_double(mu_integral) <= to_double(nu_integral) + 1e-9);
  }
  return out;
}

// Flat-slice monotonicity: the future of the hyperplane at time s carries
// mu-mass 1 iff s <= mu.t, so the cumulative comparison over all s reduces
// to the time ordering of the two slices.
template <class W>
bool check_flat_slice_condition(const SliceMeasure<W>& mu, const SliceMeasure<W>& nu) {
  detail::require_compatible(mu, nu, "check_flat_slice_condition");
  return mu.t <= nu.t;
}

// Composes witnesses along the shared middle marginal: the glued weight on
// (a, c) is sum_b w1(a,b) w2(b,c) / nu(b).
template <class W>
Coupling<W> glue_couplings(const Coupling<W>& first, const Coupling<W>& second,
                           const SliceMeasure<W>& middle) {
  if (first.cols != middle.size() || second.rows != middle.size())
    throw DimensionError("glue_couplings: middle marginal size mismatch");
  std::map<std::pair<Eigen::Index, Eigen::Index>, W> acc;
  for (const auto& e1 : first.entries) {
    for (const auto& e2 : second.entries) {
      if (e1.col != e2.row) continue;
      const W nu_b = middle.weights[static_cast<std::size_t>(e1.col)];
      acc[{e1.row, e2.col}] += e1.weight * e2.weight / nu_b;
    }
  }
  Coupling<W> out;
  out.t_mu = first.t_mu;
  out.t_nu = second.t_nu;
  out.rows = first.rows;
  out.cols = second.cols;
  for (const auto& [rc, w] : acc)
    if (w > WeightTraits<W>::zero()) out.entries.push_back({rc.first, rc.second, w});
  return out;
}

template <class W>
struct CouplingCheck {
  bool marginals_ok = false;
  bool causal_ok = false;
  double max_marginal_error = 0.0;
  bool ok() const { return marginals_ok && causal_ok; }
};

// Verifies the three coupling invariants against its claimed marginals.
template <class W>
CouplingCheck<W> verify_coupling(const Coupling<W>& coupling, const SliceMeasure<W>& mu,
                                 const SliceMeasure<W>& nu, double slack = 0.0) {
  detail::require_compatible(mu, nu, "verify_coupling");
  CouplingCheck<W> result;
  if (coupling.rows != mu.size() || coupling.cols != nu.size()) return result;

  std::vector<W> row_sum(static_cast<std::size_t>(coupling.rows), WeightTraits<W>::zero());
  std::vector<W> col_sum(static_cast<std::size_t>(coupling.cols), WeightTraits<W>::zero());
  result.causal_ok = true;
  for (const auto& e : coupling.entries) {
    if (e.row < 0 || e.row >= coupling.rows || e.col < 0 || e.col >= coupling.cols) return result;
    if (!(e.weight > WeightTraits<W>::zero())) return result;
    row_sum[static_cast<std::size_t>(e.row)] += e.weight;
    col_sum[static_cast<std::size_t>(e.col)] += e.weight;
    if (!detail::atoms_causal(mu.positions, e.row, mu.t, nu.positions, e.col, nu.t, mu.params, slack))
      result.causal_ok = false;
  }
  double max_err = 0.0;
  for (Eigen::Index i = 0; i < coupling.rows; ++i)
    max_err = std::max(max_err, std::abs(to_double(row_sum[static_cast<std::size_t>(i)]) -
                                         to_double(mu.weights[static_cast<std::size_t>(i)])));
  for (Eigen::Index j = 0; j < coupling.cols; ++j)
    max_err = std::max(max_err, std::abs(to_double(col_sum[static_cast<std::size_t>(j)]) -
                                         to_double(nu.weights[static_cast<std::size_t>(j)])));
  result.max_marginal_error = max_err;
  if constexpr (WeightTraits<W>::exact) {
    result.marginals_ok = true;
    for (Eigen::Index i = 0; i < coupling.rows && result.marginals_ok; ++i)
      result.marginals_ok = (row_sum[static_cast<std::size_t>(i)] == mu.weights[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < coupling.cols && result.marginals_ok; ++j)
      result.marginals_ok = (col_sum[static_cast<std::size_t>(j)] == nu.weights[static_cast<std::size_t>(j)]);
  } else {
    result.marginals_ok = (max_err <= 1e-9);
  }
  return result;
}

// Test compacts for the future-set checks: singletons of mu's atoms, their
// pairwise unions, and per-particle bounding boxes of random atom subsets.
// A finite family can only refute; the flow decision is the complete check.
template <class W>
std::vector<CompactRegion> make_test_compacts(const SliceMeasure<W>& mu, std::mt19937_64& rng,
                                              int random_boxes = 8) {
  std::vector<CompactRegion> out;
  const Eigen::Index m = mu.size();
  for (Eigen::Index i = 0; i < m; ++i) out.push_back(CompactRegion::from_atom(mu.atom(i)));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      CompactRegion r = CompactRegion::from_atom(mu.atom(i));
      r.boxes.push_back({mu.positions.row(j), mu.positions.row(j)});
      out.push_back(std::move(r));
    }
  std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
  for (int b = 0; b < random_boxes; ++b) {
    const Eigen::Index count = 1 + pick(rng) % std::max<Eigen::Index>(1, m);
    Vec lo = mu.positions.row(pick(rng));
    Vec hi = lo;
    for (Eigen::Index s = 1; s < count; ++s) {
      const Vec p = mu.positions.row(pick(rng));
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    out.push_back(CompactRegion::from_box(mu.t, lo, hi));
  }
  return out;
}

}  // namespace causalflow
