#pragma once

#include "causalflow/types.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace causalflow {

// Causal precedence of configuration events in Minkowski space with the
// product splitting: q is reachable from p iff every particle stays inside
// its light cone, i.e. ||q_j - p_j|| <= c (q.t - p.t) for all j. Comparisons
// are exact (no tolerance); discretized callers use precedes_point_tolerant.
inline bool precedes_point(const ConfigEvent& p, const ConfigEvent& q, const ModelParams& params) {
  p.check_dims(params, "precedes_point(p)");
  q.check_dims(params, "precedes_point(q)");
  const double dt = q.t - p.t;
  if (dt < 0.0) return false;
  const double reach2 = params.c * dt * (params.c * dt);
  for (int j = 0; j < params.N; ++j) {
    if ((q.particle(j, params.n) - p.particle(j, params.n)).squaredNorm() > reach2) return false;
  }
  return true;
}

// Strict version: positive time lapse and every particle strictly inside
// the cone. Irreflexive by construction.
inline bool chronologically_precedes_point(const ConfigEvent& p, const ConfigEvent& q,
                                           const ModelParams& params) {
  p.check_dims(params, "chronologically_precedes_point(p)");
  q.check_dims(params, "chronologically_precedes_point(q)");
  const double dt = q.t - p.t;
  if (!(dt > 0.0)) return false;
  const double reach2 = params.c * dt * (params.c * dt);
  for (int j = 0; j < params.N; ++j) {
    if (!((q.particle(j, params.n) - p.particle(j, params.n)).squaredNorm() < reach2)) return false;
  }
  return true;
}

// Additive-slack predicate for data coming from PDE discretizations: the
// per-particle displacement bound is relaxed to c*dt + eta, eta >= 0.
inline bool precedes_point_tolerant(const ConfigEvent& p, const ConfigEvent& q,
                                    const ModelParams& params, double eta) {
  p.check_dims(params, "precedes_point_tolerant(p)");
  q.check_dims(params, "precedes_point_tolerant(q)");
  if (eta < 0.0) throw InputError("precedes_point_tolerant: eta must be >= 0");
  const double dt = q.t - p.t;
  if (dt < 0.0) return false;
  const double reach = params.c * dt + eta;
  for (int j = 0; j < params.N; ++j) {
    if ((q.particle(j, params.n) - p.particle(j, params.n)).norm() > reach) return false;
  }
  return true;
}

// A compact test region on one time slice: a finite union of per-particle
// axis-aligned boxes, optionally fattened by a closed Euclidean ball of
// radius `pad` per particle. Atoms are zero-extent boxes (lo == hi). The
// pad keeps causal futures of regions exactly representable: growing a
// region by c*dt is just pad += c*dt.
struct CompactRegion {
  struct Box {
    Vec lo, hi;  // flattened n*N bounds, lo <= hi componentwise
  };

  double t = 0.0;
  std::vector<Box> boxes;
  double pad = 0.0;

  static CompactRegion from_atom(const ConfigEvent& p) {
    CompactRegion r;
    r.t = p.t;
    r.boxes.push_back({p.x, p.x});
    return r;
  }

  static CompactRegion from_atoms(double t, const std::vector<Vec>& atoms) {
    if (atoms.empty()) throw InputError("CompactRegion: empty atom set");
    CompactRegion r;
    r.t = t;
    for (const auto& a : atoms) r.boxes.push_back({a, a});
    return r;
  }

  static CompactRegion from_box(double t, Vec lo, Vec hi) {
    if (lo.size() != hi.size()) throw DimensionError("CompactRegion: lo/hi size mismatch");
    if (((hi - lo).array() < 0.0).any()) throw InputError("CompactRegion: box with hi < lo");
    if (!lo.allFinite() || !hi.allFinite()) throw InputError("CompactRegion: non-finite box");
    CompactRegion r;
    r.t = t;
    r.boxes.push_back({std::move(lo), std::move(hi)});
    return r;
  }

  bool empty() const { return boxes.empty(); }

  void check_dims(const ModelParams& params, const char* who) const {
    for (const auto& b : boxes)
      if (b.lo.size() != params.config_dim() || b.hi.size() != params.config_dim())
        throw DimensionError(std::string(who) + ": region box dimension mismatch");
  }
};

// Euclidean distance from a point to one particle's box factor.
inline double point_box_distance(const Eigen::Ref<const Vec>& point, const Eigen::Ref<const Vec>& lo,
                                 const Eigen::Ref<const Vec>& hi) {
  const Vec clamped = point.cwiseMax(lo).cwiseMin(hi);
  return (point - clamped).norm();
}

// Membership of q in the causal future J+(K). For each box the per-particle
// constraints decouple (the box is a product), so existence of a causal
// predecessor reduces to a per-particle point-to-box distance test.
inline bool future_contains(const CompactRegion& K, const ConfigEvent& q, const ModelParams& params) {
  if (K.empty()) return false;
  K.check_dims(params, "future_contains");
  q.check_dims(params, "future_contains(q)");
  const double dt = q.t - K.t;
  if (dt < 0.0) return false;
  const double reach = K.pad + params.c * dt;
  for (const auto& b : K.boxes) {
    bool ok = true;
    for (int j = 0; j < params.N; ++j) {
      const Eigen::Index off = static_cast<Eigen::Index>(j) * params.n;
      if (point_box_distance(q.x.segment(off, params.n), b.lo.segment(off, params.n),
                             b.hi.segment(off, params.n)) > reach) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

struct SliceFutureRegion {
  CompactRegion region;   // exact representation (pad carries the ball sum)
  bool box_exact = false; // whether outer_boxes() below is the exact region
  bool empty = false;     // t < K.t requested
};

// The slice of the causal future, J+(K) on the hyperplane at time t. The
// per-particle Minkowski sum with the radius-c(t-K.t) ball is carried by the
// region's pad, so membership tests stay exact. The axis-aligned outer boxes
// are exact only for zero radius or n == 1.
inline SliceFutureRegion slice_future_measure_region(const CompactRegion& K, double t,
                                                     const ModelParams& params) {
  SliceFutureRegion out;
  if (t < K.t) {
    out.region.t = t;
    out.empty = true;
    out.box_exact = true;
    return out;
  }
  out.region = K;
  out.region.t = t;
  out.region.pad = K.pad + params.c * (t - K.t);
  out.box_exact = (out.region.pad == 0.0) || (params.n == 1);
  return out;
}

// Axis-aligned bounding boxes of a padded region (outer approximation).
inline std::vector<CompactRegion::Box> outer_boxes(const CompactRegion& K) {
  std::vector<CompactRegion::Box> out;
  out.reserve(K.boxes.size());
  for (const auto& b : K.boxes)
    out.push_back({b.lo.array() - K.pad, b.hi.array() + K.pad});
  return out;
}

}  // namespace causalflow
