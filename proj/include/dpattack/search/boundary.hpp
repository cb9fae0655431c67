#pragma once

#include <optional>

#include "dpattack/search/prober.hpp"

namespace dpattack {

struct BoundaryResult {
  double r = 0.0;       // adversarial side of the final bracket
  ImageTensor witness;  // probe image confirming r
  std::size_t queries = 0;
};

/// Bisection for the boundary distance g(d) on [lo, hi] to precision tol.
/// Probes hi first unless `hi_witness` already confirms it.
inline BoundaryResult boundary_distance(Prober& p, const Direction& d, double lo, double hi,
                                        double tol,
                                        std::optional<ImageTensor> hi_witness = std::nullopt) {
  if (!(tol > 0.0)) throw ShapeError("tolerance must be positive");
  if (lo < 0.0 || hi < lo) throw ShapeError("invalid search bracket");
  const std::size_t q0 = p.queries();
  BoundaryResult out;
  if (hi_witness) {
    out.witness = std::move(*hi_witness);
  } else {
    auto top = p.probe(d, hi);
    if (!top.adversarial) {
      throw NotAdversarialAtMax("direction is not adversarial at r = " + std::to_string(hi));
    }
    out.witness = std::move(top.image);
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto res = p.probe(d, mid);
    if (res.adversarial) {
      hi = mid;
      out.witness = std::move(res.image);
    } else {
      lo = mid;
    }
  }
  out.r = hi;
  out.queries = p.queries() - q0;
  return out;
}

}  // namespace dpattack
