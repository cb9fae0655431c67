#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "dpattack/search/prober.hpp"

namespace dpattack {

struct BiliOptions {
  std::size_t budget = 16;  // Q
  double line_steps = 5.0;  // t
};

struct BiliResult {
  Direction direction;
  double r = 0.0;
  int chosen = 0;  // 0: first direction (d_n), 1: second (d_a)
  ImageTensor witness;
  std::size_t queries = 0;
  std::array<double, 2> bounds{};  // final confirmed h per direction
  std::array<bool, 2> confirmed{};
};

/// Joint bisection/line refinement of two directions at shared query cost.
///
/// Per direction, h is the smallest magnitude confirmed adversarial and l the
/// largest confirmed benign one. A success lowers h and keeps the current
/// step rule; the first failure raises l and switches that direction from
/// bisection (r = (h+l)/2) to line steps (r = h - (h-l)/t). A failure in line
/// mode ends the search. The confirmed direction with the smaller h wins;
/// ties go to the second direction.
///
/// `first_witness` marks the first direction as already confirmed at r.
inline BiliResult bilisearch(Prober& p, const Direction& dn, const Direction& da, double r,
                             const BiliOptions& opt = {},
                             std::optional<ImageTensor> first_witness = std::nullopt) {
  if (!(r > 0.0)) throw ShapeError("bilisearch start magnitude must be positive");
  enum class Mode { bisect, line };
  struct Arm {
    const Direction* d;
    double h, l, probe;
    Mode mode = Mode::bisect;
    bool confirmed = false;
    ImageTensor witness;
  };
  std::array<Arm, 2> arm{Arm{&dn, r, 0.0, r / 2, Mode::bisect, false, {}},
                         Arm{&da, r, 0.0, r / 2, Mode::bisect, false, {}}};
  if (first_witness) {
    arm[0].confirmed = true;
    arm[0].witness = std::move(*first_witness);
  }
  const std::size_t q0 = p.queries();
  auto used = [&] { return p.queries() - q0; };
  p.set_context("bilisearch", 0);

  try {
    bool stop = false;
    while (!stop && used() + 2 <= opt.budget) {
      for (Arm& a : arm) {
        auto res = p.probe(*a.d, a.probe);
        if (res.adversarial) {
          a.h = a.probe;
          a.confirmed = true;
          a.witness = std::move(res.image);
        } else {
          if (a.mode == Mode::line) stop = true;
          a.l = a.probe;
          a.mode = Mode::line;
        }
        a.probe = a.mode == Mode::bisect ? 0.5 * (a.h + a.l) : a.h - (a.h - a.l) / opt.line_steps;
      }
    }
    // Nothing confirmed yet: check the starting magnitude itself.
    for (Arm& a : arm) {
      if (arm[0].confirmed || arm[1].confirmed || used() >= opt.budget) break;
      auto res = p.probe(*a.d, r);
      if (res.adversarial) {
        a.h = r;
        a.confirmed = true;
        a.witness = std::move(res.image);
      }
    }
  } catch (const BudgetExhausted&) {
    if (!arm[0].confirmed && !arm[1].confirmed) throw;
  }

  if (!arm[0].confirmed && !arm[1].confirmed) {
    throw InitFailed("neither initial direction is adversarial at r = " + std::to_string(r));
  }
  int pick = 1;
  if (!arm[1].confirmed || (arm[0].confirmed && arm[0].h < arm[1].h)) pick = 0;
  BiliResult out;
  out.direction = *arm[pick].d;
  out.r = arm[pick].h;
  out.chosen = pick;
  out.witness = std::move(arm[pick].witness);
  out.queries = used();
  for (int k = 0; k < 2; ++k) {
    out.bounds[k] = arm[k].h;
    out.confirmed[k] = arm[k].confirmed;
  }
  return out;
}

}  // namespace dpattack
