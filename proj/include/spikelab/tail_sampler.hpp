#pragma once

// Symmetric heavy-tailed entry laws with constant slowly-varying part.
//
// Three families:
//   SymmetricPareto            P(|a| >= x) = min(1, (x/scale)^-alpha)
//   NormalizedSymmetricPareto4 alpha = 4 Pareto rescaled to unit variance;
//                              a unit Pareto-4 has E[a^2] = 2, so scale = 1/sqrt(2)
//                              and x^4 P(|a| > x) -> scale^4 = 1/4
//   ExplicitSurvival           caller-supplied survival function; sampling and
//                              b_n go through bisection
//
// Signs are drawn from an independent fair bit, so every law is symmetric.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "spikelab/errors.hpp"
#include "spikelab/rng.hpp"

namespace spikelab {

enum class TailFamily { SymmetricPareto, NormalizedSymmetricPareto4, ExplicitSurvival };

class TailLaw {
 public:
  using SurvivalFn = std::function<double(double)>;

  static TailLaw pareto(double alpha, double scale = 1.0) {
    require(alpha > 0.0 && alpha <= 4.0, "pareto: alpha must lie in (0, 4]");
    require(scale > 0.0 && std::isfinite(scale), "pareto: scale must be positive");
    TailLaw law(TailFamily::SymmetricPareto, alpha, scale);
    if (alpha == 4.0) law.c_tail_ = std::pow(scale, 4.0);
    return law;
  }

  static TailLaw pareto4_unit_variance() {
    TailLaw law(TailFamily::NormalizedSymmetricPareto4, 4.0, 1.0 / std::sqrt(2.0));
    law.c_tail_ = 0.25;
    return law;
  }

  // `survival` must be nonincreasing with survival(0) = 1 and vanish at
  // infinity. `c_tail` is only meaningful for alpha = 4.
  static TailLaw explicit_survival(double alpha, SurvivalFn survival,
                                   std::optional<double> c_tail = std::nullopt) {
    require(alpha > 0.0 && alpha <= 4.0, "explicit: alpha must lie in (0, 4]");
    require(static_cast<bool>(survival), "explicit: survival function required");
    require(!c_tail || alpha == 4.0, "explicit: c_tail only defined for alpha = 4");
    TailLaw law(TailFamily::ExplicitSurvival, alpha, 1.0);
    law.survival_fn_ = std::move(survival);
    law.c_tail_ = c_tail;
    return law;
  }

  TailFamily family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  double scale() const noexcept { return scale_; }
  std::optional<double> c_tail() const noexcept { return c_tail_; }

  bool is_pareto_family() const noexcept { return family_ != TailFamily::ExplicitSurvival; }

  // P(|a| >= x).
  double survival(double x) const {
    require(x >= 0.0, "survival: x must be nonnegative");
    if (!is_pareto_family()) return survival_fn_(x);
    if (x <= scale_) return 1.0;
    return std::pow(x / scale_, -alpha_);
  }

  // Smallest x with survival(x) <= u, for u in (0, 1].
  double inverse_survival(double u) const {
    require(u > 0.0 && u <= 1.0, "inverse_survival: u must lie in (0, 1]");
    if (is_pareto_family()) return scale_ * std::pow(u, -1.0 / alpha_);
    return bisect_survival(u);
  }

  double sample(RngStream& rng) const {
    const double magnitude = inverse_survival(rng.uniform_open0());
    return rng.fair_bit() ? -magnitude : magnitude;
  }

  // b(y) = inf{x > 0 : P(|a| >= x) <= 2 y^-2}.
  double b_of(double y) const {
    require(y >= 2.0, "b_of: y must be >= 2");
    const double level = 2.0 / (y * y);
    if (is_pareto_family()) return scale_ * std::pow(y * y / 2.0, 1.0 / alpha_);
    return bisect_survival(level);
  }

  // lim x^4 P(|a| > x); only for alpha = 4.
  double tail_constant() const {
    if (alpha_ != 4.0) throw InvalidArgument("tail_constant: requires alpha = 4");
    if (!c_tail_) throw InvalidArgument("tail_constant: law carries no tail constant");
    return *c_tail_;
  }

  // Analytic second moment where it exists (alpha > 2 Pareto families).
  std::optional<double> second_moment() const {
    if (!is_pareto_family() || alpha_ <= 2.0) return std::nullopt;
    return scale_ * scale_ * alpha_ / (alpha_ - 2.0);
  }

  std::string describe() const {
    switch (family_) {
      case TailFamily::SymmetricPareto: return "pareto";
      case TailFamily::NormalizedSymmetricPareto4: return "pareto4_unitvar";
      case TailFamily::ExplicitSurvival: return "explicit";
    }
    return "unknown";
  }

 private:
  TailLaw(TailFamily family, double alpha, double scale)
      : family_(family), alpha_(alpha), scale_(scale) {}

  // Infimum of {x : survival(x) <= level}, relative width 1e-10.
  double bisect_survival(double level) const {
    double hi = 1.0;
    while (survival_fn_(hi) > level) {
      hi *= 2.0;
      if (hi > 1e300)
        throw NumericFailure("survival never drops below " + std::to_string(level) +
                             " on the search bracket");
    }
    double lo = 0.0;
    while (hi - lo > 1e-10 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (survival_fn_(mid) <= level)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }

  TailFamily family_;
  double alpha_;
  double scale_;
  std::optional<double> c_tail_;
  SurvivalFn survival_fn_;
};

}  // namespace spikelab
