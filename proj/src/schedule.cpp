#include "ozd/schedule.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ozd/errors.hpp"

namespace ozd {

namespace {

void require(bool ok, const std::string& inequality) {
  if (!ok) throw ConfigError(fmt::format("schedule violates {}", inequality));
}

template <typename T>
const T& need(const std::optional<T>& value, const char* name, ScheduleKind kind) {
  if (!value)
    throw ConfigError(fmt::format("schedule '{}' requires {}", to_string(kind), name));
  return *value;
}

}  // namespace

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Power:
      return "power";
    case ScheduleKind::Constant:
      return "constant";
    case ScheduleKind::NonsmoothConvexOptimal:
      return "nonsmooth-convex-optimal";
    case ScheduleKind::NonsmoothNonconvexOptimal:
      return "nonsmooth-nonconvex-optimal";
    case ScheduleKind::SmoothCapped:
      return "smooth-capped";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(const std::string& text) {
  for (const ScheduleKind kind :
       {ScheduleKind::Power, ScheduleKind::Constant, ScheduleKind::NonsmoothConvexOptimal,
        ScheduleKind::NonsmoothNonconvexOptimal, ScheduleKind::SmoothCapped})
    if (to_string(kind) == text) return kind;
  throw ConfigError(fmt::format("unknown schedule kind '{}'", text));
}

Schedule Schedule::make(ScheduleKind kind, const ScheduleParams& in) {
  ScheduleParams p = in;
  require(p.h > 0.0, "h > 0");
  require(p.c > 0.0, "c > 0");
  switch (kind) {
    case ScheduleKind::Power:
      require(p.alpha > 0.0, "alpha > 0");
      require(p.theta > 0.5 && p.theta < 1.0, "theta in (1/2, 1) (alpha_k^2 summable, alpha_k not)");
      require(p.theta + p.rho > 1.0, "theta + rho > 1 (alpha_k h_k summable)");
      break;
    case ScheduleKind::Constant:
      require(p.alpha > 0.0, "alpha > 0");
      require(p.rho >= 0.0, "rho >= 0");
      p.theta = 0.0;
      break;
    case ScheduleKind::NonsmoothConvexOptimal: {
      const double l0 = need(p.L0, "L0", kind);
      const double dist = need(p.initial_distance, "initial_distance", kind);
      const std::int64_t horizon = need(p.horizon, "horizon", kind);
      require(p.dim >= 1 && p.l >= 1 && p.l <= p.dim, "1 <= l <= d");
      require(l0 > 0.0, "L0 > 0");
      require(dist > 0.0, "||x0 - x*|| > 0");
      require(horizon >= 1, "K >= 1");
      const double ratio = static_cast<double>(p.l) / static_cast<double>(p.dim);
      if (p.accuracy) {
        const double eps = *p.accuracy;
        require(eps > 0.0 && eps < 1.0, "epsilon in (0, 1)");
        require(p.h <= eps / (2.0 * l0), "h <= epsilon / (2 L0)");
        require(static_cast<double>(horizon) >= 8.0 * p.c * l0 * l0 * dist * dist / ratio / (eps * eps),
                "K >= 8 c L0^2 ||x0 - x*||^2 (d/l) / epsilon^2");
      }
      p.alpha = std::sqrt(ratio) * dist / (std::sqrt(2.0 * p.c * static_cast<double>(horizon)) * l0);
      p.theta = 0.0;
      p.rho = 0.0;
      break;
    }
    case ScheduleKind::NonsmoothNonconvexOptimal: {
      const double l0 = need(p.L0, "L0", kind);
      const double gap = need(p.initial_gap, "initial_gap", kind);
      const std::int64_t horizon = need(p.horizon, "horizon", kind);
      require(p.dim >= 1 && p.l >= 1 && p.l <= p.dim, "1 <= l <= d");
      require(l0 > 0.0, "L0 > 0");
      require(gap > 0.0, "f_h(x0) - min f > 0");
      require(horizon >= 1, "K >= 1");
      const double d = static_cast<double>(p.dim);
      const double l = static_cast<double>(p.l);
      const double growth = p.c * l0 * l0 * l0 * d * std::sqrt(d);
      if (p.accuracy) {
        const double eps = *p.accuracy;
        require(eps > 0.0 && eps < 1.0, "epsilon in (0, 1)");
        require(static_cast<double>(horizon) >= 4.0 * gap * growth / (eps * eps) / (l * p.h),
                "K >= 4 (f_h(x0) - min f) c L0^3 d sqrt(d) / (epsilon^2 l h)");
      }
      p.alpha = std::sqrt(gap * l * p.h / (static_cast<double>(horizon) * growth));
      p.theta = 0.0;
      p.rho = 0.0;
      break;
    }
    case ScheduleKind::SmoothCapped: {
      const double l1 = need(p.L1, "L1", kind);
      require(p.dim >= 1 && p.l >= 1, "d >= 1 and l >= 1");
      require(l1 > 0.0, "L1 > 0");
      require(p.alpha > 0.0, "alpha > 0");
      const double cap = static_cast<double>(p.l) / (static_cast<double>(p.dim) * l1);
      require(p.alpha < cap, fmt::format("alpha < l/(d L1) = {:.6g} (got {:.6g})", cap, p.alpha));
      // For smooth-capped, theta is the smoothing exponent; stored in rho.
      require(p.theta > 1.0, "h_k = h (k+1)^-theta with theta > 1 (alpha_k h_k summable)");
      p.rho = p.theta;
      break;
    }
  }
  return Schedule(kind, std::move(p));
}

double Schedule::alpha(std::int64_t k) const {
  if (kind_ == ScheduleKind::Power)
    return params_.alpha * std::pow(static_cast<double>(k + 1), -params_.theta);
  return params_.alpha;
}

double Schedule::h(std::int64_t k) const {
  if (params_.rho == 0.0) return params_.h;
  return params_.h * std::pow(static_cast<double>(k + 1), -params_.rho);
}

double Schedule::smoothing_exponent() const { return params_.rho; }

std::string Schedule::describe() const {
  const double step_exponent = kind_ == ScheduleKind::Power ? params_.theta : 0.0;
  return fmt::format("{}(alpha={:.17g},theta={:.17g},h={:.17g},rho={:.17g})", to_string(kind_),
                     params_.alpha, step_exponent, params_.h, params_.rho);
}

}  // namespace ozd
