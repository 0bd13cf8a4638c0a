#pragma once

// Forward-mode dual numbers carrying a value and its derivative with respect
// to the single model parameter. Used for log-density ratios and acceptance
// probabilities.

#include <cmath>
#include <ostream>

namespace dmh {

struct Dual {
  double value = 0.0;
  double deriv = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT: constants promote implicitly
  constexpr Dual(double v, double d) : value(v), deriv(d) {}

  static constexpr Dual variable(double v) { return {v, 1.0}; }
  static constexpr Dual constant(double v) { return {v, 0.0}; }

  constexpr Dual& operator+=(Dual o) {
    value += o.value;
    deriv += o.deriv;
    return *this;
  }
  constexpr Dual& operator-=(Dual o) {
    value -= o.value;
    deriv -= o.deriv;
    return *this;
  }
  constexpr Dual& operator*=(Dual o) {
    deriv = deriv * o.value + value * o.deriv;
    value *= o.value;
    return *this;
  }
  constexpr Dual& operator/=(Dual o) {
    deriv = (deriv * o.value - value * o.deriv) / (o.value * o.value);
    value /= o.value;
    return *this;
  }

  friend constexpr bool operator==(Dual, Dual) = default;
};

constexpr Dual operator-(Dual a) { return {-a.value, -a.deriv}; }
constexpr Dual operator+(Dual a, Dual b) { return a += b; }
constexpr Dual operator-(Dual a, Dual b) { return a -= b; }
constexpr Dual operator*(Dual a, Dual b) { return a *= b; }
constexpr Dual operator/(Dual a, Dual b) { return a /= b; }

inline Dual exp(Dual a) {
  const double e = std::exp(a.value);
  // 0 * inf would poison alpha = exp(-inf) for impossible reverse moves
  return {e, e == 0.0 ? 0.0 : e * a.deriv};
}

inline Dual log(Dual a) { return {std::log(a.value), a.deriv / a.value}; }

inline Dual sqrt(Dual a) {
  const double s = std::sqrt(a.value);
  return {s, a.deriv / (2.0 * s)};
}

// min against a constant. At the kink (a.value == c) the constant branch wins,
// so the derivative there is 0.
constexpr Dual min(Dual a, double c) {
  if (a.value < c) return a;
  return Dual::constant(c);
}

constexpr Dual max(Dual a, double c) {
  if (a.value > c) return a;
  return Dual::constant(c);
}

inline bool isfinite(Dual a) { return std::isfinite(a.value) && std::isfinite(a.deriv); }

inline std::ostream& operator<<(std::ostream& os, Dual a) {
  return os << a.value << " + " << a.deriv << "ε";
}

}  // namespace dmh
