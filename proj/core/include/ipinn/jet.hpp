#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ipinn {

/// Raised when an operation is evaluated outside the domain of the
/// underlying function (log of a non-positive value, division by zero,
/// projective singularity of a group action, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Truncated Taylor polynomial of order 3 in one variable.
///
/// c[k] holds the k-th derivative (not the k-th Taylor coefficient), so the
/// jet of the independent variable at t0 is (t0, 1, 0, 0).
struct Jet3 {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

  constexpr Jet3() = default;
  constexpr explicit Jet3(double c0, double c1 = 0.0, double c2 = 0.0, double c3 = 0.0)
      : c{c0, c1, c2, c3} {}

  static constexpr Jet3 variable(double t0) { return Jet3{t0, 1.0, 0.0, 0.0}; }
  static constexpr Jet3 constant(double v) { return Jet3{v, 0.0, 0.0, 0.0}; }

  constexpr double value() const { return c[0]; }
  constexpr double operator[](std::size_t k) const { return c[k]; }
  constexpr double& operator[](std::size_t k) { return c[k]; }

  bool is_finite() const {
    return std::isfinite(c[0]) && std::isfinite(c[1]) && std::isfinite(c[2]) &&
           std::isfinite(c[3]);
  }

  friend constexpr bool operator==(const Jet3&, const Jet3&) = default;
};

enum class ElemFn { Tanh, Exp, Log, Sin, Cos, Recip, Pow };

std::string to_string(ElemFn f);

/// f and its first four derivatives at x. `exponent` is only read for Pow.
/// The fourth derivative is what reverse accumulation needs for c3.
std::array<double, 5> elem_derivatives(ElemFn f, double x, double exponent = 0.0);

/// Throws DomainError if x is outside the domain of f.
void check_domain(ElemFn f, double x, double exponent = 0.0);

constexpr Jet3 jet_add(const Jet3& a, const Jet3& b) {
  return Jet3{a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

constexpr Jet3 jet_sub(const Jet3& a, const Jet3& b) {
  return Jet3{a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

constexpr Jet3 jet_scale(const Jet3& a, double s) {
  return Jet3{s * a[0], s * a[1], s * a[2], s * a[3]};
}

// Leibniz rule
constexpr Jet3 jet_mul(const Jet3& a, const Jet3& b) {
  return Jet3{a[0] * b[0],
          a[1] * b[0] + a[0] * b[1],
          a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
          a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3]};
}

/// Composes an elementary function with a jet (Faa di Bruno through order 3).
Jet3 jet_elem(ElemFn f, const Jet3& a, double exponent = 0.0);

/// Composition given precomputed derivatives d = (f, f', f'', f''', ...).
constexpr Jet3 jet_compose(const std::array<double, 5>& d, const Jet3& a) {
  const double a1 = a[1];
  const double a2 = a[2];
  return Jet3{d[0],
          d[1] * a1,
          d[2] * a1 * a1 + d[1] * a2,
          d[3] * a1 * a1 * a1 + 3.0 * d[2] * a1 * a2 + d[1] * a[3]};
}

Jet3 jet_div(const Jet3& a, const Jet3& b);

/// Jet whose value is a.c[k] and whose derivatives are zero.
constexpr Jet3 jet_coef(const Jet3& a, std::size_t k) { return Jet3::constant(a[k]); }

constexpr Jet3 operator+(const Jet3& a, const Jet3& b) { return jet_add(a, b); }
constexpr Jet3 operator-(const Jet3& a, const Jet3& b) { return jet_sub(a, b); }
constexpr Jet3 operator*(const Jet3& a, const Jet3& b) { return jet_mul(a, b); }
inline Jet3 operator/(const Jet3& a, const Jet3& b) { return jet_div(a, b); }
constexpr Jet3 operator-(const Jet3& a) { return jet_scale(a, -1.0); }

constexpr Jet3 operator+(const Jet3& a, double s) { return Jet3{a[0] + s, a[1], a[2], a[3]}; }
constexpr Jet3 operator+(double s, const Jet3& a) { return a + s; }
constexpr Jet3 operator-(const Jet3& a, double s) { return Jet3{a[0] - s, a[1], a[2], a[3]}; }
constexpr Jet3 operator-(double s, const Jet3& a) { return Jet3{s - a[0], -a[1], -a[2], -a[3]}; }
constexpr Jet3 operator*(const Jet3& a, double s) { return jet_scale(a, s); }
constexpr Jet3 operator*(double s, const Jet3& a) { return jet_scale(a, s); }
inline Jet3 operator/(const Jet3& a, double s) { return jet_div(a, Jet3::constant(s)); }
inline Jet3 operator/(double s, const Jet3& a) { return jet_div(Jet3::constant(s), a); }

inline Jet3 tanh(const Jet3& a) { return jet_elem(ElemFn::Tanh, a); }
inline Jet3 exp(const Jet3& a) { return jet_elem(ElemFn::Exp, a); }
inline Jet3 log(const Jet3& a) { return jet_elem(ElemFn::Log, a); }
inline Jet3 sin(const Jet3& a) { return jet_elem(ElemFn::Sin, a); }
inline Jet3 cos(const Jet3& a) { return jet_elem(ElemFn::Cos, a); }
inline Jet3 recip(const Jet3& a) { return jet_elem(ElemFn::Recip, a); }
inline Jet3 pow(const Jet3& a, double p) { return jet_elem(ElemFn::Pow, a, p); }
inline Jet3 sq(const Jet3& a) { return jet_mul(a, a); }
constexpr Jet3 coef(const Jet3& a, std::size_t k) { return jet_coef(a, k); }

/// tanh evaluated through exp.
double tanh_via_exp(double x);

}  // namespace ipinn
