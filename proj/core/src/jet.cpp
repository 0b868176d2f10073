#include "ipinn/jet.hpp"

#include <cmath>

namespace ipinn {

std::string to_string(ElemFn f) {
  switch (f) {
    case ElemFn::Tanh: return "tanh";
    case ElemFn::Exp: return "exp";
    case ElemFn::Log: return "log";
    case ElemFn::Sin: return "sin";
    case ElemFn::Cos: return "cos";
    case ElemFn::Recip: return "recip";
    case ElemFn::Pow: return "pow";
  }
  return "?";
}

double tanh_via_exp(double x) {
  // e = exp(-2|x|) never overflows
  const double e = std::exp(-2.0 * std::fabs(x));
  const double t = (1.0 - e) / (1.0 + e);
  return x < 0.0 ? -t : t;
}

namespace {

bool is_integer(double p) { return std::floor(p) == p; }

}  // namespace

void check_domain(ElemFn f, double x, double exponent) {
  switch (f) {
    case ElemFn::Log:
      if (!(x > 0.0)) {
        throw DomainError("log: argument " + std::to_string(x) + " is not positive");
      }
      break;
    case ElemFn::Recip:
      if (x == 0.0) throw DomainError("recip: division by zero");
      break;
    case ElemFn::Pow:
      if (is_integer(exponent)) {
        if (exponent < 0.0 && x == 0.0) {
          throw DomainError("pow: zero raised to a negative power");
        }
      } else if (!(x > 0.0)) {
        throw DomainError("pow: non-integer power of a non-positive argument");
      }
      break;
    default:
      break;
  }
}

std::array<double, 5> elem_derivatives(ElemFn f, double x, double exponent) {
  check_domain(f, x, exponent);
  switch (f) {
    case ElemFn::Tanh: {
      const double y = tanh_via_exp(x);
      const double d1 = 1.0 - y * y;
      const double d2 = -2.0 * y * d1;
      const double d3 = d1 * (6.0 * y * y - 2.0);
      const double d4 = d2 * (6.0 * y * y - 2.0) + 12.0 * y * d1 * d1;
      return {y, d1, d2, d3, d4};
    }
    case ElemFn::Exp: {
      const double e = std::exp(x);
      return {e, e, e, e, e};
    }
    case ElemFn::Log: {
      const double r = 1.0 / x;
      return {std::log(x), r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r};
    }
    case ElemFn::Sin: {
      const double s = std::sin(x);
      const double c = std::cos(x);
      return {s, c, -s, -c, s};
    }
    case ElemFn::Cos: {
      const double s = std::sin(x);
      const double c = std::cos(x);
      return {c, -s, -c, s, c};
    }
    case ElemFn::Recip: {
      const double r = 1.0 / x;
      const double r2 = r * r;
      return {r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2, 24.0 * r2 * r2 * r};
    }
    case ElemFn::Pow: {
      std::array<double, 5> d{};
      double falling = 1.0;  // p (p-1) ... (p-k+1)
      for (int k = 0; k < 5; ++k) {
        d[k] = falling == 0.0 ? 0.0 : falling * std::pow(x, exponent - k);
        falling *= exponent - k;
      }
      return d;
    }
  }
  return {};
}

Jet3 jet_elem(ElemFn f, const Jet3& a, double exponent) {
  return jet_compose(elem_derivatives(f, a[0], exponent), a);
}

Jet3 jet_div(const Jet3& a, const Jet3& b) {
  return jet_mul(a, jet_elem(ElemFn::Recip, b));
}

}  // namespace ipinn
