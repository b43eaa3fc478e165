#pragma once

// First order truncated Taylor arithmetic (forward mode differentiation).
// Dual<T> carries a value and one directional derivative slot. The scalar
// type is a template parameter so duals nest: Dual<Dual<double>> propagates
// second derivatives, which is what derived normal fields need when they are
// differentiated again during recovery.

#include <cmath>
#include <type_traits>

namespace frontal {

template <typename T>
struct Dual {
  T val{};
  T der{};

  constexpr Dual() = default;
  constexpr Dual(const T& v) : val(v), der(T{}) {}  // NOLINT implicit by design
  constexpr Dual(const T& v, const T& d) : val(v), der(d) {}

  // Allow promotion from plain arithmetic literals (e.g. Dual<Dual<double>>
  // from 2.0) one nesting level at a time.
  template <typename U,
            typename = std::enable_if_t<std::is_arithmetic_v<U> &&
                                        !std::is_same_v<U, T>>>
  constexpr Dual(U v) : val(static_cast<T>(v)), der(T{}) {}  // NOLINT

  Dual& operator+=(const Dual& o) { val += o.val; der += o.der; return *this; }
  Dual& operator-=(const Dual& o) { val -= o.val; der -= o.der; return *this; }
  Dual& operator*=(const Dual& o) {
    der = der * o.val + val * o.der;
    val = val * o.val;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    der = (der * o.val - val * o.der) / (o.val * o.val);
    val = val / o.val;
    return *this;
  }
};

template <typename T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <typename T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <typename T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <typename T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <typename T> Dual<T> operator-(const Dual<T>& a) { return {-a.val, -a.der}; }
template <typename T> Dual<T> operator+(const Dual<T>& a) { return a; }

// Mixed scalar operands.
template <typename T> Dual<T> operator+(const T& s, Dual<T> a) { a.val = s + a.val; return a; }
template <typename T> Dual<T> operator+(Dual<T> a, const T& s) { a.val += s; return a; }
template <typename T> Dual<T> operator-(const T& s, const Dual<T>& a) { return {s - a.val, -a.der}; }
template <typename T> Dual<T> operator-(Dual<T> a, const T& s) { a.val -= s; return a; }
template <typename T> Dual<T> operator*(const T& s, const Dual<T>& a) { return {s * a.val, s * a.der}; }
template <typename T> Dual<T> operator*(const Dual<T>& a, const T& s) { return {a.val * s, a.der * s}; }
template <typename T> Dual<T> operator/(const Dual<T>& a, const T& s) { return {a.val / s, a.der / s}; }
template <typename T> Dual<T> operator/(const T& s, const Dual<T>& a) {
  return Dual<T>(s) / a;
}

template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator+(U s, const Dual<T>& a) { return Dual<T>(s) + a; }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator+(const Dual<T>& a, U s) { return a + Dual<T>(s); }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator-(U s, const Dual<T>& a) { return Dual<T>(s) - a; }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator-(const Dual<T>& a, U s) { return a - Dual<T>(s); }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator*(U s, const Dual<T>& a) { return Dual<T>(s) * a; }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator*(const Dual<T>& a, U s) { return a * Dual<T>(s); }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator/(U s, const Dual<T>& a) { return Dual<T>(s) / a; }
template <typename T, typename U,
          typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator/(const Dual<T>& a, U s) { return a / Dual<T>(s); }

// Comparisons look at values only; derivative slots never order anything.
template <typename T> bool operator==(const Dual<T>& a, const Dual<T>& b) { return a.val == b.val; }
template <typename T> bool operator!=(const Dual<T>& a, const Dual<T>& b) { return a.val != b.val; }
template <typename T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return a.val < b.val; }
template <typename T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return a.val > b.val; }
template <typename T> bool operator<=(const Dual<T>& a, const Dual<T>& b) { return a.val <= b.val; }
template <typename T> bool operator>=(const Dual<T>& a, const Dual<T>& b) { return a.val >= b.val; }

using std::atan2;
using std::cos;
using std::sin;
using std::sqrt;

template <typename T>
Dual<T> sqrt(const Dual<T>& a) {
  T r = sqrt(a.val);
  return {r, a.der / (T(2) * r)};
}

template <typename T>
Dual<T> sin(const Dual<T>& a) { return {sin(a.val), cos(a.val) * a.der}; }

template <typename T>
Dual<T> cos(const Dual<T>& a) { return {cos(a.val), -sin(a.val) * a.der}; }

template <typename T>
Dual<T> tan(const Dual<T>& a) {
  using std::tan;
  T t = tan(a.val);
  return {t, (T(1) + t * t) * a.der};
}

template <typename T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.val);
  return {e, e * a.der};
}

template <typename T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.val), a.der / a.val};
}

template <typename T>
Dual<T> asin(const Dual<T>& a) {
  using std::asin;
  return {asin(a.val), a.der / sqrt(T(1) - a.val * a.val)};
}

template <typename T>
Dual<T> acos(const Dual<T>& a) {
  using std::acos;
  return {acos(a.val), -a.der / sqrt(T(1) - a.val * a.val)};
}

template <typename T>
Dual<T> atan(const Dual<T>& a) {
  using std::atan;
  return {atan(a.val), a.der / (T(1) + a.val * a.val)};
}

template <typename T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T denom = x.val * x.val + y.val * y.val;
  return {atan2(y.val, x.val), (x.val * y.der - y.val * x.der) / denom};
}

template <typename T>
Dual<T> abs(const Dual<T>& a) {
  using std::abs;
  return a.val < T(0) ? -a : a;
}

template <typename T>
Dual<T> pow(const Dual<T>& a, int k) {
  Dual<T> r(T(1));
  Dual<T> base = a;
  int e = k < 0 ? -k : k;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  if (k < 0) return Dual<T>(T(1)) / r;
  return r;
}

// Value extraction through arbitrary nesting depth.
inline double scalar_value(double x) { return x; }
template <typename T>
double scalar_value(const Dual<T>& a) { return scalar_value(a.val); }

inline bool is_finite(double x) { return std::isfinite(x); }
template <typename T>
bool is_finite(const Dual<T>& a) { return is_finite(a.val) && is_finite(a.der); }

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

}  // namespace frontal
