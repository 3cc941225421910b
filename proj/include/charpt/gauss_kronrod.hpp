#pragma once

// Globally adaptive 1D Gauss-Kronrod (7/15) quadrature. Header-only so that it
// can be instantiated for scalar and vector-valued integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace charpt::gk {

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the embedded 7-point rule (nodes xgk[1], xgk[3], xgk[5], xgk[7]).
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::vector<double>& v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

inline void axpy(double& acc, double w, double v) { acc += w * v; }
inline void axpy(std::vector<double>& acc, double w, const std::vector<double>& v) {
  if (acc.size() < v.size()) acc.resize(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += w * v[i];
}

inline double difference(double a, double b) { return std::abs(a - b); }
inline double difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = i < a.size() ? a[i] : 0.0;
    const double bi = i < b.size() ? b[i] : 0.0;
    m = std::max(m, std::abs(ai - bi));
  }
  return m;
}

template <class T>
struct Interval {
  double a;
  double b;
  T value;
  double error;
  std::size_t serial; // creation order, breaks ties deterministically
};

template <class T, class F>
Interval<T> rule(F& f, double a, double b, std::size_t serial) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T kronrod{};
  T gauss{};
  const T fc = f(c);
  axpy(kronrod, wgk[7], fc);
  axpy(gauss, wg[3], fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    axpy(kronrod, wgk[j], f1);
    axpy(kronrod, wgk[j], f2);
    if (j % 2 == 1) {
      axpy(gauss, wg[j / 2], f1);
      axpy(gauss, wg[j / 2], f2);
    }
  }
  T scaled{};
  axpy(scaled, h, kronrod);
  T gscaled{};
  axpy(gscaled, h, gauss);
  return {a, b, scaled, difference(scaled, gscaled), serial};
}

} // namespace detail

// Integrates f over the union of [breaks[i], breaks[i+1]]; the breakpoints seed
// the interval heap, so known near-singular locations can be isolated up front.
template <class T, class F>
Result<T> integrate_pieces(F&& f, std::span<const double> breaks, const Options& opt = {}) {
  using detail::Interval;
  Result<T> out;
  if (breaks.size() < 2) {
    out.converged = true;
    return out;
  }
  auto worse = [](const Interval<T>& l, const Interval<T>& r) {
    if (l.error != r.error) return l.error < r.error;
    return l.serial > r.serial;
  };
  std::priority_queue<Interval<T>, std::vector<Interval<T>>, decltype(worse)> heap(worse);
  std::size_t serial = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] == breaks[i]) continue;
    heap.push(detail::rule<T>(f, breaks[i], breaks[i + 1], serial++));
    out.evaluations += 15;
  }
  auto totals = [&heap](T& value, double& error) {
    // Summation in creation order keeps the result independent of heap layout.
    auto copy = heap;
    std::vector<Interval<T>> all;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.serial < r.serial; });
    value = T{};
    error = 0.0;
    for (const auto& it : all) {
      detail::axpy(value, 1.0, it.value);
      error += it.error;
    }
  };
  T value{};
  double error = 0.0;
  totals(value, error);
  while (!heap.empty()) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(value));
    if (error <= target) {
      out.converged = true;
      break;
    }
    if (heap.size() >= opt.max_intervals) break;
    Interval<T> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break; // interval exhausted in double precision
    heap.pop();
    auto left = detail::rule<T>(f, worst.a, mid, serial++);
    auto right = detail::rule<T>(f, mid, worst.b, serial++);
    out.evaluations += 30;
    // Incremental update of the running totals.
    T delta{};
    detail::axpy(delta, 1.0, left.value);
    detail::axpy(delta, 1.0, right.value);
    detail::axpy(delta, -1.0, worst.value);
    detail::axpy(value, 1.0, delta);
    error += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }
  totals(value, error);
  out.value = value;
  out.error = error;
  if (!out.converged) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(value));
    out.converged = error <= target;
  }
  return out;
}

template <class T = double, class F>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {}) {
  const std::array<double, 2> br{a, b};
  return integrate_pieces<T>(std::forward<F>(f), std::span<const double>(br), opt);
}

} // namespace charpt::gk
