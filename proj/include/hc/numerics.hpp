#pragma once

// Small numerical toolbox shared by the modules: quadrature, bracketing root
// finding, periodic splines, 3-vectors and a deterministic parallel loop.

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hc/errors.hpp"

namespace hc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

inline double dot(const Vec3& u, const Vec3& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

inline Vec3 cross(const Vec3& u, const Vec3& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
          u[0] * v[1] - u[1] * v[0]};
}

inline double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return dot(a, cross(b, c));
}

inline Vec3 operator+(const Vec3& u, const Vec3& v) {
  return {u[0] + v[0], u[1] + v[1], u[2] + v[2]};
}
inline Vec3 operator-(const Vec3& u, const Vec3& v) {
  return {u[0] - v[0], u[1] - v[1], u[2] - v[2]};
}
inline Vec3 operator*(double s, const Vec3& v) {
  return {s * v[0], s * v[1], s * v[2]};
}

inline Vec3 apply(const Mat3& m, const Vec3& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

inline Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

/// Wraps an angle into (−π, π].
inline double wrap_pi(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Wraps an angle into [0, 2π).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

// ---------------------------------------------------------------------------
// Quadrature

/// Composite Simpson rule on uniformly spaced samples; needs an odd count.
inline double simpson_samples(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  if (n < 3 || n % 2 == 0)
    throw InvalidInputError("composite Simpson needs an odd number (>= 3) of samples");
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) (i % 2 ? odd : even) += f[i];
  return dx / 3.0 * (f.front() + f.back() + 4.0 * odd + 2.0 * even);
}

namespace detail {

template <class F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction. The tolerance is
/// relative to a coarse estimate of ∫|f| (falls back to abs_tol near zero).
template <class F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol,
                        double abs_tol = 1e-300, int max_depth = 40) {
  if (a == b) return 0.0;
  // Seed on 16 panels so that narrow features are not missed entirely.
  constexpr int kPanels = 16;
  const double h = (b - a) / kPanels;
  std::array<double, 2 * kPanels + 1> fx{};
  for (int i = 0; i <= 2 * kPanels; ++i) fx[i] = f(a + 0.5 * h * i);
  double scale = 0.0;
  for (double v : fx) scale += std::abs(v);
  scale *= std::abs(b - a) / fx.size();
  const double tol = std::max(rel_tol * scale, abs_tol) / kPanels;
  double total = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double lo = a + k * h, hi = lo + h;
    const double fa = fx[2 * k], fm = fx[2 * k + 1], fb = fx[2 * k + 2];
    const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::simpson_recurse(f, lo, hi, fa, fm, fb, whole, tol, max_depth);
  }
  return total;
}

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct KronrodEstimate {
  double value;
  double error;
};

template <class F>
KronrodEstimate gauss_kronrod15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double sum = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

template <class F>
double kronrod_recurse(const F& f, double a, double b, KronrodEstimate est,
                       double tol, int depth) {
  if (est.error <= tol || depth <= 0) return est.value;
  const double m = 0.5 * (a + b);
  const auto left = gauss_kronrod15(f, a, m);
  const auto right = gauss_kronrod15(f, m, b);
  return kronrod_recurse(f, a, m, left, 0.5 * tol, depth - 1) +
         kronrod_recurse(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss–Kronrod (G7/K15) quadrature by recursive bisection.
template <class F>
double adaptive_kronrod(const F& f, double a, double b, double rel_tol,
                        double abs_tol = 1e-300, int max_depth = 30,
                        int initial_panels = 8) {
  if (a == b) return 0.0;
  const double h = (b - a) / initial_panels;
  std::vector<detail::KronrodEstimate> panels;
  panels.reserve(initial_panels);
  double coarse = 0.0;
  for (int k = 0; k < initial_panels; ++k) {
    panels.push_back(detail::gauss_kronrod15(f, a + k * h, a + (k + 1) * h));
    coarse += std::abs(panels.back().value);
  }
  const double tol = std::max(rel_tol * coarse, abs_tol) / initial_panels;
  double total = 0.0;
  for (int k = 0; k < initial_panels; ++k)
    total += detail::kronrod_recurse(f, a + k * h, a + (k + 1) * h, panels[k],
                                     tol, max_depth);
  return total;
}

// ---------------------------------------------------------------------------
// Root finding

/// Bisection on a bracket [lo, hi] with f(lo)·f(hi) ≤ 0.
template <class F>
double bisect(const F& f, double lo, double hi, double x_tol = 1e-12,
              int max_iter = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Periodic cubic spline on equally spaced knots

/// C² periodic interpolating cubic spline through samples y_k at
/// x_k = k·period/n, k = 0..n−1, with y_n ≡ y_0.
class PeriodicCubicSpline {
 public:
  PeriodicCubicSpline() = default;

  PeriodicCubicSpline(std::vector<double> values, double period)
      : y_(std::move(values)), period_(period) {
    const std::size_t n = y_.size();
    if (n < 3) throw InvalidInputError("periodic spline needs at least 3 knots");
    if (!(period > 0)) throw InvalidInputError("periodic spline needs a positive period");
    h_ = period_ / static_cast<double>(n);
    // M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h²
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double prev = y_[(i + n - 1) % n], next = y_[(i + 1) % n];
      rhs[i] = 6.0 * (next - 2.0 * y_[i] + prev) / (h_ * h_);
    }
    m_ = solve_cyclic(rhs);
  }

  double operator()(double x) const {
    const auto [i, a, b] = locate(x);
    const std::size_t j = (i + 1) % y_.size();
    return a * y_[i] + b * y_[j] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[j]) * h_ * h_ / 6.0;
  }

  double derivative(double x) const {
    const auto [i, a, b] = locate(x);
    const std::size_t j = (i + 1) % y_.size();
    return (y_[j] - y_[i]) / h_ - (3.0 * a * a - 1.0) / 6.0 * h_ * m_[i] +
           (3.0 * b * b - 1.0) / 6.0 * h_ * m_[j];
  }

  double period() const { return period_; }

 private:
  struct Cell {
    std::size_t index;
    double a, b;
  };

  Cell locate(double x) const {
    double u = std::fmod(x, period_);
    if (u < 0) u += period_;
    const std::size_t n = y_.size();
    std::size_t i = std::min(static_cast<std::size_t>(u / h_), n - 1);
    const double b = (u - static_cast<double>(i) * h_) / h_;
    return {i, 1.0 - b, b};
  }

  // Cyclic tridiagonal solve (sub = super = 1, diag = 4) via Sherman–Morrison.
  static std::vector<double> solve_cyclic(const std::vector<double>& r) {
    const std::size_t n = r.size();
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0);
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    auto thomas = [&](const std::vector<double>& rhs) {
      std::vector<double> c(n), d(n), x(n);
      c[0] = 1.0 / diag[0];
      d[0] = rhs[0] / diag[0];
      for (std::size_t i = 1; i < n; ++i) {
        const double m = diag[i] - c[i - 1];
        c[i] = 1.0 / m;
        d[i] = (rhs[i] - d[i - 1]) / m;
      }
      x[n - 1] = d[n - 1];
      for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
      return x;
    };
    const auto x = thomas(r);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = 1.0;
    const auto z = thomas(u);
    const double fact = (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
    return out;
  }

  std::vector<double> y_;
  std::vector<double> m_;
  double period_ = 1.0;
  double h_ = 1.0;
};

// ---------------------------------------------------------------------------
// Parallelism

/// Worker count: HC_THREADS if set (≥ 1), else the hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 1024));
  }
  return hw;
}

/// Runs fn(i) for i in [0, n) on a static partition. Each index writes only
/// its own slot, so the result order is independent of the thread count.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hc
