#include "msvou/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace msvou {
namespace {

using cd = std::complex<double>;

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1] (QUADPACK dqk15).
// Nodes are symmetric; only the non-negative half is tabulated. Odd-index
// entries (and the center) are the embedded 7-point Gauss nodes.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Segment {
  double a, b;
  cd value;
  double error;
};

struct WorseError {
  bool operator()(const Segment& x, const Segment& y) const {
    return x.error < y.error;
  }
};

// One GK15 pass over [a, b]; 15 evaluations.
Segment gk15(const std::function<cd(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);

  cd fv[15];
  // fv layout: 0..6 -> +x side (descending node), 7 -> center, 8..14 -> -x.
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(center + hl * kXgk[i]);
    fv[8 + i] = f(center - hl * kXgk[i]);
  }
  fv[7] = f(center);

  cd resk = kWgk[7] * fv[7];
  cd resg = kWg[3] * fv[7];
  double resabs = kWgk[7] * std::abs(fv[7]);
  for (int i = 0; i < 7; ++i) {
    const cd sum = fv[i] + fv[8 + i];
    resk += kWgk[i] * sum;
    resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[8 + i]));
    if (i % 2 == 1) resg += kWg[i / 2] * sum;
  }

  const cd reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fv[7] - reskh);
  for (int i = 0; i < 7; ++i) {
    resasc += kWgk[i] * (std::abs(fv[i] - reskh) + std::abs(fv[8 + i] - reskh));
  }
  resasc *= std::abs(hl);

  double err = std::abs(resk - resg) * std::abs(hl);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }

  Segment s;
  s.a = a;
  s.b = b;
  s.value = resk * hl;
  s.error = err;
  if (!std::isfinite(s.value.real()) || !std::isfinite(s.value.imag()) ||
      !std::isfinite(s.error)) {
    throw QuadratureError("non-finite integrand value encountered");
  }
  return s;
}

}  // namespace

QuadResult integrate_gk(const std::function<cd(double)>& f, double a, double b,
                        double abs_tol, long max_evals) {
  if (!(abs_tol > 0.0)) throw QuadratureError("abs_tol must be positive");
  QuadResult out;
  if (a == b) return out;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::priority_queue<Segment, std::vector<Segment>, WorseError> heap;
  Segment whole = gk15(f, a, b);
  long evals = 15;
  cd total = whole.value;
  double total_err = whole.error;
  heap.push(whole);

  const double min_width = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(a), std::abs(b)) +
                           std::numeric_limits<double>::min();
  while (total_err > abs_tol) {
    if (evals + 30 > max_evals) {
      throw QuadratureError("quadrature budget exhausted before tolerance");
    }
    Segment worst = heap.top();
    heap.pop();
    if (worst.b - worst.a < min_width) {
      throw QuadratureError("quadrature segment underflow before tolerance");
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  out.value = sign * total;
  out.error = total_err;
  out.evals = evals;
  return out;
}

QuadResult integrate_gk_real(const std::function<double(double)>& f, double a,
                             double b, double abs_tol, long max_evals) {
  return integrate_gk([&f](double x) { return cd(f(x), 0.0); }, a, b, abs_tol,
                      max_evals);
}

}  // namespace msvou
