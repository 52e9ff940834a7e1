#include "atypia/roots.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "atypia/errors.hpp"

namespace atypia {

RootResult bracketed_newton(const std::function<std::pair<double, double>(double)>& fdf, double lo,
                            double hi, double abs_tol, int max_iters) {
  auto [flo, dlo] = fdf(lo);
  auto [fhi, dhi] = fdf(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericalError("bracketed_newton: no sign change on [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
  }
  // Orient so that f(a) < 0 < f(b).
  double a = flo < 0.0 ? lo : hi;
  double b = flo < 0.0 ? hi : lo;
  double x = 0.5 * (lo + hi);
  double best_x = x;
  double best_f = INFINITY;
  for (int it = 1; it <= max_iters; ++it) {
    auto [f, df] = fdf(x);
    if (std::abs(f) < std::abs(best_f)) {
      best_f = f;
      best_x = x;
    }
    if (std::abs(f) <= abs_tol) return {x, f, it};
    if (f < 0.0) a = x; else b = x;
    double next = (df != 0.0 && std::isfinite(df)) ? x - f / df : NAN;
    const double left = std::min(a, b);
    const double right = std::max(a, b);
    if (!(next > left && next < right)) next = 0.5 * (a + b);
    if (next == x || right - left <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      return {best_x, best_f, it};
    }
    x = next;
  }
  return {best_x, best_f, max_iters};
}

double solve_nu(double w, const HermitianObservable& W) {
  const Eigen::VectorXd omega = W.eigenvalues();
  const int m = static_cast<int>(omega.size());
  const double wmin = omega.minCoeff();
  const double wmax = omega.maxCoeff();
  if (!(w > wmin && w < wmax)) {
    throw DomainError("solve_nu: w must lie strictly between the extreme eigenvalues of W");
  }
  // G(nu) = h(nu) / nu with h the trace condition minus one. G is strictly
  // increasing on the admissible interval and its root is the nontrivial one.
  auto G = [&](double nu) {
    double g = 0.0;
    double dg = 0.0;
    for (int k = 0; k < m; ++k) {
      const double d = omega[k] - w;
      const double a = 1.0 + nu * d;
      g -= d / a;
      dg += d * d / (a * a);
    }
    return std::pair<double, double>{g / m, dg / m};
  };
  const double g0 = G(0.0).first;
  if (g0 == 0.0) throw DomainError("solve_nu: w equals Tr W / m, only the trivial root exists");
  // Admissible nu keeps every 1 + nu (omega_k - w) positive.
  const double nu_lo = -1.0 / (wmax - w);
  const double nu_hi = 1.0 / (w - wmin);
  double lo, hi;
  if (g0 > 0.0) {
    hi = 0.0;
    lo = 0.5 * nu_lo;
    while (G(lo).first > 0.0) lo = 0.5 * (lo + nu_lo);
  } else {
    lo = 0.0;
    hi = 0.5 * nu_hi;
    while (G(hi).first < 0.0) hi = 0.5 * (hi + nu_hi);
  }
  return bracketed_newton(G, lo, hi, 1e-15).root;
}

double solve_entropy_root(int mu, double eta, int m) {
  if (m < 2 || mu < 1 || mu > m - 1) throw DomainError("solve_entropy_root: need 1 <= mu <= m-1");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("solve_entropy_root: eta must lie in (0,1)");
  const double q = double(mu) / m;
  const double c = (1.0 - eta) * std::log(double(m));
  // D2(r||q) decreases from ln(1/(1-q)) at r = 0 to 0 at r = q.
  if (!(c < -std::log1p(-q))) {
    throw NumericalError("solve_entropy_root: no root below mu/m for mu = " + std::to_string(mu));
  }
  auto f = [&](double r) {
    const double val = binary_rel_entropy(r, q) - c;
    const double der = std::log(r / q) - std::log((1.0 - r) / (1.0 - q));
    return std::pair<double, double>{val, der};
  };
  double lo = q * 1e-3;
  while (f(lo).first < 0.0) lo *= 1e-3;
  return bracketed_newton(f, lo, q, 1e-14).root;
}

}  // namespace atypia
