#pragma once

#include <functional>

#include "atypia/qstate.hpp"

namespace atypia {

struct RootResult {
  double root;
  double residual;
  int iterations;
};

/// Newton iteration kept inside a sign-changing bracket [lo, hi]; falls back to
/// bisection whenever the Newton step would leave it or stalls.
/// `fdf` returns (f(x), f'(x)). Throws NumericalError without a sign change.
RootResult bracketed_newton(const std::function<std::pair<double, double>(double)>& fdf, double lo,
                            double hi, double abs_tol = 1e-13, int max_iters = 400);

/// Nonzero nu with (1/m) Tr[((1 - w nu) I + nu W)^{-1}] = 1 and (1 - w nu) I + nu W > 0.
/// Requires lambda_min(W) < w < lambda_max(W) and w != Tr W / m.
double solve_nu(double w, const HermitianObservable& W);

/// Smaller root r in (0, mu/m] of D2(r || mu/m) = (1 - eta) ln m, D2 the binary
/// relative entropy. Throws NumericalError when no root exists in that range.
double solve_entropy_root(int mu, double eta, int m);

}  // namespace atypia
