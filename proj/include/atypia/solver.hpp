#pragma once

#include <cstdint>

#include "atypia/constraints.hpp"
#include "atypia/rates.hpp"
#include "atypia/roots.hpp"

namespace atypia {

struct SolverConfig {
  int max_iters = 10000;          ///< Newton steps across all multiplier rounds
  double gradient_tol = 1e-6;     ///< projected Lagrangian gradient at convergence
  double feasibility_tol = 1e-8;  ///< largest constraint residual at convergence
  double armijo = 1e-4;
  double backtrack = 0.5;
  int restarts = 4;               ///< extra random starts on nonconvex sets
  bool random_initial = false;    ///< start convex problems from a random state instead of pi
  std::uint64_t seed = 0x5eed;
};

/// inf D(pi||rho) over the closure of `omega`.
///
/// Spectral sets are optimized over eigenvalue vectors only; linear and Bloch
/// sets over the full state in operator-basis coordinates. The status field of
/// the diagnostics is Infeasible when no start reaches residual 1e-4, and
/// NotConverged when the best iterate misses the tolerances in `cfg`.
RateResult min_rel_entropy(const ConstraintSet& omega, const SolverConfig& cfg = {});

}  // namespace atypia
