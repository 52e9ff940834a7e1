#include "atypia/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "atypia/basis.hpp"
#include "atypia/errors.hpp"
#include "atypia/log.hpp"
#include "atypia/random.hpp"
#include "atypia/sampler.hpp"

namespace atypia {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Smooth function of the optimization variable. Returns false outside its domain.
using Smooth = std::function<bool(const VectorXd&, double&, VectorXd&, MatrixXd&)>;

struct Term {
  bool equality;  // c = 0, otherwise c >= 0
  bool concave;   // c concave (always true for affine c)
  Smooth fn;
};

struct Problem {
  int size = 0;
  Smooth objective;
  std::vector<Term> terms;
};

struct Outcome {
  VectorXd x;
  double f = kInfinity;
  double violation = kInfinity;
  double stationarity = kInfinity;
  int iterations = 0;
  bool exhausted = false;  ///< stopped on the iteration budget
};

double term_violation(const Term& t, double c) { return t.equality ? std::abs(c) : std::max(0.0, -c); }

/// Augmented Lagrangian with modified Newton inner solves.
Outcome augmented_lagrangian(const Problem& prob, VectorXd x, const SolverConfig& cfg, int& budget) {
  const int d = prob.size;
  const std::size_t nt = prob.terms.size();
  VectorXd lam = VectorXd::Zero(nt);
  double mu = 10.0;
  double prev_violation = kInfinity;

  std::vector<double> cval(nt);
  std::vector<VectorXd> cgrad(nt, VectorXd(d));
  std::vector<MatrixXd> chess(nt, MatrixXd(d, d));
  VectorXd fg(d);
  MatrixXd fh(d, d);

  // L, gradient and Hessian at x; false outside the domain.
  auto lagrangian = [&](const VectorXd& z, double& L, VectorXd* g, MatrixXd* H) {
    double f;
    if (!prob.objective(z, f, fg, fh)) return false;
    L = f;
    if (g) *g = fg;
    if (H) *H = fh;
    for (std::size_t i = 0; i < nt; ++i) {
      double c;
      if (!prob.terms[i].fn(z, c, cgrad[i], chess[i])) return false;
      cval[i] = c;
      const double l = lam[i];
      if (prob.terms[i].equality || c < l / mu) {
        L += -l * c + 0.5 * mu * c * c;
        const double coef = -l + mu * c;
        if (g) *g += coef * cgrad[i];
        if (H) *H += mu * cgrad[i] * cgrad[i].transpose() + coef * chess[i];
      } else {
        L += -0.5 * l * l / mu;
      }
    }
    return std::isfinite(L);
  };

  Outcome out;
  for (int outer = 0; outer < 60 && budget > 0; ++outer) {
    // Inner: minimize L(., lam, mu).
    for (int inner = 0; inner < 500 && budget > 0; ++inner) {
      double L;
      VectorXd g(d);
      MatrixXd H(d, d);
      if (!lagrangian(x, L, &g, &H)) break;
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
      const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
      const bool saddle = es.eigenvalues()[0] < -1e-8 * std::max(1.0, scale);
      if (g.norm() <= 1e-12 && !saddle) break;
      --budget;
      ++out.iterations;
      VectorXd step;
      double slope;
      if (g.norm() <= 1e-12) {
        // Stationary but not a minimum (e.g. pi under an entropy cap): follow
        // the most negative curvature direction.
        step = es.eigenvectors().col(0) * 0.1 / std::sqrt(double(d));
        slope = 0.5 * es.eigenvalues()[0] * step.squaredNorm();
      } else {
        VectorXd ev = es.eigenvalues().cwiseAbs();
        ev = ev.cwiseMax(std::max(1e-12, 1e-10 * scale));
        step = -es.eigenvectors() * (es.eigenvectors().transpose() * g).cwiseQuotient(ev);
        slope = g.dot(step);
      }
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-16) {
        const VectorXd trial = x + alpha * step;
        double Lt;
        if (lagrangian(trial, Lt, nullptr, nullptr) &&
            Lt <= L + cfg.armijo * alpha * slope + 1e-15 * std::abs(L)) {
          moved = (trial - x).norm() > 0.0;
          x = trial;
          break;
        }
        alpha *= cfg.backtrack;
      }
      if (!moved) break;
      if ((alpha * step).norm() <= 1e-15 * (1.0 + x.norm())) break;
    }

    double f;
    if (!prob.objective(x, f, fg, fh)) break;
    double violation = 0.0;
    double slack = 0.0;  // complementarity: an active multiplier needs c = 0
    for (std::size_t i = 0; i < nt; ++i) {
      double c;
      prob.terms[i].fn(x, c, cgrad[i], chess[i]);
      cval[i] = c;
      violation = std::max(violation, term_violation(prob.terms[i], c));
      lam[i] = prob.terms[i].equality ? lam[i] - mu * c : std::max(0.0, lam[i] - mu * c);
      if (!prob.terms[i].equality) slack = std::max(slack, std::abs(std::min(lam[i], c)));
    }
    VectorXd grad_lag = fg;
    for (std::size_t i = 0; i < nt; ++i) grad_lag -= lam[i] * cgrad[i];
    out.x = x;
    out.f = f;
    out.violation = violation;
    out.stationarity = std::max(grad_lag.norm(), slack);
    const double progress = std::max(violation, slack);
    if (progress <= 1e-13 && out.stationarity <= 1e-3 * cfg.gradient_tol) break;
    if (progress > 0.25 * prev_violation) mu = std::min(mu * 10.0, 1e12);
    prev_violation = progress;
    log().trace("multiplier round {}: f={:.12g} violation={:.3e} slack={:.3e} mu={:.1e}", outer, f, violation,
                slack, mu);
  }
  out.exhausted = budget <= 0;
  return out;
}

// ---------------------------------------------------------------- spectral

// Elementary constraint on an eigenvalue vector p: coef.p - b (rel 0), or H(p) - b.
struct Elementary {
  bool entropy = false;
  VectorXd coef;
  double b = 0.0;
  Relation rel = Relation::Equal;
};

using Clause = std::vector<Elementary>;

Elementary linear_elem(const VectorXd& coef, double b, Relation rel) { return {false, coef, b, rel}; }

VectorXd indicator(int m, const std::vector<int>& idx) {
  VectorXd v = VectorXd::Zero(m);
  for (int k : idx) v[k] = 1.0;
  return v;
}

std::vector<std::vector<int>> subsets(int m, bool representatives) {
  std::vector<std::vector<int>> out;
  if (representatives) {
    for (int s = 1; s < m; ++s) {
      std::vector<int> idx(s);
      for (int k = 0; k < s; ++k) idx[k] = k;
      out.push_back(idx);
    }
    return out;
  }
  if (m > 12) throw ValidationError("trace-distance constraints are limited to m <= 12");
  for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
    std::vector<int> idx;
    for (int k = 0; k < m; ++k) {
      if (mask & (1u << k)) idx.push_back(k);
    }
    out.push_back(idx);
  }
  return out;
}

bool breaks_symmetry(const SpectralConstraint& c) {
  if (c.fn == SpectralFunction::Entropy) return false;
  return c.rel != Relation::LessEqual;
}

/// Alternatives whose union is the set described by `c`.
std::vector<Clause> expand(const SpectralConstraint& c, int m, bool representatives) {
  std::vector<Clause> alts;
  switch (c.fn) {
    case SpectralFunction::Entropy:
      alts.push_back({Elementary{true, VectorXd(), c.target, c.rel}});
      break;
    case SpectralFunction::LambdaMax: {
      if (c.rel == Relation::LessEqual) {
        Clause cl;
        for (int k = 0; k < m; ++k) cl.push_back(linear_elem(indicator(m, {k}), c.target, Relation::LessEqual));
        alts.push_back(cl);
        break;
      }
      const int count = representatives ? 1 : m;
      for (int k = 0; k < count; ++k) {
        Clause cl{linear_elem(indicator(m, {k}), c.target, c.rel)};
        if (c.rel == Relation::Equal) {
          for (int j = 0; j < m; ++j) {
            if (j != k) cl.push_back(linear_elem(indicator(m, {j}), c.target, Relation::LessEqual));
          }
        }
        alts.push_back(cl);
      }
      break;
    }
    case SpectralFunction::TraceDistance: {
      // TD(p) = max over proper subsets S of sum_S p - |S|/m.
      if (c.rel == Relation::LessEqual) {
        Clause cl;
        for (const auto& s : subsets(m, false)) {
          cl.push_back(linear_elem(indicator(m, s), c.target + double(s.size()) / m, Relation::LessEqual));
        }
        alts.push_back(cl);
        break;
      }
      for (const auto& s : subsets(m, representatives)) {
        Clause cl{linear_elem(indicator(m, s), c.target + double(s.size()) / m, c.rel)};
        if (c.rel == Relation::Equal) {
          for (const auto& o : subsets(m, false)) {
            cl.push_back(linear_elem(indicator(m, o), c.target + double(o.size()) / m, Relation::LessEqual));
          }
        }
        alts.push_back(cl);
      }
      break;
    }
  }
  return alts;
}

enum class ClauseClass { Regular, Singular, Empty };

/// A clause forcing sum_S p >= 1 on a proper S only meets the simplex boundary.
ClauseClass classify(const Clause& cl, int m) {
  ClauseClass out = ClauseClass::Regular;
  for (const auto& e : cl) {
    if (e.entropy || e.rel == Relation::LessEqual) continue;
    const bool unit = (e.coef.array() == 0.0 || e.coef.array() == 1.0).all();
    const int size = static_cast<int>(e.coef.sum());
    if (!unit || size == 0 || size == m) continue;
    if (e.b > 1.0 + 1e-12) return ClauseClass::Empty;
    if (e.b >= 1.0 - 1e-12) out = ClauseClass::Singular;
  }
  return out;
}

struct SpectralSolve {
  Outcome outcome;
  VectorXd p;
};

SpectralSolve solve_clause(const Clause& clause, int m, bool force_random, const SolverConfig& cfg,
                           int& budget, int& restarts_used) {
  // p = pi + Z y with Z an orthonormal basis of the sum-zero subspace.
  const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(VectorXd::Ones(m)).householderQ();
  const MatrixXd Z = Q.rightCols(m - 1);
  const VectorXd pi = VectorXd::Constant(m, 1.0 / m);
  auto to_p = [&](const VectorXd& y) -> VectorXd { return pi + Z * y; };

  Problem prob;
  prob.size = m - 1;
  prob.objective = [&, m](const VectorXd& y, double& f, VectorXd& g, MatrixXd& H) {
    const VectorXd p = to_p(y);
    if ((p.array() <= 0.0).any()) return false;
    f = -(p.array() * m).log().sum() / m;
    const VectorXd gp = -(p.array().inverse()) / m;
    const VectorXd hp = p.array().square().inverse() / m;
    g = Z.transpose() * gp;
    H = Z.transpose() * hp.asDiagonal() * Z;
    return true;
  };
  bool convex = true;
  for (const auto& e : clause) {
    Term t;
    t.equality = e.rel == Relation::Equal;
    const double sign = e.rel == Relation::LessEqual ? -1.0 : 1.0;
    if (e.entropy) {
      // H(p) is concave: H - b >= 0 is a convex constraint, the others are not.
      t.concave = e.rel == Relation::GreaterEqual;
      convex = convex && t.concave;
      t.fn = [&, e, sign](const VectorXd& y, double& c, VectorXd& g, MatrixXd& H) {
        const VectorXd p = to_p(y);
        if ((p.array() <= 0.0).any()) return false;
        c = sign * (-(p.array() * p.array().log()).sum() - e.b);
        g = sign * (Z.transpose() * (-(p.array().log() + 1.0)).matrix());
        H = sign * (Z.transpose() * (-(p.array().inverse())).matrix().asDiagonal() * Z);
        return true;
      };
    } else {
      t.concave = true;
      const VectorXd gy = sign * (Z.transpose() * e.coef);
      const double c0 = sign * (e.coef.dot(pi) - e.b);
      t.fn = [gy, c0](const VectorXd& y, double& c, VectorXd& g, MatrixXd& H) {
        c = c0 + gy.dot(y);
        g = gy;
        H.setZero(y.size(), y.size());
        return true;
      };
    }
    prob.terms.push_back(std::move(t));
  }

  const int starts = convex ? 1 : 1 + cfg.restarts;
  SeededStream rng(cfg.seed, 0);
  SpectralSolve best;
  for (int s = 0; s < starts; ++s) {
    VectorXd y = VectorXd::Zero(m - 1);
    if (!convex || cfg.random_initial || force_random || s > 0) {
      VectorXd p(m);
      for (int k = 0; k < m; ++k) p[k] = -std::log(rng.uniform());
      p /= p.sum();
      if (convex) p = 0.5 * pi + 0.5 * p;
      y = Z.transpose() * (p - pi);
    }
    ++restarts_used;
    Outcome o = augmented_lagrangian(prob, y, cfg, budget);
    const bool better = (o.violation <= 1e-6 && best.outcome.violation > 1e-6) ||
                        ((o.violation <= 1e-6) == (best.outcome.violation <= 1e-6) && o.f < best.outcome.f) ||
                        (best.outcome.violation > 1e-6 && o.violation < best.outcome.violation);
    if (best.outcome.x.size() == 0 || better) {
      best.outcome = o;
      best.p = o.x.size() ? to_p(o.x) : pi;
    }
  }
  return best;
}

// ---------------------------------------------------------------- matrix

Outcome solve_matrix(const ConstraintSet& omega, const SolverConfig& cfg, int& budget, int& restarts_used,
                     Eigen::MatrixXcd& rho_out) {
  const int m = omega.dim();
  const OperatorBasis& basis = operator_basis(m);
  const int d = m * m - 1;
  auto full = [&](const VectorXd& t) {
    VectorXd u(m * m);
    u[0] = 1.0;
    u.tail(d) = t;
    return basis.combine(u);
  };

  Problem prob;
  prob.size = d;
  prob.objective = [&, m, d](const VectorXd& t, double& f, VectorXd& g, MatrixXd& H) {
    const Eigen::MatrixXcd M = full(t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    const VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) return false;
    f = -ev.array().log().sum() / m;
    const Eigen::MatrixXcd Minv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    std::vector<Eigen::MatrixXcd> B(d);
    g.resize(d);
    for (int r = 0; r < d; ++r) {
      B[r] = Minv * basis[r + 1];
      g[r] = -B[r].trace().real() / m;
    }
    H.resize(d, d);
    for (int r = 0; r < d; ++r) {
      for (int s = r; s < d; ++s) {
        const double v = (B[r].transpose().array() * B[s].array()).sum().real() / m;
        H(r, s) = v;
        H(s, r) = v;
      }
    }
    return true;
  };

  bool convex = true;
  for (const auto& lc : omega.linear_constraints()) {
    const VectorXd coords = basis.coordinates(lc.observable.matrix());
    const double sign = lc.rel == Relation::LessEqual ? -1.0 : 1.0;
    const VectorXd gy = sign * coords.tail(d);
    const double c0 = sign * (coords[0] - lc.target);
    prob.terms.push_back({lc.rel == Relation::Equal, true, [gy, c0](const VectorXd& t, double& c, VectorXd& g, MatrixXd& H) {
                            c = c0 + gy.dot(t);
                            g = gy;
                            H.setZero(t.size(), t.size());
                            return true;
                          }});
  }
  for (const auto& br : omega.bloch_regions()) {
    const double sign = br.rel == Relation::LessEqual ? -1.0 : 1.0;
    Term term;
    term.equality = br.rel == Relation::Equal;
    if (br.shape == BlochRegion::Shape::HalfSpace) {
      term.concave = true;
      const VectorXd n = sign * br.vec;
      const double b = sign * br.scalar;
      term.fn = [n, b](const VectorXd& t, double& c, VectorXd& g, MatrixXd& H) {
        c = n.dot(t) - b;
        g = n;
        H.setZero(3, 3);
        return true;
      };
    } else {
      // |t - center|^2 - r^2, sign-flipped for "<=" (concave, convex region).
      term.concave = br.rel == Relation::LessEqual;
      const VectorXd center = br.vec;
      const double r2 = br.scalar * br.scalar;
      term.fn = [center, r2, sign](const VectorXd& t, double& c, VectorXd& g, MatrixXd& H) {
        c = sign * ((t - center).squaredNorm() - r2);
        g = 2.0 * sign * (t - center);
        H = 2.0 * sign * MatrixXd::Identity(3, 3);
        return true;
      };
    }
    convex = convex && term.concave;
    prob.terms.push_back(std::move(term));
  }

  const int starts = convex ? 1 : 1 + cfg.restarts;
  SeededStream rng(cfg.seed, 1);
  Outcome best;
  for (int s = 0; s < starts; ++s) {
    VectorXd t = VectorXd::Zero(d);
    if (!convex || cfg.random_initial || s > 0) {
      const DensityMatrix r = sample_induced_state(m, m, rng);
      const Eigen::MatrixXcd M = 0.5 * Eigen::MatrixXcd::Identity(m, m) + 0.5 * m * r.matrix();
      t = basis.coordinates(M).tail(d);
    }
    ++restarts_used;
    Outcome o = augmented_lagrangian(prob, t, cfg, budget);
    const bool ok = o.violation <= 1e-6;
    const bool best_ok = best.violation <= 1e-6;
    if (best.x.size() == 0 || (ok && !best_ok) || (ok == best_ok && (ok ? o.f < best.f : o.violation < best.violation))) {
      best = o;
    }
  }
  if (best.x.size()) rho_out = full(best.x) / double(m);
  return best;
}

SolveStatus classify_outcome(const Outcome& o, const SolverConfig& cfg) {
  if (!(o.violation < 1e-4)) return o.exhausted ? SolveStatus::NotConverged : SolveStatus::Infeasible;
  if (o.violation <= cfg.feasibility_tol && o.stationarity <= cfg.gradient_tol) return SolveStatus::Converged;
  return SolveStatus::NotConverged;
}

}  // namespace

RateResult min_rel_entropy(const ConstraintSet& omega, const SolverConfig& cfg) {
  if (cfg.max_iters <= 0 || !(cfg.gradient_tol > 0.0) || !(cfg.feasibility_tol > 0.0) ||
      !(cfg.backtrack > 0.0 && cfg.backtrack < 1.0) || !(cfg.armijo > 0.0 && cfg.armijo < 1.0) || cfg.restarts < 0) {
    throw ValidationError("solver configuration: tolerances must be positive");
  }
  const int m = omega.dim();
  RateResult out;
  out.dim = m;
  out.diagnostics.status = SolveStatus::Converged;

  const DensityMatrix pi = DensityMatrix::maximally_mixed(m);
  if (omega.violation(pi) <= 1e-12) {
    out.rate = 0.0;
    out.minimizer = pi;
    return out;
  }
  if (m == 1) {
    out.rate = kInfinity;
    out.diagnostics.status = SolveStatus::Infeasible;
    return out;
  }

  int budget = cfg.max_iters;
  int restarts = 0;
  if (omega.kind() != ConstraintSet::Kind::Spectral) {
    Eigen::MatrixXcd rho;
    const Outcome o = solve_matrix(omega, cfg, budget, restarts, rho);
    out.diagnostics.status = classify_outcome(o, cfg);
    out.diagnostics.iterations = o.iterations;
    out.diagnostics.restarts = restarts;
    out.diagnostics.constraint_residual = o.violation;
    out.diagnostics.stationarity = o.stationarity;
    if (out.diagnostics.status == SolveStatus::Infeasible) {
      out.rate = kInfinity;
      return out;
    }
    out.rate = o.f;
    out.minimizer = DensityMatrix::trusted(0.5 * (rho + rho.adjoint()));
    return out;
  }

  // Spectral: the set is a union of clause combinations over eigenvalue vectors.
  const auto& cons = omega.spectral_constraints();
  const int breakers = static_cast<int>(std::count_if(cons.begin(), cons.end(), breaks_symmetry));
  std::vector<Clause> combos{Clause{}};
  for (const auto& c : cons) {
    const std::vector<Clause> alts = expand(c, m, breakers <= 1);
    std::vector<Clause> next;
    for (const auto& base : combos) {
      for (const auto& alt : alts) {
        Clause merged = base;
        merged.insert(merged.end(), alt.begin(), alt.end());
        next.push_back(std::move(merged));
      }
    }
    combos = std::move(next);
    if (combos.size() > 4096) throw ValidationError("spectral constraint set too large to enumerate");
  }

  bool any_singular = false;
  bool have = false;
  Outcome best;
  VectorXd best_p;
  SolveStatus best_status = SolveStatus::Infeasible;
  for (const auto& clause : combos) {
    const ClauseClass cls = classify(clause, m);
    if (cls == ClauseClass::Empty) continue;
    if (cls == ClauseClass::Singular) {
      any_singular = true;
      continue;
    }
    const SpectralSolve s = solve_clause(clause, m, false, cfg, budget, restarts);
    out.diagnostics.iterations += s.outcome.iterations;
    const SolveStatus st = classify_outcome(s.outcome, cfg);
    if (st == SolveStatus::Infeasible) continue;
    const bool better_status = st == SolveStatus::Converged && best_status != SolveStatus::Converged;
    const bool same_status = st == best_status || (st != SolveStatus::Converged) == (best_status != SolveStatus::Converged);
    if (!have || better_status || (same_status && s.outcome.f < best.f - 1e-12)) {
      have = true;
      best = s.outcome;
      best_p = s.p;
      best_status = st;
    }
  }
  out.diagnostics.restarts = restarts;
  if (!have) {
    out.rate = kInfinity;
    out.diagnostics.status = any_singular ? SolveStatus::Converged : SolveStatus::Infeasible;
    return out;
  }
  out.rate = best.f;
  out.diagnostics.status = best_status;
  out.diagnostics.constraint_residual = best.violation;
  out.diagnostics.stationarity = best.stationarity;
  out.minimizer = DensityMatrix::diagonal(best_p / best_p.sum());
  return out;
}

}  // namespace atypia
