#include "atypia/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "atypia/basis.hpp"
#include "atypia/errors.hpp"

namespace atypia {

Relation parse_relation(const std::string& text) {
  if (text == "=" || text == "==") return Relation::Equal;
  if (text == ">=" || text == "≥") return Relation::GreaterEqual;
  if (text == "<=" || text == "≤") return Relation::LessEqual;
  if (text == ">" || text == "<") {
    throw ValidationError("strict relation '" + text +
                          "' not supported: only closed sets are accepted, so use '>=' or '<=' "
                          "(the infimum over a regular set equals that over its closure)");
  }
  throw ValidationError("unknown relation '" + text + "'");
}

const char* to_string(Relation rel) {
  switch (rel) {
    case Relation::Equal: return "=";
    case Relation::GreaterEqual: return ">=";
    case Relation::LessEqual: return "<=";
  }
  return "?";
}

SpectralFunction parse_spectral_function(const std::string& text) {
  if (text == "lambda_max") return SpectralFunction::LambdaMax;
  if (text == "entropy") return SpectralFunction::Entropy;
  if (text == "trace_distance") return SpectralFunction::TraceDistance;
  throw ValidationError("unknown spectral function '" + text + "'");
}

const char* to_string(SpectralFunction fn) {
  switch (fn) {
    case SpectralFunction::LambdaMax: return "lambda_max";
    case SpectralFunction::Entropy: return "entropy";
    case SpectralFunction::TraceDistance: return "trace_distance";
  }
  return "?";
}

double evaluate(SpectralFunction fn, const Spectrum& s) {
  switch (fn) {
    case SpectralFunction::LambdaMax: return s.max();
    case SpectralFunction::Entropy: return von_neumann_entropy(s);
    case SpectralFunction::TraceDistance: {
      const double u = 1.0 / s.size();
      return 0.5 * (s.values().array() - u).abs().sum();
    }
  }
  return NAN;
}

double relation_violation(double value, double target, Relation rel) {
  switch (rel) {
    case Relation::Equal: return std::abs(value - target);
    case Relation::GreaterEqual: return target - value;
    case Relation::LessEqual: return value - target;
  }
  return NAN;
}

ConstraintSet ConstraintSet::linear(int dim, std::vector<LinearConstraint> constraints) {
  if (dim < 1) throw ValidationError("constraint set: dimension must be positive");
  if (constraints.empty()) throw ValidationError("constraint set: at least one constraint is required");
  for (const auto& c : constraints) {
    if (c.observable.dim() != dim) throw ValidationError("constraint set: observable dimension mismatch");
    if (!std::isfinite(c.target)) throw ValidationError("constraint set: target must be finite");
  }
  ConstraintSet out(dim, Kind::Linear);
  out.linear_ = std::move(constraints);
  return out;
}

ConstraintSet ConstraintSet::spectral(int dim, std::vector<SpectralConstraint> constraints) {
  if (dim < 1) throw ValidationError("constraint set: dimension must be positive");
  if (constraints.empty()) throw ValidationError("constraint set: at least one constraint is required");
  for (const auto& c : constraints) {
    if (!std::isfinite(c.target)) throw ValidationError("constraint set: target must be finite");
  }
  ConstraintSet out(dim, Kind::Spectral);
  out.spectral_ = std::move(constraints);
  return out;
}

ConstraintSet ConstraintSet::bloch(std::vector<BlochRegion> regions) {
  if (regions.empty()) throw ValidationError("constraint set: at least one constraint is required");
  for (const auto& r : regions) {
    if (!r.vec.allFinite() || !std::isfinite(r.scalar)) throw ValidationError("bloch region: non-finite data");
    if (r.shape == BlochRegion::Shape::HalfSpace && r.vec.norm() == 0.0) {
      throw ValidationError("bloch region: half-space normal must be nonzero");
    }
    if (r.shape == BlochRegion::Shape::Ball && r.scalar < 0.0) {
      throw ValidationError("bloch region: radius must be nonnegative");
    }
  }
  ConstraintSet out(2, Kind::Bloch);
  out.bloch_ = std::move(regions);
  return out;
}

ConstraintSet ConstraintSet::full_space(int dim) {
  return spectral(dim, {{SpectralFunction::LambdaMax, 1.0 / dim, Relation::GreaterEqual}});
}

ConstraintSet ConstraintSet::max_eigenvalue_at_least(int dim, double a) {
  return spectral(dim, {{SpectralFunction::LambdaMax, a, Relation::GreaterEqual}});
}

ConstraintSet ConstraintSet::equal_to_pi(int dim) {
  if (dim < 2) throw ValidationError("equal_to_pi: dimension must be at least 2");
  const OperatorBasis& basis = operator_basis(dim);
  std::vector<LinearConstraint> cs;
  for (int r = 1; r < basis.size(); ++r) {
    cs.push_back({HermitianObservable(basis[r]), 0.0, Relation::Equal});
  }
  return linear(dim, std::move(cs));
}

double ConstraintSet::violation(const Spectrum& spectrum) const {
  if (kind_ != Kind::Spectral) throw ValidationError("violation(Spectrum) needs a spectral constraint set");
  if (spectrum.size() != dim_) throw ValidationError("violation: dimension mismatch");
  double worst = -kInfinity;
  for (const auto& c : spectral_) {
    worst = std::max(worst, relation_violation(evaluate(c.fn, spectrum), c.target, c.rel));
  }
  return std::max(worst, 0.0);
}

double ConstraintSet::violation(const DensityMatrix& rho) const {
  if (rho.dim() != dim_) throw ValidationError("violation: dimension mismatch");
  double worst = 0.0;
  switch (kind_) {
    case Kind::Spectral:
      return violation(rho.spectrum());
    case Kind::Linear:
      for (const auto& c : linear_) {
        worst = std::max(worst, relation_violation(c.observable.expectation(rho), c.target, c.rel));
      }
      return worst;
    case Kind::Bloch: {
      const Eigen::Vector3d t = bloch_from_qubit(rho).vector();
      for (const auto& r : bloch_) {
        const double v = r.shape == BlochRegion::Shape::HalfSpace ? r.vec.dot(t) : (t - r.vec).norm();
        worst = std::max(worst, relation_violation(v, r.scalar, r.rel));
      }
      return worst;
    }
  }
  return worst;
}

}  // namespace atypia
