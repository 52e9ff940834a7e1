#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atypia/qstate.hpp"

namespace atypia {

/// Closed relations only; strict ones are refused when parsed.
enum class Relation { Equal, GreaterEqual, LessEqual };

Relation parse_relation(const std::string& text);
const char* to_string(Relation rel);

struct LinearConstraint {
  HermitianObservable observable;
  double target;
  Relation rel;
};

enum class SpectralFunction { LambdaMax, Entropy, TraceDistance };

SpectralFunction parse_spectral_function(const std::string& text);
const char* to_string(SpectralFunction fn);
double evaluate(SpectralFunction fn, const Spectrum& spectrum);

struct SpectralConstraint {
  SpectralFunction fn;
  double target;
  Relation rel;
};

/// Qubit regions in Bloch coordinates: n.t (rel) offset, or |t - center| (rel) radius.
struct BlochRegion {
  enum class Shape { HalfSpace, Ball };
  Shape shape;
  Eigen::Vector3d vec;  ///< normal or center
  double scalar;        ///< offset or radius
  Relation rel;
};

/// Region of state space described by constraints of a single kind.
class ConstraintSet {
 public:
  enum class Kind { Linear, Spectral, Bloch };

  static ConstraintSet linear(int dim, std::vector<LinearConstraint> constraints);
  static ConstraintSet spectral(int dim, std::vector<SpectralConstraint> constraints);
  static ConstraintSet bloch(std::vector<BlochRegion> regions);

  /// {lambda_max >= 1/m}: every state.
  static ConstraintSet full_space(int dim);
  static ConstraintSet max_eigenvalue_at_least(int dim, double a);
  /// m^2 - 1 linear constraints pinning rho to pi.
  static ConstraintSet equal_to_pi(int dim);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  /// Membership depends only on the spectrum.
  bool unitarily_invariant() const { return kind_ == Kind::Spectral; }

  const std::vector<LinearConstraint>& linear_constraints() const { return linear_; }
  const std::vector<SpectralConstraint>& spectral_constraints() const { return spectral_; }
  const std::vector<BlochRegion>& bloch_regions() const { return bloch_; }

  /// Largest violation over all constraints; 0 inside.
  double violation(const DensityMatrix& rho) const;
  double violation(const Spectrum& spectrum) const;
  bool contains(const DensityMatrix& rho, double tol = 0.0) const { return violation(rho) <= tol; }
  bool contains(const Spectrum& spectrum, double tol = 0.0) const { return violation(spectrum) <= tol; }

 private:
  ConstraintSet(int dim, Kind kind) : dim_(dim), kind_(kind) {}

  int dim_;
  Kind kind_;
  std::vector<LinearConstraint> linear_;
  std::vector<SpectralConstraint> spectral_;
  std::vector<BlochRegion> bloch_;
};

/// Signed amount by which `value (rel) target` fails; <= 0 when satisfied.
double relation_violation(double value, double target, Relation rel);

}  // namespace atypia
