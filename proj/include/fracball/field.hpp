#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fracball/errors.hpp"
#include "fracball/geometry.hpp"

namespace fracball {

/// Where a field's evaluator is total.
enum class Support { whole_space, ball, ball_complement };

/// Sphere |x| = radius across which the field is only Hoelder continuous with
/// the given exponent. Quadratures along rays split at these spheres.
struct Kink {
  double radius = 0.0;
  double holder_exponent = 1.0;
};

/// Far-field behaviour: |f(x)| <= C |x|^growth for large |x| (negative growth
/// is decay), or f == 0 beyond `support_radius` when that is set.
struct DecayClass {
  double growth = 0.0;
  std::optional<double> support_radius;

  static DecayClass bounded() { return {}; }
  static DecayClass compact(double radius) { return {0.0, radius}; }
  static DecayClass power(double growth) { return {growth, std::nullopt}; }

  /// Whether \int |f| / (1 + |x|^{n+2s}) converges at infinity.
  bool in_tail_class(double two_s) const { return support_radius.has_value() || growth < two_s; }
};

struct FieldTraits {
  bool radial = false;
  Support support = Support::whole_space;
  /// Radius of the ball (or of the excluded ball) when support is not whole_space.
  double domain_radius = 0.0;
  DecayClass decay{};
  std::vector<Kink> kinks{};
};

/// Dense n x n matrix, used for Jacobians of vector fields.
struct Matrix {
  int dim = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  explicit Matrix(int n = 0) : dim(n) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
  double frobenius() const {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) acc += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(acc);
  }
  double trace() const {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) acc += (*this)(i, i);
    return acc;
  }
};

/// Immutable, pointwise-evaluatable real function on R^n plus the metadata the
/// integrators need. Copies share state; derived fields are new objects.
class ScalarField {
 public:
  using Evaluator = std::function<double(const Point&)>;
  using Profile = std::function<double(double)>;
  using Gradient = std::function<Point(const Point&)>;
  using Laplacian = std::function<double(const Point&)>;

  explicit ScalarField(Evaluator f, FieldTraits traits = {}) : state_(std::make_shared<State>()) {
    state_->eval = std::move(f);
    state_->traits = std::move(traits);
  }

  /// Radial field given by its profile rho -> f(rho).
  static ScalarField radial(Profile profile, FieldTraits traits = {}) {
    traits.radial = true;
    auto shared = std::make_shared<Profile>(std::move(profile));
    ScalarField field([shared](const Point& x) { return (*shared)(x.norm()); }, std::move(traits));
    field.state_->profile = shared;
    return field;
  }

  static ScalarField constant(double c) {
    FieldTraits traits;
    traits.radial = true;
    traits.decay = DecayClass::bounded();
    if (c == 0.0) traits.decay = DecayClass::compact(0.0);
    return radial([c](double) { return c; }, traits)
        .with_gradient([](const Point& x) { return Point(x.dim()); })
        .with_laplacian([](const Point&) { return 0.0; });
  }

  ScalarField with_gradient(Gradient g) const {
    ScalarField copy = clone();
    copy.state_->gradient = std::move(g);
    return copy;
  }
  ScalarField with_laplacian(Laplacian l) const {
    ScalarField copy = clone();
    copy.state_->laplacian = std::move(l);
    return copy;
  }
  /// Attach ln|f(e^{-lambda})| = log_abs(lambda) + power * lambda (radial
  /// fields). Lets norm integrals follow a singularity at the origin past the
  /// point where e^{-lambda} underflows; the linear part is kept separate so
  /// that it cancels exactly against the volume Jacobian.
  ScalarField with_log_profile(Profile log_abs, double power = 0.0) const {
    if (!is_radial()) throw DomainError("with_log_profile: field is not radial");
    ScalarField copy = clone();
    copy.state_->log_profile = std::move(log_abs);
    copy.state_->log_power = power;
    return copy;
  }
  ScalarField with_traits(FieldTraits traits) const {
    ScalarField copy = clone();
    copy.state_->traits = std::move(traits);
    return copy;
  }

  double operator()(const Point& x) const {
    check_support(x);
    return state_->eval(x);
  }

  /// Profile value at radius rho; for radial fields only.
  double at_radius(double rho, int n) const {
    if (!traits().radial) throw DomainError("at_radius: field is not radial");
    if (state_->profile) {
      check_support(Point::unit(n, 0, rho));
      return (*state_->profile)(rho);
    }
    return (*this)(Point::unit(n, 0, rho));
  }

  const FieldTraits& traits() const noexcept { return state_->traits; }
  bool is_radial() const noexcept { return state_->traits.radial; }
  bool has_gradient() const noexcept { return static_cast<bool>(state_->gradient); }
  bool has_laplacian() const noexcept { return static_cast<bool>(state_->laplacian); }
  bool has_log_profile() const noexcept { return static_cast<bool>(state_->log_profile); }
  double log_abs_at(double lambda) const {
    if (!state_->log_profile) throw DomainError("field has no logarithmic profile");
    return state_->log_profile(lambda) + state_->log_power * lambda;
  }
  /// The non-linear part log_abs(lambda) of the logarithmic profile.
  double log_abs_remainder(double lambda) const {
    if (!state_->log_profile) throw DomainError("field has no logarithmic profile");
    return state_->log_profile(lambda);
  }
  double log_power() const noexcept { return state_->log_power; }

  Point gradient(const Point& x) const {
    if (!state_->gradient) throw DomainError("field has no closed-form gradient");
    return state_->gradient(x);
  }
  double laplacian(const Point& x) const {
    if (!state_->laplacian) throw DomainError("field has no closed-form Laplacian");
    return state_->laplacian(x);
  }

  bool evaluable_at(const Point& x) const noexcept {
    const auto& t = state_->traits;
    switch (t.support) {
      case Support::whole_space:
        return true;
      case Support::ball:
        return x.norm() <= t.domain_radius;
      case Support::ball_complement:
        return x.norm() >= t.domain_radius;
    }
    return false;
  }

 private:
  struct State {
    Evaluator eval;
    std::shared_ptr<Profile> profile;
    Gradient gradient;
    Laplacian laplacian;
    Profile log_profile;
    double log_power = 0.0;
    FieldTraits traits;
  };

  ScalarField clone() const {
    ScalarField copy(*this);
    copy.state_ = std::make_shared<State>(*state_);
    return copy;
  }

  void check_support(const Point& x) const {
    if (!evaluable_at(x)) throw DomainError("field evaluated outside its declared support");
  }

  std::shared_ptr<State> state_;
};

/// Immutable vector field b : R^n -> R^n with optional closed-form derivatives.
class VectorField {
 public:
  using Evaluator = std::function<Point(const Point&)>;
  using Jacobian = std::function<Matrix(const Point&)>;
  using Divergence = std::function<double(const Point&)>;

  explicit VectorField(Evaluator f) : state_(std::make_shared<State>()) { state_->eval = std::move(f); }

  static VectorField zero() {
    return VectorField([](const Point& x) { return Point(x.dim()); })
        .with_jacobian([](const Point& x) { return Matrix(x.dim()); })
        .with_divergence([](const Point&) { return 0.0; });
  }

  VectorField with_jacobian(Jacobian j) const {
    VectorField copy = clone();
    copy.state_->jacobian = std::move(j);
    return copy;
  }
  VectorField with_divergence(Divergence d) const {
    VectorField copy = clone();
    copy.state_->divergence = std::move(d);
    return copy;
  }

  Point operator()(const Point& x) const { return state_->eval(x); }

  bool has_jacobian() const noexcept { return static_cast<bool>(state_->jacobian); }
  bool has_divergence() const noexcept {
    return static_cast<bool>(state_->divergence) || static_cast<bool>(state_->jacobian);
  }

  Matrix jacobian(const Point& x) const {
    if (!state_->jacobian) throw DomainError("vector field has no closed-form Jacobian");
    return state_->jacobian(x);
  }
  double divergence(const Point& x) const {
    if (state_->divergence) return state_->divergence(x);
    if (state_->jacobian) return state_->jacobian(x).trace();
    throw DomainError("vector field has no closed-form divergence");
  }

 private:
  struct State {
    Evaluator eval;
    Jacobian jacobian;
    Divergence divergence;
  };

  VectorField clone() const {
    VectorField copy(*this);
    copy.state_ = std::make_shared<State>(*state_);
    return copy;
  }

  std::shared_ptr<State> state_;
};

/// a*u + b*v, keeping closed-form derivatives when both operands have them.
inline ScalarField linear_combination(double a, const ScalarField& u, double b, const ScalarField& v) {
  FieldTraits traits = u.traits();
  traits.radial = u.is_radial() && v.is_radial();
  traits.decay.growth = std::max(u.traits().decay.growth, v.traits().decay.growth);
  if (u.traits().decay.support_radius && v.traits().decay.support_radius) {
    traits.decay.support_radius =
        std::max(*u.traits().decay.support_radius, *v.traits().decay.support_radius);
  } else {
    traits.decay.support_radius.reset();
  }
  traits.kinks.insert(traits.kinks.end(), v.traits().kinks.begin(), v.traits().kinks.end());
  if (v.traits().support != Support::whole_space) traits.support = v.traits().support;
  ScalarField out([=](const Point& x) { return a * u(x) + b * v(x); }, traits);
  if (u.has_gradient() && v.has_gradient())
    out = out.with_gradient([=](const Point& x) { return a * u.gradient(x) + b * v.gradient(x); });
  if (u.has_laplacian() && v.has_laplacian())
    out = out.with_laplacian([=](const Point& x) { return a * u.laplacian(x) + b * v.laplacian(x); });
  return out;
}

inline ScalarField scaled(double lambda, const ScalarField& u) {
  return linear_combination(lambda, u, 0.0, ScalarField::constant(0.0));
}

/// c+ = max(c, 0).
inline ScalarField positive_part(const ScalarField& c) {
  return ScalarField([c](const Point& x) { return std::max(c(x), 0.0); }, c.traits());
}

/// c- = -min(c, 0) >= 0, so that c = c+ - c-.
inline ScalarField negative_part(const ScalarField& c) {
  return ScalarField([c](const Point& x) { return std::max(-c(x), 0.0); }, c.traits());
}

}  // namespace fracball
