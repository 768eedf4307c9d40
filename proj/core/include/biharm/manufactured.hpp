#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "biharm/dg_space.hpp"
#include "biharm/forms.hpp"

namespace biharm {

/// Truncated bivariate Taylor expansion of order 4 about a point:
/// the coefficient (i, j) multiplies dx^i dy^j.
class Taylor2 {
 public:
  static constexpr int kOrder = 4;

  Taylor2() = default;
  explicit Taylor2(double constant) { c_[0] = constant; }

  static Taylor2 variable_x(double x0);
  static Taylor2 variable_y(double y0);

  double value() const { return c_[0]; }
  double coeff(int i, int j) const { return c_[index(i, j)]; }
  double& coeff(int i, int j) { return c_[index(i, j)]; }
  /// d^(i+j) / dx^i dy^j at the expansion point.
  double derivative(int i, int j) const;

  Taylor2& operator+=(const Taylor2& o);
  Taylor2& operator-=(const Taylor2& o);
  Taylor2& operator*=(double s);

  friend Taylor2 operator+(Taylor2 a, const Taylor2& b) { return a += b; }
  friend Taylor2 operator-(Taylor2 a, const Taylor2& b) { return a -= b; }
  friend Taylor2 operator*(Taylor2 a, double s) { return a *= s; }
  friend Taylor2 operator*(double s, Taylor2 a) { return a *= s; }
  friend Taylor2 operator*(const Taylor2& a, const Taylor2& b);

  /// g(a + h) = sum_k g^(k)(a) / k! h^k for the non-constant part h.
  Taylor2 compose(const std::array<double, kOrder + 1>& derivatives) const;

 private:
  static constexpr int index(int i, int j) { return i * (kOrder + 1) + j; }
  std::array<double, (kOrder + 1) * (kOrder + 1)> c_{};
};

Taylor2 sin(const Taylor2& a);
Taylor2 cos(const Taylor2& a);
Taylor2 exp(const Taylor2& a);

/// Spatial factor of a separable solution, written over Taylor2 arguments.
using Profile = std::function<Taylor2(const Taylor2& x, const Taylor2& y)>;

/// Value, gradient, Laplacian, grad-Laplacian and bilaplacian of a profile.
Jet evaluate_profile(const Profile& profile, Point p);

/// sin^2(pi x) sin^2(pi y).
Profile sin_squared_profile();
/// sin^2(pi x) sin^2(pi y) exp(-10 (x^2 + y^2)).
Profile gaussian_bump_profile();

/// u(x, y, t) = tau(t) * amplitude * w(x, y).
class ManufacturedSolution {
 public:
  ManufacturedSolution(std::string name, Profile profile, double amplitude, std::function<double(double)> tau,
                       std::function<double(double)> tau_dot);

  const std::string& name() const { return name_; }

  /// Amplitude-scaled spatial jet.
  Jet spatial(Point p) const;
  double tau(double t) const { return tau_(t); }
  double tau_dot(double t) const { return tau_dot_(t); }

  double value(Point p, double t) const;
  double time_derivative(Point p, double t) const;
  Point gradient(Point p, double t) const;
  double laplacian(Point p, double t) const;
  double bilaplacian(Point p, double t) const;
  /// f = u_t + bilap u.
  double forcing(Point p, double t) const;

  SpaceFunction at(double t) const;
  SpaceFunction initial() const { return at(0.0); }
  SpaceTimeFunction forcing_function() const;
  SpaceTimeFunction value_function() const;
  /// (1/(t1-t0)) int_{t0}^{t1} f dt with the 3-point Gauss rule, evaluating
  /// the spatial jet once per point.
  SpaceFunction averaged_forcing(double t0, double t1) const;

 private:
  std::string name_;
  Profile profile_;
  double amplitude_;
  std::function<double(double)> tau_;
  std::function<double(double)> tau_dot_;
  // Spatial jets keyed by point; quadrature points repeat across time steps.
  struct JetCache;
  std::shared_ptr<JetCache> cache_;
};

/// sin(pi t) * 100 sin^2(pi x) sin^2(pi y) exp(-10 (x^2 + y^2)).
ManufacturedSolution solution_u1();
/// sin(20 pi t) * sin^2(pi x) sin^2(pi y) exp(-10 (x^2 + y^2)).
ManufacturedSolution solution_u2();
/// Lookup by name ("u1" or "u2"); throws std::invalid_argument otherwise.
ManufacturedSolution solution_by_name(const std::string& name);

}  // namespace biharm
