#include "biharm/manufactured.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace biharm {

namespace {
constexpr int N = Taylor2::kOrder;
constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0, 24.0};
}  // namespace

Taylor2 Taylor2::variable_x(double x0) {
  Taylor2 t(x0);
  t.coeff(1, 0) = 1.0;
  return t;
}

Taylor2 Taylor2::variable_y(double y0) {
  Taylor2 t(y0);
  t.coeff(0, 1) = 1.0;
  return t;
}

double Taylor2::derivative(int i, int j) const {
  if (i < 0 || j < 0 || i + j > N) throw std::out_of_range("Taylor2::derivative: order exceeds truncation");
  return coeff(i, j) * kFactorial[i] * kFactorial[j];
}

Taylor2& Taylor2::operator+=(const Taylor2& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Taylor2& Taylor2::operator-=(const Taylor2& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Taylor2& Taylor2::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
  Taylor2 out;
  for (int i1 = 0; i1 <= N; ++i1)
    for (int j1 = 0; i1 + j1 <= N; ++j1) {
      const double av = a.coeff(i1, j1);
      if (av == 0.0) continue;
      for (int i2 = 0; i1 + j1 + i2 <= N; ++i2)
        for (int j2 = 0; i1 + j1 + i2 + j2 <= N; ++j2) out.coeff(i1 + i2, j1 + j2) += av * b.coeff(i2, j2);
    }
  return out;
}

Taylor2 Taylor2::compose(const std::array<double, N + 1>& derivatives) const {
  Taylor2 h = *this;
  h.c_[0] = 0.0;
  Taylor2 out(derivatives[0]);
  Taylor2 power(1.0);
  for (int k = 1; k <= N; ++k) {
    power = power * h;
    out += (derivatives[k] / kFactorial[k]) * power;
  }
  return out;
}

Taylor2 sin(const Taylor2& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return a.compose({s, c, -s, -c, s});
}

Taylor2 cos(const Taylor2& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return a.compose({c, -s, -c, s, c});
}

Taylor2 exp(const Taylor2& a) {
  const double e = std::exp(a.value());
  return a.compose({e, e, e, e, e});
}

Jet evaluate_profile(const Profile& profile, Point p) {
  const Taylor2 w = profile(Taylor2::variable_x(p.x), Taylor2::variable_y(p.y));
  Jet j;
  j.value = w.value();
  j.grad = {w.derivative(1, 0), w.derivative(0, 1)};
  j.lap = w.derivative(2, 0) + w.derivative(0, 2);
  j.grad_lap = {w.derivative(3, 0) + w.derivative(1, 2), w.derivative(2, 1) + w.derivative(0, 3)};
  j.bilap = w.derivative(4, 0) + 2.0 * w.derivative(2, 2) + w.derivative(0, 4);
  return j;
}

Profile sin_squared_profile() {
  return [](const Taylor2& x, const Taylor2& y) {
    const Taylor2 sx = sin(std::numbers::pi * x);
    const Taylor2 sy = sin(std::numbers::pi * y);
    return (sx * sx) * (sy * sy);
  };
}

Profile gaussian_bump_profile() {
  return [](const Taylor2& x, const Taylor2& y) {
    const Taylor2 sx = sin(std::numbers::pi * x);
    const Taylor2 sy = sin(std::numbers::pi * y);
    return (sx * sx) * (sy * sy) * exp(-10.0 * (x * x + y * y));
  };
}

ManufacturedSolution::ManufacturedSolution(std::string name, Profile profile, double amplitude,
                                           std::function<double(double)> tau, std::function<double(double)> tau_dot)
    : name_(std::move(name)),
      profile_(std::move(profile)),
      amplitude_(amplitude),
      tau_(std::move(tau)),
      tau_dot_(std::move(tau_dot)),
      cache_(std::make_shared<JetCache>()) {}

struct ManufacturedSolution::JetCache {
  static constexpr std::size_t kMaxEntries = 1 << 21;

  struct Key {
    std::uint64_t x, y;
    bool operator==(const Key&) const = default;
  };
  struct Hash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>{}(k.x * 0x9e3779b97f4a7c15ULL ^ k.y); }
  };

  std::mutex mutex;
  std::unordered_map<Key, Jet, Hash> jets;
};

Jet ManufacturedSolution::spatial(Point p) const {
  const JetCache::Key key{std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y)};
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->jets.find(key); it != cache_->jets.end()) return it->second;
  }
  Jet j = evaluate_profile(profile_, p);
  j *= amplitude_;
  std::lock_guard lock(cache_->mutex);
  if (cache_->jets.size() >= JetCache::kMaxEntries) cache_->jets.clear();
  cache_->jets.emplace(key, j);
  return j;
}

double ManufacturedSolution::value(Point p, double t) const { return tau_(t) * spatial(p).value; }

double ManufacturedSolution::time_derivative(Point p, double t) const { return tau_dot_(t) * spatial(p).value; }

Point ManufacturedSolution::gradient(Point p, double t) const { return tau_(t) * spatial(p).grad; }

double ManufacturedSolution::laplacian(Point p, double t) const { return tau_(t) * spatial(p).lap; }

double ManufacturedSolution::bilaplacian(Point p, double t) const { return tau_(t) * spatial(p).bilap; }

double ManufacturedSolution::forcing(Point p, double t) const {
  const Jet j = spatial(p);
  return tau_dot_(t) * j.value + tau_(t) * j.bilap;
}

SpaceFunction ManufacturedSolution::at(double t) const {
  return [self = *this, t](Point p) { return self.value(p, t); };
}

SpaceTimeFunction ManufacturedSolution::forcing_function() const {
  return [self = *this](Point p, double t) { return self.forcing(p, t); };
}

SpaceTimeFunction ManufacturedSolution::value_function() const {
  return [self = *this](Point p, double t) { return self.value(p, t); };
}

SpaceFunction ManufacturedSolution::averaged_forcing(double t0, double t1) const {
  const IntervalRule& rule = time_rule(3);
  double mean_tau = 0.0;
  double mean_tau_dot = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = t0 + (t1 - t0) * rule.points[q];
    mean_tau += rule.weights[q] * tau_(t);
    mean_tau_dot += rule.weights[q] * tau_dot_(t);
  }
  return [self = *this, mean_tau, mean_tau_dot](Point p) {
    const Jet j = self.spatial(p);
    return mean_tau_dot * j.value + mean_tau * j.bilap;
  };
}

ManufacturedSolution solution_u1() {
  constexpr double pi = std::numbers::pi;
  return ManufacturedSolution(
      "u1", gaussian_bump_profile(), 100.0, [](double t) { return std::sin(pi * t); },
      [](double t) { return pi * std::cos(pi * t); });
}

ManufacturedSolution solution_u2() {
  constexpr double pi = std::numbers::pi;
  return ManufacturedSolution(
      "u2", gaussian_bump_profile(), 1.0, [](double t) { return std::sin(20.0 * pi * t); },
      [](double t) { return 20.0 * pi * std::cos(20.0 * pi * t); });
}

ManufacturedSolution solution_by_name(const std::string& name) {
  if (name == "u1") return solution_u1();
  if (name == "u2") return solution_u2();
  throw std::invalid_argument("unknown example '" + name + "' (expected u1 or u2)");
}

}  // namespace biharm
