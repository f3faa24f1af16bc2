#include "meshinit/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace meshinit::limits {

namespace {

constexpr double kE = 2.71828182845904523536028747135266;

// Series of W about the branch point in p = +-sqrt(2 (e x + 1)).
double branch_point_guess(double x, double sign) {
  const double p = sign * std::sqrt(std::max(0.0, 2.0 * (kE * x + 1.0)));
  return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
}

double halley(double x, double w) {
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace

double lambert_w(Branch branch, double x) {
  // Accept a few ulps below -1/e so that callers passing -1/e computed in a
  // different order still land on the branch point.
  const double floor = -kInvE * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
  if (!(x >= floor)) throw std::domain_error("lambert_w: x < -1/e");
  if (branch == Branch::minus_one && x >= 0.0)
    throw std::domain_error("lambert_w: minus-one branch requires x < 0");
  if (x <= -kInvE) return -1.0;
  if (x == 0.0) return 0.0;

  const double near_branch = kE * x + 1.0;
  double w;
  if (branch == Branch::principal) {
    if (near_branch < 0.3) {
      w = branch_point_guess(x, 1.0);
    } else if (std::abs(x) < kInvE) {
      w = x;
    } else {
      const double lx = std::log(x);
      w = x < 3.0 ? std::log1p(x) : lx - std::log(lx);
    }
    w = halley(x, w);
    return std::max(w, -1.0);
  }
  if (near_branch < 0.3) {
    w = branch_point_guess(x, -1.0);
  } else {
    const double lx = std::log(-x);
    w = lx - std::log(-lx);
  }
  w = halley(x, w);
  return std::min(w, -1.0);
}

double r_connectivity(const RangeParams& params) {
  if (params.n < 2.0) throw std::domain_error("r_connectivity: n < 2");
  if (!(params.area > 0.0)) throw std::domain_error("r_connectivity: area <= 0");
  const double mass = std::log(params.n) + params.omega;
  if (!(mass > 0.0)) throw std::domain_error("r_connectivity: ln n + omega <= 0");
  return std::sqrt(mass * params.area / (kPi * params.n));
}

double r_superconnectivity(const RangeParams& params) {
  if (params.n < 2.0) throw std::domain_error("r_superconnectivity: n < 2");
  if (!(params.area > 0.0)) throw std::domain_error("r_superconnectivity: area <= 0");
  if (!(params.ell > 0.0)) throw std::domain_error("r_superconnectivity: ell <= 0");
  return std::sqrt((1.0 + params.ell) * std::log(params.n) * params.area / (kPi * params.n));
}

double implied_ell(double n, double area, double radius) {
  if (n < 2.0 || !(area > 0.0)) throw std::domain_error("implied_ell: need n >= 2, area > 0");
  return kPi * (n / area) * radius * radius / std::log(n) - 1.0;
}

DegreeBounds degree_bounds(double ell) {
  if (!(ell > 0.0)) throw std::domain_error("degree_bounds: ell <= 0");
  const double arg = -ell / (kE * (1.0 + ell));
  if (!(arg >= -kInvE && arg < 0.0)) throw std::domain_error("degree_bounds: W argument out of range");
  return DegreeBounds{-ell / lambert_w(Branch::minus_one, arg),
                      -ell / lambert_w(Branch::principal, arg)};
}

int diameter_coefficient(double ell) { return ell > kDiameterEllThreshold ? 3 : 5; }

double diameter_bound(double n, double ell) {
  if (n < 2.0) throw std::domain_error("diameter_bound: n < 2");
  if (!(ell > 0.0)) throw std::domain_error("diameter_bound: ell <= 0");
  return diameter_coefficient(ell) * std::sqrt(kPi * n / ((1.0 + ell) * std::log(n)));
}

double lens_area(Lens kind, double r) {
  if (!(r > 0.0)) throw std::domain_error("lens_area: r <= 0");
  switch (kind) {
    case Lens::L1:
      return (4.0 * kPi - 3.0 * std::sqrt(3.0)) / 6.0 * r * r;
    case Lens::L2:
      return (kPi - 2.0) / 2.0 * r * r;
  }
  throw std::invalid_argument("lens_area: unknown lens");
}

double send_success_probability(int T, int d, double base) {
  if (T < 0) throw std::domain_error("send_success_probability: T < 0");
  if (d < 1) throw std::domain_error("send_success_probability: d < 1");
  if (!(base > 1.0)) throw std::domain_error("send_success_probability: base <= 1");
  double failure = 1.0;
  for (int i = 0; i <= T; ++i) {
    const double q = std::pow(base, -static_cast<double>(i));
    // 0^0 = 1 so that a lone neighbour at i = 0 always gets through.
    const double others_silent = d == 1 ? 1.0 : std::pow(1.0 - q, d - 1);
    failure *= 1.0 - d * q * others_silent;
  }
  return std::clamp(1.0 - failure, 0.0, 1.0);
}

namespace {

double mellin_term(int m) {
  const double md = m;
  return std::exp(std::lgamma(md + 1.0) - (md + 2.0) * std::log(md)) / kLn2;
}

}  // namespace

double mellin_constant() {
  double sum = 0.0;
  for (int m = 1;; ++m) {
    const double term = mellin_term(m);
    sum += term;
    if (term < 1e-15) break;
  }
  return std::exp(-sum);
}

double mellin_partial(int terms) {
  double sum = 0.0;
  for (int m = 1; m <= terms; ++m) sum += mellin_term(m);
  return std::exp(-sum);
}

SfrSchedule::SfrSchedule(double area, double epsilon, double r_max)
    : area_(area), epsilon_(epsilon), r_max_(r_max) {
  if (!(area > 0.0)) throw std::domain_error("sfr_schedule: area <= 0");
  if (!(r_max > 0.0)) throw std::domain_error("sfr_schedule: r_max <= 0");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::domain_error("sfr_schedule: epsilon must lie in (0, 1/2)");
  c1_ = static_cast<int>(std::ceil(std::log(epsilon / 2.0) / std::log(2.0 * epsilon)));
  initial_p_ = std::max(1, static_cast<int>(std::ceil(std::log2(r_max))));
}

double SfrSchedule::radius(int p) const {
  const double size = std::ldexp(1.0, p);
  return std::sqrt((p * kLn2 + 2.0 * kLn2) * area_ / (kPi * size));
}

std::int64_t SfrSchedule::broadcast_budget(int x) const {
  const int xc = std::max(x, 2);
  const double inner = std::sqrt(std::ldexp(1.0, xc) / xc) + xc - std::log2(epsilon_);
  return 24 * static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(xc)) * inner));
}

int SfrSchedule::inner_loop_length(int p) const {
  const int pc = std::max(p, 1);
  const int by_degree = 4 * ceil_log2(pc);
  const int by_epsilon = static_cast<int>(std::ceil(std::log(2.0 / epsilon_) / std::log(5.0)));
  return std::max({by_degree, by_epsilon, 1});
}

SfrSchedule sfr_schedule(double area, double epsilon, double r_max) {
  return SfrSchedule(area, epsilon, r_max);
}

int ceil_log2(std::int64_t v) {
  if (v < 1) throw std::domain_error("ceil_log2: v < 1");
  int bits = 0;
  while ((std::int64_t{1} << bits) < v) ++bits;
  return bits;
}

UpperBounds upper_bounds_from_p0(int p0) {
  if (p0 < 2) throw std::domain_error("upper_bounds_from_p0: p0 < 2");
  if (p0 > 60) throw std::domain_error("upper_bounds_from_p0: p0 too large");
  UpperBounds bounds;
  bounds.n_max = std::int64_t{1} << (p0 + 1);
  bounds.delta_max = 3 * static_cast<std::int64_t>(p0);
  bounds.diam_max = 12 * static_cast<std::int64_t>(std::ceil(std::sqrt(std::ldexp(1.0, p0) / p0)));
  return bounds;
}

namespace {

struct BroadcastTerms {
  double T;
  double log_n_over_eps;
  int k_half;
};

BroadcastTerms broadcast_terms(std::int64_t D, std::int64_t N, std::int64_t delta, double epsilon) {
  if (D < 1) throw std::domain_error("broadcast_time: D < 1");
  if (N < 2) throw std::domain_error("broadcast_time: N < 2");
  if (delta < 2) throw std::domain_error("broadcast_time: delta < 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("broadcast_time: epsilon outside (0,1)");
  const double L = std::log2(static_cast<double>(N)) - std::log2(epsilon);
  const double Dd = static_cast<double>(D);
  // max(sqrt D, sqrt L) * sqrt L == max(sqrt(D L), L), which stays exact when D L is a square.
  const double T = 2.0 * Dd + 5.0 * std::max(std::sqrt(Dd * L), L);
  return BroadcastTerms{T, L, ceil_log2(delta)};
}

}  // namespace

std::int64_t broadcast_time(std::int64_t D, std::int64_t N, std::int64_t delta, double epsilon) {
  const auto terms = broadcast_terms(D, N, delta, epsilon);
  return static_cast<std::int64_t>(
      std::ceil(2.0 * terms.k_half * (terms.T + std::ceil(terms.log_n_over_eps))));
}

std::int64_t broadcast_delivery_time(std::int64_t D, std::int64_t N, std::int64_t delta,
                                     double epsilon) {
  const auto terms = broadcast_terms(D, N, delta, epsilon);
  return static_cast<std::int64_t>(std::ceil(2.0 * terms.k_half * terms.T));
}

}  // namespace meshinit::limits
