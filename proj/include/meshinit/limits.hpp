#pragma once

// Closed-form quantities for random geometric radio networks: Lambert W,
// transmission-range thresholds, degree and diameter bounds, SEND success
// probability, and the SFR/BROADCAST timing schedules.

#include <cstdint>

namespace meshinit::limits {

enum class Branch { principal, minus_one };

/// Real branches of the inverse of w -> w e^w.
///
/// The principal branch is defined on [-1/e, inf) with W >= -1, the minus-one
/// branch on [-1/e, 0) with W <= -1. Both meet at (-1/e, -1). Throws
/// std::domain_error outside those domains.
double lambert_w(Branch branch, double x);

inline constexpr double kInvE = 0.36787944117144232159552377016146;
inline constexpr double kPi = 3.14159265358979323846264338327950;
inline constexpr double kLn2 = 0.69314718055994530941723212145818;

struct RangeParams {
  double n = 0.0;      // node count; real-valued so formulas can be probed off-integer
  double area = 0.0;   // |X|, square meters
  double ell = 0.0;    // superconnectivity margin
  double omega = 0.0;  // connectivity slack
};

/// sqrt((ln n + omega) * area / (pi n)).
double r_connectivity(const RangeParams& params);

/// sqrt((1 + ell) ln n * area / (pi n)).
double r_superconnectivity(const RangeParams& params);

/// Inverse of r_superconnectivity: pi (n / area) r^2 / ln n - 1.
double implied_ell(double n, double area, double radius);

struct DegreeBounds {
  double low_coeff = 0.0;   // multiplier of ln n
  double high_coeff = 0.0;  // multiplier of ln n
};

/// Per-node degree window in the regime pi (n/|X|) r^2 = (1+ell) ln n:
/// -ell / W_{-1}(a) and -ell / W_0(a) with a = -ell / (e (1 + ell)).
DegreeBounds degree_bounds(double ell);

/// (4 - pi) / (pi - 2): above it the 3-coefficient diameter bound applies.
inline constexpr double kDiameterEllThreshold = (4.0 - kPi) / (kPi - 2.0);

/// 3 if ell > (4-pi)/(pi-2), else 5.
int diameter_coefficient(double ell);

/// Leading term c * sqrt(pi n / ((1 + ell) ln n)) of the hop-diameter bound.
double diameter_bound(double n, double ell);

enum class Lens { L1, L2 };

/// Intersection of two radius-r disks at center distance r (L1) or sqrt(2) r (L2).
double lens_area(Lens kind, double r);

/// Probability that a listener with d simultaneous SEND(T) neighbors hears at
/// least one of them: 1 - prod_{i=0}^{T} (1 - d a^-i (1 - a^-i)^(d-1)).
double send_success_probability(int T, int d, double base = 2.0);

/// exp(-sum_{m>=1} m! / (m^(m+2) ln 2)), summed until the term drops below 1e-15.
double mellin_constant();

/// Same series truncated after `terms` terms.
double mellin_partial(int terms);

/// Timing functions used by SFR, all derived from the surface |X| and the
/// target failure probability epsilon.
class SfrSchedule {
 public:
  SfrSchedule(double area, double epsilon, double r_max);

  double area() const { return area_; }
  double epsilon() const { return epsilon_; }
  double r_max() const { return r_max_; }

  /// R(x) = sqrt((ln 2^x + 2 ln 2) |X| / (pi 2^x)).
  double radius(int p) const;

  /// B(x) = 24 ceil(ln x (sqrt(2^x / x) + x - log2 eps)); x is clamped to >= 2
  /// so that the budget stays a positive slot count.
  std::int64_t broadcast_budget(int x) const;

  /// t = max(4 ceil(log2 p), ceil(ln(2/eps) / ln 5)), p clamped to >= 1.
  int inner_loop_length(int p) const;

  /// ceil(ln(eps/2) / ln(2 eps)).
  int c1() const { return c1_; }

  /// max(1, ceil(log2 r_max)).
  int initial_p() const { return initial_p_; }

 private:
  double area_;
  double epsilon_;
  double r_max_;
  int c1_;
  int initial_p_;
};

SfrSchedule sfr_schedule(double area, double epsilon, double r_max);

struct UpperBounds {
  std::int64_t n_max = 0;
  std::int64_t delta_max = 0;
  std::int64_t diam_max = 0;
};

/// Integer bounds advertised once p0 is known: 2^(p0+1), 3 p0, 12 ceil(sqrt(2^p0 / p0)).
UpperBounds upper_bounds_from_p0(int p0);

/// Termination bound of BROADCAST: 2 ceil(log2 delta) (T + ceil(log2(N/eps)))
/// with T = 2D + 5 max(sqrt D, sqrt log2(N/eps)) sqrt log2(N/eps).
std::int64_t broadcast_time(std::int64_t D, std::int64_t N, std::int64_t delta, double epsilon);

/// 2 ceil(log2 delta) T: the deadline by which every node is informed.
std::int64_t broadcast_delivery_time(std::int64_t D, std::int64_t N, std::int64_t delta,
                                     double epsilon);

/// ceil(log2 v) for v >= 1, exact on integers.
int ceil_log2(std::int64_t v);

/// Expected single-hop initialization cost per station for k = 3: 3 / ln 3.
inline constexpr double kInitSlotsPerStation = 2.7307176798805122;

}  // namespace meshinit::limits
