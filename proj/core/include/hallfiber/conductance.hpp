#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <optional>
#include <utility>
#include <vector>

#include "hallfiber/dispersion.hpp"

namespace hallfiber {

/// Energy sign(k) sqrt(2 |k| |b|) of Landau level k.
double landau_energy(double b, int k);

/// Levels k = -k_max..k_max, ascending.
std::vector<double> landau_levels(double b, int k_max);

/// F = 1 on the plateaus around the selected levels.
struct LevelWindow {
  double b = 1.0;
  std::vector<int> selected;
  double delta = 0.0;
};

/// Largest admissible half-width: the gap above level |k| is
/// sqrt(2(|k|+1)|b|) - sqrt(2|k||b|); delta must stay below half of it.
double max_delta(double b, const std::vector<int>& selected);

/// min(0.3 sqrt|b|, 0.9 max_delta).
double default_delta(double b, const std::vector<int>& selected);

/// Throws WindowError unless the window is non-empty and delta is admissible.
void validate_window(const LevelWindow& w);

/// Sum of quintic-smoothstep bumps: 1 on [E - delta/2, E + delta/2], 0 outside
/// [E - delta, E + delta], C^2 everywhere.
class WindowFunction {
 public:
  explicit WindowFunction(LevelWindow w);

  [[nodiscard]] double value(double energy) const;
  [[nodiscard]] double derivative(double energy) const;
  /// True if energy lies in the closed support of some bump.
  [[nodiscard]] bool in_support(double energy) const;
  /// True if [lo, hi] meets the support.
  [[nodiscard]] bool meets_support(double lo, double hi) const;
  [[nodiscard]] const LevelWindow& window() const { return window_; }
  [[nodiscard]] const std::vector<double>& centers() const { return centers_; }

 private:
  LevelWindow window_;
  std::vector<double> centers_;
};

/// Validates and wraps the window.
WindowFunction build_window(const LevelWindow& w);

struct CurveContribution {
  /// Branch in the requested frame.
  Branch branch;
  double limit_minus = 0.0;
  double limit_plus = 0.0;
  double f_minus = 0.0;
  double f_plus = 0.0;
  /// F(lambda(-inf)) - F(lambda(+inf)).
  double contribution = 0.0;
  /// -integral of F'(lambda) lambda' over the momentum window, if computed.
  std::optional<double> integral;
};

struct ConductanceReport {
  double gamma = 0.0;
  double b = 1.0;
  LevelWindow window;
  SymmetryTransform transform;
  long integer_value = 0;
  std::optional<double> integral_value;
  std::vector<CurveContribution> per_curve;
  /// Quadrature settings when integral_value is set.
  double xi_half_width = 0.0;
  double xi_step = 0.0;
  int j_max = 0;
  /// Fiber problems solved for the integral, refinement included.
  std::size_t samples = 0;
};

/// Integer conductance from the xi -> -+inf limits of every branch.
ConductanceReport conductance_by_limits(double gamma, double b, const LevelWindow& w);

/// Memo of canonical branch values keyed by (problem, spacing, branch, xi).
/// Lets several windows or half-widths share fiber solves; values do not
/// depend on whether the cache is used.
class SampleCache {
 public:
  std::optional<BranchPoint> find(const FiberParams& canonical, double spacing,
                                  const Branch& br) const;
  void store(const FiberParams& canonical, double spacing, const Branch& br,
             const BranchPoint& p);
  [[nodiscard]] std::size_t size() const;

 private:
  using Key = std::tuple<double, double, double, double, int>;
  static Key key(const FiberParams& canonical, double spacing, const Branch& br);
  mutable std::mutex mutex_;
  std::map<Key, BranchPoint> points_;
};

struct IntegralOptions {
  /// Half-width Xi; 0 selects 10 sqrt|b|.
  double xi_half_width = 0.0;
  /// Coarse sample spacing; intervals where a curve meets the support of F'
  /// are subdivided until lambda moves by at most delta/64 per step.
  double xi_step = 0.05;
  /// Branches +-1..j_max; 0 chooses from the window.
  int j_max = 0;
  SweepOptions sweep;
  std::shared_ptr<SampleCache> cache;
};

/// Number of branches per sign needed for the window.
int auto_j_max(double b, const LevelWindow& w);

/// Limit classification plus the spectral-flow integral
/// -sum_j int F'(lambda_j) lambda_j' dxi over [-Xi, Xi].
/// Throws WindowError if some curve sits in the support of F' at +-Xi.
ConductanceReport conductance_by_integral(double gamma, double b, const LevelWindow& w,
                                          const IntegralOptions& opts = {});

}  // namespace hallfiber
