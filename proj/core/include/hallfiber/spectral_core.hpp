#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hallfiber {

/// Uniform grid on [0, L]: nodes x_j = j*h, j = 0..N.
///
/// Node 0 carries the physical boundary condition, node N the artificial
/// truncation of the half-line.
struct Grid {
  double length = 0.0;
  std::size_t intervals = 0;
  double spacing = 0.0;

  [[nodiscard]] double node(std::size_t j) const { return static_cast<double>(j) * spacing; }
  /// Midpoint between node j and node j+1.
  [[nodiscard]] double half_node(std::size_t j) const {
    return (static_cast<double>(j) + 0.5) * spacing;
  }
};

/// Throws InvalidGridError unless length > 0 and intervals >= 8.
Grid make_grid(double length, std::size_t intervals);

/// Grid with a prescribed spacing; length is rounded up to a whole number of
/// intervals so that h is exactly `spacing`.
Grid make_grid_with_spacing(double min_length, double spacing);

struct DomainSize {
  double length = 0.0;
  std::size_t intervals = 0;
};

/// Spacing used when the caller does not ask for a specific one. Chosen so
/// the discrete zero mode of the Robin forms stays above -1e-6.
double default_spacing(double b);

/// Truncation length and resolution for field b, momenta down to xi_min and
/// branches up to n_max.
DomainSize auto_domain(double b, double xi_min, int n_max);
DomainSize auto_domain(double b, double xi_min, int n_max, double spacing);

/// Grid built from auto_domain.
Grid auto_grid(double b, double xi_min, int n_max);

/// Real symmetric tridiagonal matrix.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  [[nodiscard]] std::size_t size() const { return diag.size(); }
  /// max row sum of absolute values.
  [[nodiscard]] double norm_inf() const;
  /// y = T x
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Number of eigenvalues of T strictly below x (inertia of T - x).
std::size_t sturm_count(const SymTridiag& t, double x);

/// Gershgorin enclosure of the spectrum.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval gershgorin(const SymTridiag& t);

constexpr double kDefaultEigenTolerance = 1e-10;

/// Absolute bracket width used for an eigenvalue near `value`.
inline double eigen_tolerance(double value, double rel = kDefaultEigenTolerance) {
  const double mag = value < 0 ? -value : value;
  return rel * (mag > 1.0 ? mag : 1.0);
}

/// k-th smallest eigenvalue (1-based) by Sturm bisection.
double kth_eigenvalue(const SymTridiag& t, std::size_t k,
                      double rel_tol = kDefaultEigenTolerance);

/// The k algebraically smallest eigenvalues, ascending.
std::vector<double> lowest_eigenvalues(const SymTridiag& t, std::size_t k,
                                       double rel_tol = kDefaultEigenTolerance);

/// Unit eigenvector for an eigenvalue estimate by inverse iteration.
/// Sign fixed so the first nonzero component is positive.
std::vector<double> eigenvector(const SymTridiag& t, double nu, int max_iter = 50);

struct TridiagEigenpair {
  double value = 0.0;
  std::vector<double> vector;
};

/// k-th eigenpair with an optional warm start. The warm start seeds a
/// Rayleigh-quotient iteration; the result is always certified by two Sturm
/// counts bracketing the value to width eigen_tolerance(value), falling back
/// to plain bisection when certification fails.
TridiagEigenpair kth_eigenpair(const SymTridiag& t, std::size_t k,
                               const TridiagEigenpair* warm = nullptr,
                               double rel_tol = kDefaultEigenTolerance);

/// Eigenvalues with 1-based indices first..last (inclusive), ascending.
std::vector<double> eigenvalue_range(const SymTridiag& t, std::size_t first, std::size_t last,
                                     double rel_tol = kDefaultEigenTolerance);

}  // namespace hallfiber
