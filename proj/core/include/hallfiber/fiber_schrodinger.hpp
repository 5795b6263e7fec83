#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "hallfiber/spectral_core.hpp"

namespace hallfiber {

/// Selects q+ (d d^dagger, potential shift -b) or q- (d^dagger d, shift +b).
enum class FormSign { plus, minus };

/// Parameters of the Robin fiber operator h^{+-}_{alpha,xi} for b > 0.
struct RobinFiberParams {
  FormSign sign = FormSign::plus;
  double b = 1.0;
  double alpha = 0.0;
  double xi = 0.0;
};

/// Dirichlet Pauli fiber -d^2 + (xi + b x)^2 + b with u(0) = 0. b may be
/// negative.
struct DirichletFiberParams {
  double b = 1.0;
  double xi = 0.0;
};

/// Discretized Robin form on nodes 0..N-1 (u_N = 0 eliminated).
///
/// The quadratic form is
///   sum_j (u_{j+1} - u_j)^2 / h + sum_j V(x_j) u_j^2 w_j + c u_0^2
/// with V = (xi + b x)^2 -+ b, c = alpha -+ xi, trapezoid masses w.
struct RobinSystem {
  Grid grid;
  RobinFiberParams params;
  std::vector<double> stiffness_diag;
  std::vector<double> stiffness_off;
  std::vector<double> weights;
  /// W^{-1/2} A W^{-1/2}
  SymTridiag reduced;
};

/// Eigenvalue and W-normalized eigenvector of a Robin or Dirichlet fiber.
struct EigenPair {
  double nu = 0.0;
  int n = 1;
  /// u(0); zero for Dirichlet problems.
  double u0 = 0.0;
  /// Values at all nodes 0..N including the eliminated ones.
  std::vector<double> samples;
  std::variant<RobinFiberParams, DirichletFiberParams> params;
  Grid grid;
  /// Eigenvector of the reduced matrix, kept to warm-start nearby solves.
  TridiagEigenpair reduced;

  [[nodiscard]] bool is_robin() const {
    return std::holds_alternative<RobinFiberParams>(params);
  }
};

/// Below this the discrete spectrum of a non-negative form is considered
/// spurious and the grid too coarse.
constexpr double kNegativeFormFloor = -1e-6;

RobinSystem assemble_robin(const RobinFiberParams& p, const Grid& g);

/// n-th eigenpair (1-based) of the Robin fiber. `warm`, when given, must be a
/// pair of the same index on the same grid; it only speeds up the solve.
EigenPair nu(const RobinFiberParams& p, int n, const Grid& g, const EigenPair* warm = nullptr);

SymTridiag assemble_dirichlet(const DirichletFiberParams& p, const Grid& g);

/// n-th eigenpair of the Dirichlet Pauli fiber.
EigenPair nu_dirichlet(double b, double xi, int n, const Grid& g);

/// d nu / d alpha = u(0)^2.
double nu_partial_alpha(const EigenPair& e);

/// d nu / d xi = (nu + alpha^2 -+ 2 alpha xi) u(0)^2 / b.
double nu_partial_xi(const EigenPair& e);

/// d nu^Dir / d xi by the Hellmann-Feynman expectation <u, 2(xi + b x) u>.
double nu_dirichlet_partial_xi(const EigenPair& e);

}  // namespace hallfiber
