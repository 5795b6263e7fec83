#pragma once

#include <vector>

#include "hallfiber/dispersion.hpp"
#include "hallfiber/spectral_core.hpp"

namespace hallfiber {

/// Staggered discretization of the fiber Dirac operator
/// D = [[0, d], [d^dagger, 0]], d = xi - dx + b x, d^dagger = xi + dx + b x,
/// with psi2(0) = gamma psi1(0).
///
/// One component lives on the integer nodes 0..N, the other on the half
/// nodes (k + 1/2) h, k = 0..N-1. For b > 0 psi1 is on the integer nodes and
/// the form is 2 <P psi1, psi2> + gamma psi1(0)^2 with P the discrete
/// d^dagger; for b < 0 the roles swap (P the discrete d, boundary term
/// -psi2(0)^2 / gamma), which makes charge conjugation exact on the lattice.
/// The integer node N is free, so the half-node component vanishes at L.
///
/// Unknowns are interleaved (a_0, h_{1/2}, a_1, ..., h_{N-1/2}, a_N) and
/// scaled by the square root of their masses, giving a symmetric tridiagonal
/// matrix. An integer node 0 forced to zero (gamma = +-inf for b > 0, gamma = 0
/// for b < 0) is dropped.
struct DiracSystem {
  FiberParams params;
  Grid grid;
  /// psi1 lives on the integer nodes (b > 0).
  bool psi1_on_nodes = true;
  /// Integer node 0 is eliminated.
  bool node0_eliminated = false;
  SymTridiag matrix;
  /// Masses of the interleaved unknowns (w_0 = h/2 = w_N, h otherwise).
  std::vector<double> masses;
};

/// Assembles the system for b != 0 and any gamma in R u {+-inf}.
DiracSystem assemble_dirac(const FiberParams& fp, const Grid& g);

/// The k eigenvalues closest to 0, ascending.
std::vector<double> dirac_spectrum_window(const FiberParams& fp, const Grid& g, int k);

struct DiracBranches {
  /// theta+_1..n ascending (non-negative).
  std::vector<double> plus;
  /// theta-_1..n ascending (magnitudes of the negative eigenvalues).
  std::vector<double> minus;
};

/// Eigenvalues split into branches at -1e-9, so an exact zero mode counts
/// as theta+_1. Intended for canonical parameters.
DiracBranches dirac_branches(const FiberParams& fp, const Grid& g, int n);

/// Spinor on the staggered grid (b > 0 layout): psi1 on nodes 0..N, psi2 on
/// half nodes 0..N-1. Normalized so sum w psi1^2 + sum h psi2^2 = 1.
struct Spinor {
  std::vector<double> psi1;
  std::vector<double> psi2;
  double lambda = 0.0;
  FiberParams params;
  Grid grid;

  /// psi2(0) extrapolated from the first half node along
  /// psi2' = (xi + b x) psi2 - lambda psi1.
  [[nodiscard]] double psi2_at_boundary() const;
};

/// Eigen-spinor of the assembled matrix for the eigenvalue nearest `target`.
/// Requires b > 0.
Spinor dirac_spinor(const FiberParams& fp, const Grid& g, double target);

/// Spinor (u, lambda^-1 d^dagger u) built from a + branch Robin eigenpair at
/// alpha = gamma lambda, renormalized. Throws DomainError for lambda <= 0.
Spinor reconstruct_spinor(const EigenPair& e, double lambda, const FiberParams& fp, const Grid& g);

/// sigma_3 Psi: the spinor for -lambda of the problem with -gamma.
Spinor apply_sigma3(const Spinor& s);

/// 2 <psi1, psi2> with psi1 averaged onto the half nodes; equals the xi
/// derivative of the discrete eigenvalue for exact eigen-spinors.
double feynman_hellmann_velocity(const Spinor& s);

/// Discrete norm of (D - lambda) Psi in the mass inner product.
double dirac_residual(const Spinor& s);

/// |psi2(0) - gamma psi1(0)|, or |psi1(0)| for infinite gamma.
double boundary_residual(const Spinor& s);

/// sum w psi1^2 + sum h psi2^2.
double spinor_norm_squared(const Spinor& s);

}  // namespace hallfiber
