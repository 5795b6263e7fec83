#include "hallfiber/fiber_schrodinger.hpp"

#include <cmath>
#include <string>

#include "hallfiber/errors.hpp"

namespace hallfiber {

namespace {

void check_robin(const RobinFiberParams& p) {
  if (!(p.b > 0.0) || !std::isfinite(p.b)) {
    throw DomainError("Robin fiber requires b > 0, got " + std::to_string(p.b));
  }
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) {
    throw DomainError("Robin fiber requires finite alpha >= 0, got " + std::to_string(p.alpha));
  }
  if (!std::isfinite(p.xi)) throw DomainError("Robin fiber requires finite xi");
}

void check_index(int n, const Grid& g) {
  if (n < 1) throw DomainError("eigenvalue index must be >= 1, got " + std::to_string(n));
  if (static_cast<std::size_t>(n) > g.intervals / 4) {
    throw RefineGridError("eigenvalue index " + std::to_string(n) + " exceeds N/4 for N = " +
                          std::to_string(g.intervals));
  }
}

}  // namespace

RobinSystem assemble_robin(const RobinFiberParams& p, const Grid& g) {
  check_robin(p);
  const std::size_t m = g.intervals;  // nodes 0..N-1
  const double h = g.spacing;
  const double shift = p.sign == FormSign::plus ? -p.b : p.b;
  const double boundary = p.sign == FormSign::plus ? p.alpha - p.xi : p.alpha + p.xi;

  RobinSystem sys;
  sys.grid = g;
  sys.params = p;
  sys.stiffness_diag.resize(m);
  sys.stiffness_off.assign(m - 1, -1.0 / h);
  sys.weights.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double mom = p.xi + p.b * g.node(j);
    const double potential = mom * mom + shift;
    const double w = j == 0 ? 0.5 * h : h;
    sys.weights[j] = w;
    sys.stiffness_diag[j] = (j == 0 ? 1.0 / h : 2.0 / h) + potential * w + (j == 0 ? boundary : 0.0);
  }

  sys.reduced.diag.resize(m);
  sys.reduced.off.resize(m - 1);
  for (std::size_t j = 0; j < m; ++j) {
    sys.reduced.diag[j] = sys.stiffness_diag[j] / sys.weights[j];
    if (j + 1 < m) {
      sys.reduced.off[j] = sys.stiffness_off[j] / std::sqrt(sys.weights[j] * sys.weights[j + 1]);
    }
  }
  return sys;
}

EigenPair nu(const RobinFiberParams& p, int n, const Grid& g, const EigenPair* warm) {
  check_index(n, g);
  const RobinSystem sys = assemble_robin(p, g);
  const TridiagEigenpair* seed = nullptr;
  if (warm != nullptr && warm->n == n && warm->grid.intervals == g.intervals &&
      warm->grid.spacing == g.spacing) {
    seed = &warm->reduced;
  }
  TridiagEigenpair pair = kth_eigenpair(sys.reduced, static_cast<std::size_t>(n), seed);
  if (pair.value < kNegativeFormFloor) {
    throw RefineGridError("Robin eigenvalue " + std::to_string(pair.value) +
                          " below the non-negativity floor; refine the grid");
  }

  EigenPair e;
  e.nu = pair.value;
  e.n = n;
  e.params = p;
  e.grid = g;
  e.samples.assign(g.intervals + 1, 0.0);
  for (std::size_t j = 0; j < g.intervals; ++j) {
    e.samples[j] = pair.vector[j] / std::sqrt(sys.weights[j]);
  }
  e.u0 = e.samples[0];
  e.reduced = std::move(pair);
  return e;
}

SymTridiag assemble_dirichlet(const DirichletFiberParams& p, const Grid& g) {
  if (p.b == 0.0 || !std::isfinite(p.b) || !std::isfinite(p.xi)) {
    throw DomainError("Dirichlet fiber requires finite b != 0 and finite xi");
  }
  const std::size_t m = g.intervals - 1;  // nodes 1..N-1
  const double h = g.spacing;
  const double h2 = h * h;
  SymTridiag t;
  t.diag.resize(m);
  t.off.assign(m - 1, -1.0 / h2);
  for (std::size_t i = 0; i < m; ++i) {
    const double mom = p.xi + p.b * g.node(i + 1);
    t.diag[i] = 2.0 / h2 + mom * mom + p.b;
  }
  return t;
}

EigenPair nu_dirichlet(double b, double xi, int n, const Grid& g) {
  check_index(n, g);
  const DirichletFiberParams p{b, xi};
  const SymTridiag t = assemble_dirichlet(p, g);
  TridiagEigenpair pair = kth_eigenpair(t, static_cast<std::size_t>(n));

  EigenPair e;
  e.nu = pair.value;
  e.n = n;
  e.params = p;
  e.grid = g;
  e.samples.assign(g.intervals + 1, 0.0);
  const double scale = 1.0 / std::sqrt(g.spacing);
  for (std::size_t i = 0; i + 1 < g.intervals; ++i) e.samples[i + 1] = pair.vector[i] * scale;
  e.u0 = 0.0;
  e.reduced = std::move(pair);
  return e;
}

double nu_partial_alpha(const EigenPair& e) {
  if (!e.is_robin()) throw DomainError("d nu / d alpha is defined for Robin eigenpairs only");
  return e.u0 * e.u0;
}

double nu_partial_xi(const EigenPair& e) {
  if (!e.is_robin()) throw DomainError("boundary formula for d nu / d xi needs a Robin eigenpair");
  const auto& p = std::get<RobinFiberParams>(e.params);
  const double cross = p.sign == FormSign::plus ? -2.0 * p.alpha * p.xi : 2.0 * p.alpha * p.xi;
  return (e.nu + p.alpha * p.alpha + cross) * e.u0 * e.u0 / p.b;
}

double nu_dirichlet_partial_xi(const EigenPair& e) {
  if (e.is_robin()) throw DomainError("expected a Dirichlet eigenpair");
  const auto& p = std::get<DirichletFiberParams>(e.params);
  const Grid& g = e.grid;
  double s = 0.0;
  for (std::size_t j = 1; j < g.intervals; ++j) {
    const double u = e.samples[j];
    s += 2.0 * (p.xi + p.b * g.node(j)) * u * u;
  }
  return s * g.spacing;
}

}  // namespace hallfiber
