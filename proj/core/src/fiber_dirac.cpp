#include "hallfiber/fiber_dirac.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hallfiber/errors.hpp"

namespace hallfiber {

namespace {

void check_params(const FiberParams& fp) {
  if (fp.b == 0.0 || !std::isfinite(fp.b) || !std::isfinite(fp.xi) || std::isnan(fp.gamma)) {
    throw DomainError("Dirac fiber needs finite b != 0, finite xi and a non-NaN gamma");
  }
}

double mass_of_node(const Grid& g, std::size_t j) {
  return j == 0 || j == g.intervals ? 0.5 * g.spacing : g.spacing;
}

// Physical spinor -> scaled interleaved vector of the assembled system.
std::vector<double> to_scaled(const DiracSystem& sys, const Spinor& s) {
  const std::size_t n = sys.grid.intervals;
  std::vector<double> v(2 * n + 1);
  for (std::size_t j = 0; j <= n; ++j) v[2 * j] = s.psi1[j] * std::sqrt(sys.masses[2 * j]);
  for (std::size_t k = 0; k < n; ++k) v[2 * k + 1] = s.psi2[k] * std::sqrt(sys.masses[2 * k + 1]);
  if (sys.node0_eliminated) v.erase(v.begin());
  return v;
}

void check_positive_field(const FiberParams& fp) {
  if (!(fp.b > 0.0)) throw DomainError("spinors are defined for the b > 0 layout only");
}

void normalize(Spinor& s) {
  const double nrm = std::sqrt(spinor_norm_squared(s));
  if (!(nrm > 0.0)) throw DomainError("cannot normalize a zero spinor");
  for (auto& v : s.psi1) v /= nrm;
  for (auto& v : s.psi2) v /= nrm;
}

}  // namespace

DiracSystem assemble_dirac(const FiberParams& fp, const Grid& g) {
  check_params(fp);
  const std::size_t n = g.intervals;
  const double h = g.spacing;
  const double sh = std::sqrt(h);

  DiracSystem sys;
  sys.params = fp;
  sys.grid = g;
  sys.psi1_on_nodes = fp.b > 0.0;

  double kappa = 0.0;
  if (sys.psi1_on_nodes) {
    sys.node0_eliminated = std::isinf(fp.gamma);
    kappa = sys.node0_eliminated ? 0.0 : fp.gamma;
  } else {
    sys.node0_eliminated = fp.gamma == 0.0;
    kappa = sys.node0_eliminated || std::isinf(fp.gamma) ? 0.0 : -1.0 / fp.gamma;
  }
  // d^dagger = xi + dx + b x for b > 0, d = xi - dx + b x for b < 0.
  const double diff = sys.psi1_on_nodes ? 1.0 / h : -1.0 / h;

  const std::size_t dim = 2 * n + 1;
  std::vector<double> diag(dim, 0.0);
  std::vector<double> off(dim - 1, 0.0);
  sys.masses.assign(dim, h);
  for (std::size_t j = 0; j <= n; ++j) sys.masses[2 * j] = mass_of_node(g, j);
  diag[0] = kappa / sys.masses[0];
  for (std::size_t k = 0; k < n; ++k) {
    const double m = fp.xi + fp.b * g.half_node(k);
    const double left = -diff + 0.5 * m;   // P[k, k]
    const double right = diff + 0.5 * m;   // P[k, k + 1]
    off[2 * k] = sh * left / std::sqrt(sys.masses[2 * k]);
    off[2 * k + 1] = sh * right / std::sqrt(sys.masses[2 * k + 2]);
  }

  if (sys.node0_eliminated) {
    sys.matrix.diag.assign(diag.begin() + 1, diag.end());
    sys.matrix.off.assign(off.begin() + 1, off.end());
  } else {
    sys.matrix.diag = std::move(diag);
    sys.matrix.off = std::move(off);
  }
  return sys;
}

std::vector<double> dirac_spectrum_window(const FiberParams& fp, const Grid& g, int k) {
  if (k < 1) throw DomainError("spectrum window needs k >= 1");
  const DiracSystem sys = assemble_dirac(fp, g);
  const SymTridiag& t = sys.matrix;
  const auto dim = static_cast<long>(t.size());
  const auto below = static_cast<long>(sturm_count(t, 0.0));
  const long first = std::max(1L, below - k + 1);
  const long last = std::min(dim, below + k);
  std::vector<double> values = eigenvalue_range(t, static_cast<std::size_t>(first),
                                                static_cast<std::size_t>(last));
  std::stable_sort(values.begin(), values.end(),
                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  values.resize(std::min<std::size_t>(values.size(), static_cast<std::size_t>(k)));
  std::sort(values.begin(), values.end());
  return values;
}

DiracBranches dirac_branches(const FiberParams& fp, const Grid& g, int n) {
  if (n < 1) throw DomainError("dirac_branches needs n >= 1");
  const DiracSystem sys = assemble_dirac(fp, g);
  const SymTridiag& t = sys.matrix;
  const std::size_t split = sturm_count(t, -1e-9);
  const auto count = static_cast<std::size_t>(n);
  if (split < count || split + count > t.size()) {
    throw RefineGridError("grid too small for " + std::to_string(n) + " Dirac branches");
  }
  DiracBranches out;
  for (std::size_t i = 1; i <= count; ++i) {
    out.plus.push_back(kth_eigenvalue(t, split + i));
    out.minus.push_back(-kth_eigenvalue(t, split + 1 - i));
  }
  return out;
}

double Spinor::psi2_at_boundary() const {
  const double h = grid.spacing;
  const double m = params.xi + params.b * grid.half_node(0);
  return psi2[0] - 0.5 * h * (m * psi2[0] - lambda * psi1[0]);
}

Spinor dirac_spinor(const FiberParams& fp, const Grid& g, double target) {
  check_positive_field(fp);
  const DiracSystem sys = assemble_dirac(fp, g);
  const SymTridiag& t = sys.matrix;
  const std::size_t below = sturm_count(t, target);
  std::size_t k = below == 0 ? 1 : below;
  if (below < t.size()) {
    const double lo = below == 0 ? 0.0 : kth_eigenvalue(t, below);
    const double hi = kth_eigenvalue(t, below + 1);
    k = below == 0 || std::abs(hi - target) < std::abs(lo - target) ? below + 1 : below;
  }
  const TridiagEigenpair pair = kth_eigenpair(t, k);

  const std::size_t n = g.intervals;
  std::vector<double> v = pair.vector;
  if (sys.node0_eliminated) v.insert(v.begin(), 0.0);
  Spinor s;
  s.lambda = pair.value;
  s.params = fp;
  s.grid = g;
  s.psi1.resize(n + 1);
  s.psi2.resize(n);
  for (std::size_t j = 0; j <= n; ++j) s.psi1[j] = v[2 * j] / std::sqrt(sys.masses[2 * j]);
  for (std::size_t i = 0; i < n; ++i) s.psi2[i] = v[2 * i + 1] / std::sqrt(sys.masses[2 * i + 1]);
  return s;
}

Spinor reconstruct_spinor(const EigenPair& e, double lambda, const FiberParams& fp, const Grid& g) {
  check_positive_field(fp);
  if (!(lambda > 0.0)) throw DomainError("spinor reconstruction needs lambda > 0");
  if (!e.is_robin() || e.samples.size() != g.intervals + 1) {
    throw DomainError("spinor reconstruction needs a Robin eigenpair on the same grid");
  }
  const std::size_t n = g.intervals;
  const double h = g.spacing;
  Spinor s;
  s.lambda = lambda;
  s.params = fp;
  s.grid = g;
  s.psi1 = e.samples;
  s.psi2.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = fp.xi + fp.b * g.half_node(k);
    const double du = (e.samples[k + 1] - e.samples[k]) / h;
    s.psi2[k] = (du + 0.5 * m * (e.samples[k] + e.samples[k + 1])) / lambda;
  }
  normalize(s);
  return s;
}

Spinor apply_sigma3(const Spinor& s) {
  Spinor out = s;
  for (auto& v : out.psi2) v = -v;
  out.lambda = -s.lambda;
  out.params.gamma = -s.params.gamma;
  return out;
}

double feynman_hellmann_velocity(const Spinor& s) {
  const double h = s.grid.spacing;
  double sum = 0.0;
  for (std::size_t k = 0; k < s.psi2.size(); ++k) {
    sum += h * s.psi2[k] * 0.5 * (s.psi1[k] + s.psi1[k + 1]);
  }
  return 2.0 * sum;
}

double dirac_residual(const Spinor& s) {
  const DiracSystem sys = assemble_dirac(s.params, s.grid);
  if (!sys.psi1_on_nodes) throw DomainError("spinor residual needs the b > 0 layout");
  const std::vector<double> v = to_scaled(sys, s);
  std::vector<double> r(v.size());
  sys.matrix.multiply(v, r);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = r[i] - s.lambda * v[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double boundary_residual(const Spinor& s) {
  if (std::isinf(s.params.gamma)) return std::abs(s.psi1[0]);
  return std::abs(s.psi2_at_boundary() - s.params.gamma * s.psi1[0]);
}

double spinor_norm_squared(const Spinor& s) {
  const std::size_t n = s.grid.intervals;
  double sum = 0.0;
  for (std::size_t j = 0; j <= n; ++j) sum += mass_of_node(s.grid, j) * s.psi1[j] * s.psi1[j];
  for (double v : s.psi2) sum += s.grid.spacing * v * v;
  return sum;
}

}  // namespace hallfiber
