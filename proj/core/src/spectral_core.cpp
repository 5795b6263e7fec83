#include "hallfiber/spectral_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hallfiber/errors.hpp"

namespace hallfiber {

namespace {

// Pivot floor for the LDL^T recurrences; far below any pivot produced by the
// matrices assembled in this library (entries are at most ~1e8).
constexpr double kPivmin = 1e-280;

constexpr std::size_t kShifts = 4;

// Sturm counts at several shifts in one sweep; the independent recurrences
// hide the division latency.
std::array<std::size_t, kShifts> sturm_counts(const SymTridiag& t,
                                              const std::array<double, kShifts>& x) {
  const std::size_t n = t.size();
  std::array<double, kShifts> q{};
  std::array<std::size_t, kShifts> count{};
  for (std::size_t s = 0; s < kShifts; ++s) {
    q[s] = t.diag[0] - x[s];
    if (std::abs(q[s]) < kPivmin) q[s] = -kPivmin;
    count[s] = q[s] < 0.0 ? 1 : 0;
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double e2 = t.off[i - 1] * t.off[i - 1];
    const double d = t.diag[i];
    for (std::size_t s = 0; s < kShifts; ++s) {
      double v = (d - x[s]) - e2 / q[s];
      if (std::abs(v) < kPivmin) v = -kPivmin;
      count[s] += v < 0.0 ? 1 : 0;
      q[s] = v;
    }
  }
  return count;
}

// Bracket [lo, hi] with count(lo) < k <= count(hi), found by a geometric
// search outward from the origin (clamped to the Gershgorin interval).
Interval bracket_kth(const SymTridiag& t, std::size_t k) {
  const Interval g = gershgorin(t);
  const double pad = 1e-12 * std::max(1.0, std::max(std::abs(g.lo), std::abs(g.hi)));
  const double glo = g.lo - pad;
  const double ghi = g.hi + pad;
  const double origin = std::clamp(0.0, glo, ghi);
  const std::size_t c0 = sturm_count(t, origin);

  if (c0 >= k) {
    double hi = origin;
    double step = 1.0;
    while (true) {
      std::array<double, kShifts> pts{};
      for (std::size_t s = 0; s < kShifts; ++s) {
        pts[s] = std::max(glo, origin - step);
        step *= 4.0;
      }
      const auto c = sturm_counts(t, pts);
      for (std::size_t s = 0; s < kShifts; ++s) {
        if (c[s] < k) return {pts[s], hi};
        hi = pts[s];
      }
      if (pts.back() <= glo) return {glo, hi};
    }
  }
  double lo = origin;
  double step = 1.0;
  while (true) {
    std::array<double, kShifts> pts{};
    for (std::size_t s = 0; s < kShifts; ++s) {
      pts[s] = std::min(ghi, origin + step);
      step *= 4.0;
    }
    const auto c = sturm_counts(t, pts);
    for (std::size_t s = 0; s < kShifts; ++s) {
      if (c[s] >= k) return {lo, pts[s]};
      lo = pts[s];
    }
    if (pts.back() >= ghi) return {lo, ghi};
  }
}

// Shrinks [lo, hi] around the k-th eigenvalue until its width is at most
// `width(mid)` and, if requested, the bracket isolates exactly that value.
// Returns the counts at the final end points.
struct Bracket {
  double lo;
  double hi;
  std::size_t count_lo;
  std::size_t count_hi;
};

template <typename WidthFn>
Bracket multisect(const SymTridiag& t, std::size_t k, Interval start, WidthFn width,
                  bool require_isolation) {
  Bracket b{start.lo, start.hi, sturm_count(t, start.lo), sturm_count(t, start.hi)};
  while (true) {
    const double mid = 0.5 * (b.lo + b.hi);
    const bool narrow = (b.hi - b.lo) <= width(mid);
    const bool isolated = b.count_lo == k - 1 && b.count_hi == k;
    if (narrow && (!require_isolation || isolated)) break;
    std::array<double, kShifts> pts{};
    for (std::size_t s = 0; s < kShifts; ++s) {
      pts[s] = b.lo + (b.hi - b.lo) * static_cast<double>(s + 1) / static_cast<double>(kShifts + 1);
    }
    if (pts.front() <= b.lo || pts.back() >= b.hi) break;  // floating-point resolution reached
    const auto c = sturm_counts(t, pts);
    Bracket next = b;
    for (std::size_t s = 0; s < kShifts; ++s) {
      if (c[s] < k) {
        next.lo = pts[s];
        next.count_lo = c[s];
      }
    }
    for (std::size_t s = kShifts; s-- > 0;) {
      if (c[s] >= k) {
        next.hi = pts[s];
        next.count_hi = c[s];
      }
    }
    b = next;
  }
  return b;
}

// LDL^T factorization of (T - sigma I) with exact-zero pivots avoided by
// nudging the shift.
struct Factor {
  std::vector<double> d;
  std::vector<double> l;
};

bool factor_shifted(const SymTridiag& t, double sigma, Factor& f) {
  const std::size_t n = t.size();
  f.d.resize(n);
  f.l.resize(n > 0 ? n - 1 : 0);
  f.d[0] = t.diag[0] - sigma;
  if (f.d[0] == 0.0) return false;
  for (std::size_t i = 1; i < n; ++i) {
    f.l[i - 1] = t.off[i - 1] / f.d[i - 1];
    f.d[i] = (t.diag[i] - sigma) - f.l[i - 1] * t.off[i - 1];
    if (f.d[i] == 0.0) return false;
  }
  return true;
}

Factor factor_with_safeguard(const SymTridiag& t, double sigma) {
  Factor f;
  double shift = sigma;
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (factor_shifted(t, shift, f)) return f;
    shift += 1e-12 * std::max(1.0, std::abs(sigma)) * static_cast<double>(attempt + 1);
  }
  // Pathological; keep the last factorization but floor the pivots.
  for (auto& v : f.d) {
    if (v == 0.0) v = kPivmin;
  }
  return f;
}

void solve_factored(const Factor& f, std::vector<double>& x) {
  const std::size_t n = x.size();
  for (std::size_t i = 1; i < n; ++i) x[i] -= f.l[i - 1] * x[i - 1];
  for (std::size_t i = 0; i < n; ++i) x[i] /= f.d[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= f.l[i] * x[i + 1];
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void normalize(std::vector<double>& x) {
  const double nrm = norm2(x);
  if (nrm == 0.0 || !std::isfinite(nrm)) return;
  for (auto& v : x) v /= nrm;
}

void fix_sign(std::vector<double>& x) {
  for (double v : x) {
    if (v != 0.0) {
      if (v < 0.0) {
        for (auto& w : x) w = -w;
      }
      return;
    }
  }
}

// Deterministic start vector with components of both signs.
std::vector<double> start_vector(std::size_t n) {
  std::vector<double> x(n);
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (std::size_t i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
    x[i] = 0.5 + u;  // mostly positive: low modes have a dominant sign
  }
  normalize(x);
  return x;
}

double rayleigh(const SymTridiag& t, const std::vector<double>& x) {
  std::vector<double> y(x.size());
  t.multiply(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

bool certified(const SymTridiag& t, std::size_t k, double value, double rel_tol) {
  const double tol = eigen_tolerance(value, rel_tol);
  const auto c = sturm_counts(t, {value - 0.5 * tol, value + 0.5 * tol, value + 0.5 * tol,
                                  value + 0.5 * tol});
  return c[0] == k - 1 && c[1] >= k;
}

void check_k(const SymTridiag& t, std::size_t k) {
  if (t.size() == 0 || k == 0 || k > t.size()) {
    throw SizeError("requested eigenvalue index " + std::to_string(k) +
                    " for a matrix of dimension " + std::to_string(t.size()));
  }
}

}  // namespace

Grid make_grid(double length, std::size_t intervals) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidGridError("grid length must be positive, got " + std::to_string(length));
  }
  if (intervals < 8) {
    throw InvalidGridError("grid needs at least 8 intervals, got " + std::to_string(intervals));
  }
  return Grid{length, intervals, length / static_cast<double>(intervals)};
}

Grid make_grid_with_spacing(double min_length, double spacing) {
  if (!(spacing > 0.0)) throw InvalidGridError("grid spacing must be positive");
  auto n = static_cast<std::size_t>(std::ceil(min_length / spacing - 1e-9));
  n = std::max<std::size_t>(n, 8);
  return Grid{static_cast<double>(n) * spacing, n, spacing};
}

double default_spacing(double b) {
  const double mag = std::max(1.0, std::abs(b));
  return 0.0025 / mag;
}

DomainSize auto_domain(double b, double xi_min, int n_max) {
  return auto_domain(b, xi_min, n_max, default_spacing(b));
}

DomainSize auto_domain(double b, double xi_min, int n_max, double spacing) {
  const double ab = std::max(std::abs(b), 1e-8);
  const double sb = std::sqrt(ab);
  const int n = std::max(n_max, 1);
  const double well = std::max(0.0, -xi_min / ab);
  const double min_length = well + 8.0 / sb + 2.0 * static_cast<double>(n) / sb;
  const double h = std::min({spacing, 0.01, 0.1 / sb});
  const Grid g = make_grid_with_spacing(min_length, h);
  return {g.length, g.intervals};
}

Grid auto_grid(double b, double xi_min, int n_max) {
  const DomainSize d = auto_domain(b, xi_min, n_max);
  return make_grid(d.length, d.intervals);
}

double SymTridiag::norm_inf() const {
  double best = 0.0;
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i + 1 < n) row += std::abs(off[i]);
    best = std::max(best, row);
  }
  return best;
}

void SymTridiag::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
}

std::size_t sturm_count(const SymTridiag& t, double x) {
  const std::size_t n = t.size();
  if (n == 0) return 0;
  double q = t.diag[0] - x;
  if (std::abs(q) < kPivmin) q = -kPivmin;
  std::size_t count = q < 0.0 ? 1 : 0;
  for (std::size_t i = 1; i < n; ++i) {
    q = (t.diag[i] - x) - t.off[i - 1] * t.off[i - 1] / q;
    if (std::abs(q) < kPivmin) q = -kPivmin;
    count += q < 0.0 ? 1 : 0;
  }
  return count;
}

Interval gershgorin(const SymTridiag& t) {
  const std::size_t n = t.size();
  Interval g{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    g.lo = std::min(g.lo, t.diag[i] - r);
    g.hi = std::max(g.hi, t.diag[i] + r);
  }
  return g;
}

double kth_eigenvalue(const SymTridiag& t, std::size_t k, double rel_tol) {
  check_k(t, k);
  const Interval start = bracket_kth(t, k);
  const Bracket b = multisect(
      t, k, start, [rel_tol](double mid) { return eigen_tolerance(mid, rel_tol); }, false);
  return 0.5 * (b.lo + b.hi);
}

std::vector<double> lowest_eigenvalues(const SymTridiag& t, std::size_t k, double rel_tol) {
  if (k > t.size()) {
    throw SizeError("requested " + std::to_string(k) + " eigenvalues of a matrix of dimension " +
                    std::to_string(t.size()));
  }
  std::vector<double> out;
  out.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) out.push_back(kth_eigenvalue(t, i, rel_tol));
  // Adjacent values closer than the tolerance may come out in either order.
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> eigenvalue_range(const SymTridiag& t, std::size_t first, std::size_t last,
                                     double rel_tol) {
  check_k(t, first);
  check_k(t, last);
  std::vector<double> out;
  for (std::size_t i = first; i <= last; ++i) out.push_back(kth_eigenvalue(t, i, rel_tol));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> eigenvector(const SymTridiag& t, double nu, int max_iter) {
  const std::size_t n = t.size();
  if (n == 0) throw SizeError("eigenvector of an empty matrix");
  const double target = 1e-8 * t.norm_inf();
  const Factor f = factor_with_safeguard(t, nu);
  std::vector<double> x = start_vector(n);
  std::vector<double> r(n);
  for (int it = 0; it < max_iter; ++it) {
    solve_factored(f, x);
    normalize(x);
    t.multiply(x, r);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = r[i] - nu * x[i];
      res += d * d;
    }
    if (std::sqrt(res) <= target) {
      fix_sign(x);
      return x;
    }
  }
  throw ConvergenceError("inverse iteration did not converge near " + std::to_string(nu));
}

TridiagEigenpair kth_eigenpair(const SymTridiag& t, std::size_t k, const TridiagEigenpair* warm,
                               double rel_tol) {
  check_k(t, k);
  const std::size_t n = t.size();

  double sigma = 0.0;
  std::vector<double> x;
  Bracket iso{};
  const bool have_warm = warm != nullptr && warm->vector.size() == n;
  if (have_warm) {
    sigma = warm->value;
    x = warm->vector;
  } else {
    iso = multisect(
        t, k, bracket_kth(t, k),
        [](double mid) { return 1e-3 * std::max(1.0, std::abs(mid)); }, true);
    sigma = 0.5 * (iso.lo + iso.hi);
    x = start_vector(n);
    // Fixed-shift steps first: the isolated value is the one nearest sigma.
    const Factor f = factor_with_safeguard(t, sigma);
    for (int i = 0; i < 2; ++i) {
      solve_factored(f, x);
      normalize(x);
    }
    sigma = rayleigh(t, x);
  }

  bool converged = false;
  for (int it = 0; it < 10; ++it) {
    const Factor f = factor_with_safeguard(t, sigma);
    solve_factored(f, x);
    normalize(x);
    if (!std::isfinite(x[0])) break;
    const double rq = rayleigh(t, x);
    const double step = std::abs(rq - sigma);
    sigma = rq;
    if (step <= 0.05 * eigen_tolerance(sigma, rel_tol)) {
      converged = true;
      break;
    }
  }
  if (converged && !have_warm && (sigma < iso.lo || sigma > iso.hi)) converged = false;
  if (converged && certified(t, k, sigma, rel_tol)) {
    fix_sign(x);
    return {sigma, std::move(x)};
  }

  const double value = kth_eigenvalue(t, k, rel_tol);
  return {value, eigenvector(t, value)};
}

}  // namespace hallfiber
