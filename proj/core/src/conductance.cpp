#include "hallfiber/conductance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "hallfiber/parallel.hpp"

namespace hallfiber {

namespace {

double smoothstep5(double t) { return t * t * t * (t * (6.0 * t - 15.0) + 10.0); }
double smoothstep5_derivative(double t) {
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Max number of pieces a coarse interval is split into.
constexpr int kMaxRefinement = 512;
// Refined pieces move lambda by at most delta / kRefineFraction.
constexpr double kRefineFraction = 64.0;

}  // namespace

double landau_energy(double b, int k) {
  const double e = std::sqrt(2.0 * std::abs(static_cast<double>(k)) * std::abs(b));
  return k < 0 ? -e : e;
}

std::vector<double> landau_levels(double b, int k_max) {
  std::vector<double> out;
  for (int k = -std::max(k_max, 0); k <= std::max(k_max, 0); ++k) out.push_back(landau_energy(b, k));
  return out;
}

double max_delta(double b, const std::vector<int>& selected) {
  double gap = std::numeric_limits<double>::infinity();
  for (int k : selected) {
    const int a = std::abs(k);
    gap = std::min(gap, landau_energy(b, a + 1) - landau_energy(b, a));
  }
  return 0.5 * gap;
}

double default_delta(double b, const std::vector<int>& selected) {
  return std::min(0.3 * std::sqrt(std::abs(b)), 0.9 * max_delta(b, selected));
}

void validate_window(const LevelWindow& w) {
  if (w.b == 0.0 || !std::isfinite(w.b)) throw WindowError("window needs a finite nonzero b");
  if (w.selected.empty()) throw WindowError("window selects no Landau level");
  std::vector<int> sorted = w.selected;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw WindowError("window selects a Landau level twice");
  }
  const double limit = max_delta(w.b, w.selected);
  if (!(w.delta > 0.0) || !(w.delta < limit)) {
    throw WindowError("bump half-width delta = " + fmt(w.delta) + " must lie in (0, " +
                      fmt(limit) + ") so that bumps do not reach neighbouring levels");
  }
}

WindowFunction::WindowFunction(LevelWindow w) : window_(std::move(w)) {
  validate_window(window_);
  std::sort(window_.selected.begin(), window_.selected.end());
  for (int k : window_.selected) centers_.push_back(landau_energy(window_.b, k));
}

double WindowFunction::value(double energy) const {
  const double d = window_.delta;
  double total = 0.0;
  for (double c : centers_) {
    const double x = std::abs(energy - c);
    if (x <= 0.5 * d) {
      total += 1.0;
    } else if (x < d) {
      total += smoothstep5((d - x) / (0.5 * d));
    }
  }
  return total;
}

double WindowFunction::derivative(double energy) const {
  const double d = window_.delta;
  double total = 0.0;
  for (double c : centers_) {
    const double x = energy - c;
    const double ax = std::abs(x);
    if (ax > 0.5 * d && ax < d) {
      const double slope = smoothstep5_derivative((d - ax) / (0.5 * d)) / (0.5 * d);
      total += x > 0.0 ? -slope : slope;
    }
  }
  return total;
}

bool WindowFunction::in_support(double energy) const { return meets_support(energy, energy); }

bool WindowFunction::meets_support(double lo, double hi) const {
  const double d = window_.delta;
  return std::any_of(centers_.begin(), centers_.end(),
                     [&](double c) { return hi >= c - d && lo <= c + d; });
}

WindowFunction build_window(const LevelWindow& w) { return WindowFunction(w); }

int auto_j_max(double b, const LevelWindow& w) {
  double reach = 0.0;
  for (int k : w.selected) reach = std::max(reach, std::abs(landau_energy(b, k)));
  reach += w.delta;
  // Branch n never goes below sqrt(2(n-1)|b|) in magnitude; one extra branch
  // keeps the first excluded curve under observation.
  int n = 1;
  while (landau_energy(b, n) <= reach) ++n;
  return n + 1;
}

ConductanceReport conductance_by_limits(double gamma, double b, const LevelWindow& w) {
  const WindowFunction f = build_window(w);
  const CanonicalProblem cp = canonicalize({b, gamma, 0.0});
  const SymmetryTransform& t = cp.transform;

  ConductanceReport r;
  r.gamma = gamma;
  r.b = b;
  r.window = f.window();
  r.transform = t;

  std::vector<CurveContribution> plus;
  std::vector<CurveContribution> minus;
  double total = 0.0;
  const int n_max = auto_j_max(b, w);
  for (const Branch& requested : branches_up_to(n_max)) {
    const Branch cb = t.canonical_branch(requested);
    const double lo = asymptotic_limit(cb, cp.params.gamma, cp.params.b);
    const double hi = asymptotic_limit_plus(cb, cp.params.gamma, cp.params.b);
    CurveContribution c;
    c.branch = requested;
    c.limit_minus = t.energy_factor() * (t.reflect_xi ? hi : lo);
    c.limit_plus = t.energy_factor() * (t.reflect_xi ? lo : hi);
    c.f_minus = f.value(c.limit_minus);
    c.f_plus = f.value(c.limit_plus);
    c.contribution = c.f_minus - c.f_plus;
    total += c.contribution;
    const bool flat = c.limit_minus == c.limit_plus;
    if (c.f_minus != 0.0 || c.f_plus != 0.0 || flat) {
      (requested.sign == BranchSign::plus ? plus : minus).push_back(c);
    }
  }
  r.per_curve = std::move(plus);
  r.per_curve.insert(r.per_curve.end(), minus.begin(), minus.end());
  r.integer_value = std::lround(total);
  return r;
}

std::optional<BranchPoint> SampleCache::find(const FiberParams& canonical, double spacing,
                                             const Branch& br) const {
  std::lock_guard lock(mutex_);
  const auto it = points_.find(key(canonical, spacing, br));
  if (it == points_.end()) return std::nullopt;
  return it->second;
}

void SampleCache::store(const FiberParams& canonical, double spacing, const Branch& br,
                        const BranchPoint& p) {
  std::lock_guard lock(mutex_);
  points_.emplace(key(canonical, spacing, br), p);
}

std::size_t SampleCache::size() const {
  std::lock_guard lock(mutex_);
  return points_.size();
}

SampleCache::Key SampleCache::key(const FiberParams& canonical, double spacing, const Branch& br) {
  return {canonical.b, canonical.gamma, canonical.xi, spacing,
          br.sign == BranchSign::plus ? br.n : -br.n};
}

ConductanceReport conductance_by_integral(double gamma, double b, const LevelWindow& w,
                                          const IntegralOptions& opts) {
  ConductanceReport r = conductance_by_limits(gamma, b, w);
  const WindowFunction f = build_window(w);
  const CanonicalProblem cp = canonicalize({b, gamma, 0.0});
  const SymmetryTransform& t = cp.transform;
  const double sigma = t.energy_factor();

  if (!(opts.xi_step > 0.0)) throw DomainError("xi step must be positive");
  const double requested_xi = opts.xi_half_width > 0.0 ? opts.xi_half_width
                                                        : 10.0 * std::sqrt(std::abs(b));
  const long k_max = std::max(1L, std::lround(requested_xi / opts.xi_step));
  const double step = opts.xi_step;
  const int j_max = opts.j_max > 0 ? opts.j_max : auto_j_max(b, w);
  const std::vector<Branch> canonical = branches_up_to(j_max);

  // Sample index k sits at xi = k * step so that grids with different Xi
  // share their points exactly.
  const std::size_t coarse = static_cast<std::size_t>(2 * k_max + 1);
  auto coarse_xi = [&](std::size_t i) { return static_cast<double>(static_cast<long>(i) - k_max) * step; };

  auto solve_points = [&](const std::vector<std::pair<std::size_t, double>>& tasks,
                          std::vector<BranchPoint>& out) {
    out.assign(tasks.size(), {});
    parallel_for(tasks.size(), opts.sweep.workers, [&](std::size_t i) {
      const Branch& br = canonical[tasks[i].first];
      const double xi = tasks[i].second;
      const FiberParams point{cp.params.b, cp.params.gamma, xi};
      const double spacing = opts.sweep.solve.spacing;
      if (opts.cache) {
        if (auto hit = opts.cache->find(point, spacing, br)) {
          out[i] = *hit;
          return;
        }
      }
      try {
        out[i] = evaluate_branch(br, point, opts.sweep.solve);
      } catch (const Error& e) {
        throw SweepError(std::string(e.what()) + " [branch " + br.label() + ", xi = " +
                             fmt(xi) + "]",
                         br, xi);
      }
      if (opts.cache) opts.cache->store(point, spacing, br, out[i]);
    });
  };

  std::vector<std::pair<std::size_t, double>> tasks;
  for (std::size_t j = 0; j < canonical.size(); ++j) {
    for (std::size_t i = 0; i < coarse; ++i) tasks.emplace_back(j, coarse_xi(i));
  }
  std::vector<BranchPoint> coarse_points;
  solve_points(tasks, coarse_points);
  std::size_t samples = tasks.size();

  auto at = [&](std::size_t j, std::size_t i) -> const BranchPoint& {
    return coarse_points[j * coarse + i];
  };

  // Coarse intervals where the curve may meet the support of F' get
  // subdivided so that lambda moves by at most delta/64 per piece.
  struct Piece {
    std::size_t branch;
    std::size_t interval;
    int parts;
  };
  std::vector<Piece> pieces;
  std::vector<std::pair<std::size_t, double>> fine_tasks;
  for (std::size_t j = 0; j < canonical.size(); ++j) {
    for (std::size_t i = 0; i + 1 < coarse; ++i) {
      const BranchPoint& a = at(j, i);
      const BranchPoint& c = at(j, i + 1);
      const double margin = step * std::max(std::abs(a.slope), std::abs(c.slope));
      const double lo = sigma * std::min(a.lambda, c.lambda) - margin;
      const double hi = sigma * std::max(a.lambda, c.lambda) + margin;
      const double lo_e = std::min(lo, hi);
      const double hi_e = std::max(lo, hi);
      if (!f.meets_support(lo_e, hi_e)) continue;
      const double travel = std::max(std::abs(c.lambda - a.lambda), margin);
      const int parts = std::clamp(
          static_cast<int>(std::ceil(travel / (w.delta / kRefineFraction))), 1, kMaxRefinement);
      if (parts == 1) continue;
      pieces.push_back({j, i, parts});
      const double xa = coarse_xi(i);
      const double xb = coarse_xi(i + 1);
      for (int p = 1; p < parts; ++p) {
        fine_tasks.emplace_back(j, xa + (xb - xa) * static_cast<double>(p) / parts);
      }
    }
  }
  std::vector<BranchPoint> fine_points;
  solve_points(fine_tasks, fine_points);
  samples += fine_tasks.size();

  // Integrand in the canonical frame: sigma F'(sigma lambda_c) lambda_c'.
  auto integrand = [&](const BranchPoint& p) {
    return sigma * f.derivative(sigma * p.lambda) * p.slope;
  };

  for (std::size_t j = 0; j < canonical.size(); ++j) {
    for (const std::size_t edge : {std::size_t{0}, coarse - 1}) {
      if (f.derivative(sigma * at(j, edge).lambda) != 0.0) {
        throw WindowError("branch " + canonical[j].label() + " is inside the support of F' at xi = " +
                          fmt(coarse_xi(edge)) + "; widen the momentum window");
      }
    }
  }

  std::vector<double> branch_integral(canonical.size(), 0.0);
  std::size_t piece = 0;
  std::size_t fine_offset = 0;
  for (std::size_t j = 0; j < canonical.size(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < coarse; ++i) {
      const double ga = integrand(at(j, i));
      const double gb = integrand(at(j, i + 1));
      if (piece < pieces.size() && pieces[piece].branch == j && pieces[piece].interval == i) {
        const int parts = pieces[piece].parts;
        const double hstep = step / parts;
        double prev = ga;
        for (int p = 1; p < parts; ++p) {
          const double g = integrand(fine_points[fine_offset++]);
          sum += 0.5 * hstep * (prev + g);
          prev = g;
        }
        sum += 0.5 * hstep * (prev + gb);
        ++piece;
      } else {
        sum += 0.5 * step * (ga + gb);
      }
    }
    branch_integral[j] = sum;
  }

  // Reflection of xi reverses the orientation of the momentum axis.
  const double orientation = t.xi_factor();
  double total = 0.0;
  for (std::size_t j = 0; j < canonical.size(); ++j) {
    const double contribution = -orientation * branch_integral[j];
    total += contribution;
    const Branch requested = t.canonical_branch(canonical[j]);
    auto it = std::find_if(r.per_curve.begin(), r.per_curve.end(),
                           [&](const CurveContribution& c) { return c.branch == requested; });
    if (it != r.per_curve.end()) {
      it->integral = contribution;
    } else if (std::abs(contribution) > 0.0) {
      CurveContribution c;
      c.branch = requested;
      const Branch cb = canonical[j];
      const double lo = asymptotic_limit(cb, cp.params.gamma, cp.params.b);
      const double hi = asymptotic_limit_plus(cb, cp.params.gamma, cp.params.b);
      c.limit_minus = sigma * (t.reflect_xi ? hi : lo);
      c.limit_plus = sigma * (t.reflect_xi ? lo : hi);
      c.f_minus = f.value(c.limit_minus);
      c.f_plus = f.value(c.limit_plus);
      c.contribution = c.f_minus - c.f_plus;
      c.integral = contribution;
      r.per_curve.push_back(c);
    }
  }

  r.integral_value = total;
  r.xi_half_width = static_cast<double>(k_max) * step;
  r.xi_step = step;
  r.j_max = j_max;
  r.samples = samples;
  return r;
}

}  // namespace hallfiber
