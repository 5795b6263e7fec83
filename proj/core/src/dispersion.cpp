#include "hallfiber/dispersion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "hallfiber/parallel.hpp"

namespace hallfiber {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this a root of f is indistinguishable from the discrete zero-mode
// error of the + form; the slope denominator is not checked there.
constexpr double kUnresolvedTheta = 1e-6;

// Slopes of theta- below this carry no sign information: the branch equals
// the Landau level to double precision.
constexpr double kSlopeResolution = 1e-12;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_canonical(const FiberParams& fp) {
  if (!(fp.b > 0.0) || !std::isfinite(fp.b) || !std::isfinite(fp.xi) || std::isnan(fp.gamma) ||
      fp.gamma < 0.0) {
    throw DomainError("expected canonical parameters (b > 0, gamma in [0, +inf]), got b=" +
                      fmt(fp.b) + " gamma=" + fmt(fp.gamma) + " xi=" + fmt(fp.xi));
  }
}

void check_branch(const Branch& br) {
  if (br.n < 1) throw DomainError("branch index must be >= 1, got " + std::to_string(br.n));
}

double slope_from_dirichlet(const EigenPair& e, double theta) {
  if (theta <= 0.0) return 0.0;
  return nu_dirichlet_partial_xi(e) / (2.0 * theta);
}

ThetaSolution zigzag_infinity(const Branch& br, const FiberParams& fp, const Grid& g) {
  // theta+-_n(+inf, xi) = sqrt(nu^Dir_n(b, xi) - 2b)
  EigenPair e = nu_dirichlet(fp.b, fp.xi, br.n, g);
  ThetaSolution s;
  s.theta = std::sqrt(std::max(0.0, e.nu - 2.0 * fp.b));
  s.theta_slope = slope_from_dirichlet(e, s.theta);
  s.pair = std::move(e);
  return s;
}

ThetaSolution zigzag_zero(const Branch& br, const FiberParams& fp, const Grid& g) {
  // theta+_1 = 0, theta+_n = sqrt(nu^Dir_{n-1}), theta-_n = sqrt(nu^Dir_n)
  const int dir_index = br.sign == BranchSign::plus ? br.n - 1 : br.n;
  ThetaSolution s;
  if (dir_index == 0) return s;
  EigenPair e = nu_dirichlet(fp.b, fp.xi, dir_index, g);
  s.theta = std::sqrt(std::max(0.0, e.nu));
  s.theta_slope = slope_from_dirichlet(e, s.theta);
  s.pair = std::move(e);
  return s;
}

struct Sample {
  double lambda;
  double f;
  double df;
  EigenPair pair;
};

ThetaSolution fixed_point(const Branch& br, const FiberParams& fp, const Grid& g) {
  const bool plus = br.sign == BranchSign::plus;
  const double c = plus ? fp.gamma : 1.0 / fp.gamma;
  const RobinFiberParams base{plus ? FormSign::plus : FormSign::minus, fp.b, 0.0, fp.xi};

  const EigenPair* warm = nullptr;
  std::optional<EigenPair> last;
  int solves = 0;
  auto eval = [&](double lambda) {
    RobinFiberParams p = base;
    p.alpha = c * lambda;
    EigenPair e = nu(p, br.n, g, warm);
    ++solves;
    const double f = e.nu - lambda * lambda;
    const double df = c * nu_partial_alpha(e) - 2.0 * lambda;
    last = e;
    warm = &*last;
    return Sample{lambda, f, df, std::move(e)};
  };

  const double lambda0 = std::sqrt(2.0 * (br.n + 1) * fp.b) + 1.0;
  const double lambda_max = 10.0 * std::sqrt(2.0 * (br.n + 2) * fp.b);

  // f(0) >= 0 holds analytically, so lo = 0 is a valid left end.
  double lo = 0.0;
  double hi = std::min(lambda0, lambda_max);
  Sample cur = eval(hi);
  for (int doubling = 0; cur.f >= 0.0; ++doubling) {
    if (doubling >= 6 || hi >= lambda_max) {
      throw BracketError("no sign change of nu(c lambda) - lambda^2 up to lambda = " + fmt(hi) +
                         " for branch " + br.label() + " at xi = " + fmt(fp.xi));
    }
    lo = hi;
    hi = std::min(2.0 * hi, lambda_max);
    cur = eval(hi);
  }

  ThetaSolution out;
  out.robin_scale = c;
  // n = 1: f is concave (nu_1 is concave in alpha), so Newton from the right
  // decreases monotonically onto the largest root. A target at or below zero,
  // or f < 0 with f' >= 0, means the discrete f has no positive root: the
  // continuum root is below the resolution of the grid.
  const bool concave = br.n == 1;
  for (int it = 0; it < 100; ++it) {
    if (std::abs(cur.f) <= 1e-10 * (1.0 + cur.lambda * cur.lambda)) break;
    if (cur.f >= 0.0) {
      lo = cur.lambda;
    } else {
      hi = cur.lambda;
    }
    if (hi - lo <= 1e-14 * (1.0 + hi)) break;
    if (concave && cur.f < 0.0 && lo == 0.0) {
      const double target = cur.df < 0.0 ? cur.lambda - cur.f / cur.df : -1.0;
      if (target <= 0.0) {
        out.iterations = solves;
        return out;
      }
    }
    double next = cur.df != 0.0 ? cur.lambda - cur.f / cur.df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    cur = eval(next);
  }

  out.theta = cur.lambda;
  out.iterations = solves;
  const double denom = c * nu_partial_alpha(cur.pair) - 2.0 * cur.lambda;
  if (denom < 0.0) {
    out.theta_slope = -nu_partial_xi(cur.pair) / denom;
  } else if (out.theta > kUnresolvedTheta) {
    throw InvariantViolation("slope denominator c d_alpha nu - 2 theta = " + fmt(denom) +
                             " is not negative for branch " + br.label() + " at xi = " +
                             fmt(fp.xi));
  }
  out.pair = std::move(cur.pair);
  return out;
}

}  // namespace

std::string Branch::label() const {
  return (sign == BranchSign::plus ? "+" : "-") + std::to_string(n);
}

Branch Branch::parse(const std::string& text) {
  if (text.empty()) throw DomainError("empty branch label");
  std::size_t pos = 0;
  BranchSign sign = BranchSign::plus;
  if (text[0] == '+' || text[0] == '-') {
    sign = text[0] == '+' ? BranchSign::plus : BranchSign::minus;
    pos = 1;
  }
  const std::string digits = text.substr(pos);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char ch) {
        return std::isdigit(ch) != 0;
      })) {
    throw DomainError("malformed branch label '" + text + "'");
  }
  const int n = std::stoi(digits);
  if (n < 1) throw DomainError("branch index must be >= 1 in '" + text + "'");
  return {sign, n};
}

std::vector<Branch> branches_up_to(int n_max) {
  std::vector<Branch> out;
  for (int n = 1; n <= n_max; ++n) out.push_back({BranchSign::plus, n});
  for (int n = 1; n <= n_max; ++n) out.push_back({BranchSign::minus, n});
  return out;
}

double gamma_from_eta(double eta) {
  constexpr double pi = std::numbers::pi;
  if (!(eta >= -pi / 2.0 && eta < 1.5 * pi)) {
    throw DomainError("eta must lie in [-pi/2, 3pi/2), got " + fmt(eta));
  }
  if (eta == -pi / 2.0) return kInf;
  const double s = std::sin(eta);
  if (1.0 + s == 0.0) return kInf;
  return std::cos(eta) / (1.0 + s);
}

CanonicalProblem canonicalize(const FiberParams& fp) {
  if (fp.b == 0.0 || !std::isfinite(fp.b)) {
    throw DomainError("field b must be finite and nonzero, got " + fmt(fp.b));
  }
  if (!std::isfinite(fp.xi)) throw DomainError("momentum xi must be finite");
  if (std::isnan(fp.gamma)) throw DomainError("gamma must not be NaN");

  CanonicalProblem out;
  out.params = fp;
  FiberParams& p = out.params;
  SymmetryTransform& t = out.transform;
  if (p.gamma == 0.0) p.gamma = 0.0;  // drop the sign of -0
  if (p.xi == 0.0) p.xi = 0.0;
  if (p.gamma < 0.0) {
    p.gamma = -p.gamma;
    t.negate_spectrum = !t.negate_spectrum;
  }
  if (p.b < 0.0) {
    p.b = -p.b;
    p.xi = p.xi == 0.0 ? 0.0 : -p.xi;
    p.gamma = p.gamma == 0.0 ? kInf : (std::isinf(p.gamma) ? 0.0 : 1.0 / p.gamma);
    t.negate_spectrum = !t.negate_spectrum;
    t.reflect_xi = true;
    t.invert_gamma = true;
  }
  t.flip_branch_sign = t.negate_spectrum;
  return out;
}

GammaKind classify_gamma(double canonical_gamma) {
  if (canonical_gamma <= kZigzagZero) return GammaKind::zero;
  if (canonical_gamma >= kZigzagInfinity) return GammaKind::infinite;
  return GammaKind::finite;
}

Grid grid_for(const FiberParams& canonical, int n, const SolveOptions& opts) {
  const double spacing = opts.spacing > 0.0 ? opts.spacing : default_spacing(canonical.b);
  const DomainSize d = auto_domain(canonical.b, canonical.xi, std::max(n, 3), spacing);
  return make_grid(d.length, d.intervals);
}

ThetaSolution solve_theta(const Branch& br, const FiberParams& fp, const Grid& g) {
  check_branch(br);
  check_canonical(fp);
  switch (classify_gamma(fp.gamma)) {
    case GammaKind::zero:
      return zigzag_zero(br, fp, g);
    case GammaKind::infinite:
      return zigzag_infinity(br, fp, g);
    case GammaKind::finite:
      break;
  }
  return fixed_point(br, fp, g);
}

double theta(const Branch& br, const FiberParams& fp, const Grid& g) {
  return solve_theta(br, fp, g).theta;
}

double curve_slope(const Branch& br, const FiberParams& fp, double theta_value,
                   const EigenPair& e) {
  check_canonical(fp);
  double theta_slope = 0.0;
  switch (classify_gamma(fp.gamma)) {
    case GammaKind::zero:
    case GammaKind::infinite:
      theta_slope = e.is_robin() ? 0.0 : slope_from_dirichlet(e, theta_value);
      break;
    case GammaKind::finite: {
      const double c = br.sign == BranchSign::plus ? fp.gamma : 1.0 / fp.gamma;
      const double denom = c * nu_partial_alpha(e) - 2.0 * theta_value;
      if (!(denom < 0.0)) {
        throw InvariantViolation("slope denominator c d_alpha nu - 2 theta = " + fmt(denom) +
                                 " is not negative for branch " + br.label());
      }
      theta_slope = -nu_partial_xi(e) / denom;
      break;
    }
  }
  return br.sign_factor() * theta_slope;
}

BranchPoint evaluate_branch(const Branch& br, const FiberParams& fp, const SolveOptions& opts) {
  check_branch(br);
  const CanonicalProblem cp = canonicalize(fp);
  const Branch cb = cp.transform.canonical_branch(br);
  const Grid g = grid_for(cp.params, cb.n, opts);
  const ThetaSolution s = solve_theta(cb, cp.params, g);
  BranchPoint out;
  out.theta = s.theta;
  out.lambda = br.sign_factor() * s.theta;
  out.slope = br.sign_factor() * cp.transform.xi_factor() * s.theta_slope;
  if (out.lambda == 0.0) out.lambda = 0.0;
  if (out.slope == 0.0) out.slope = 0.0;
  return out;
}

double asymptotic_limit(const Branch& br, double canonical_gamma, double b) {
  check_branch(br);
  const double n = br.n;
  switch (classify_gamma(canonical_gamma)) {
    case GammaKind::finite:
    case GammaKind::zero:
      return br.sign == BranchSign::plus ? std::sqrt(2.0 * (n - 1.0) * b)
                                         : -std::sqrt(2.0 * n * b);
    case GammaKind::infinite:
      break;
  }
  return br.sign_factor() * std::sqrt(2.0 * (n - 1.0) * b);
}

double asymptotic_limit_plus(const Branch& br, double canonical_gamma, double /*b*/) {
  check_branch(br);
  if (classify_gamma(canonical_gamma) == GammaKind::zero && br.sign == BranchSign::plus &&
      br.n == 1) {
    return 0.0;
  }
  return br.sign_factor() * kInf;
}

std::vector<double> xi_samples(double xi_min, double xi_max, int steps) {
  if (!(xi_min < xi_max) || steps < 2) {
    throw DomainError("xi range needs xi_min < xi_max and steps >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(steps));
  const double span = xi_max - xi_min;
  for (int i = 0; i < steps; ++i) {
    out[static_cast<std::size_t>(i)] =
        i == steps - 1 ? xi_max : xi_min + span * static_cast<double>(i) / (steps - 1);
  }
  return out;
}

std::vector<DispersionCurve> sweep(double gamma, double b, const std::vector<double>& xis,
                                   const std::vector<Branch>& branches,
                                   const SweepOptions& opts) {
  const CanonicalProblem probe = canonicalize({b, gamma, 0.0});
  std::vector<DispersionCurve> curves(branches.size());
  for (std::size_t k = 0; k < branches.size(); ++k) {
    check_branch(branches[k]);
    DispersionCurve& c = curves[k];
    c.branch = branches[k];
    c.gamma = gamma;
    c.b = b;
    c.xis = xis;
    c.lambdas.assign(xis.size(), 0.0);
    c.slopes.assign(xis.size(), 0.0);
    c.transform = probe.transform;
    // Requested lambda(-inf) is the canonical limit at -inf, or at +inf when
    // the momentum is reflected.
    const Branch cb = probe.transform.canonical_branch(c.branch);
    const double lim = probe.transform.reflect_xi
                           ? asymptotic_limit_plus(cb, probe.params.gamma, probe.params.b)
                           : asymptotic_limit(cb, probe.params.gamma, probe.params.b);
    c.limit_minus_inf = probe.transform.energy_factor() * lim;
  }

  const std::size_t m = xis.size();
  parallel_for(branches.size() * m, opts.workers, [&](std::size_t task) {
    const std::size_t k = task / m;
    const std::size_t i = task % m;
    try {
      const BranchPoint p = evaluate_branch(branches[k], {b, gamma, xis[i]}, opts.solve);
      curves[k].lambdas[i] = p.lambda;
      curves[k].slopes[i] = p.slope;
    } catch (const Error& e) {
      throw SweepError(std::string(e.what()) + " [branch " + branches[k].label() +
                           ", xi = " + fmt(xis[i]) + "]",
                       branches[k], xis[i]);
    }
  });
  return curves;
}

std::vector<DispersionCurve> sweep(double gamma, double b, double xi_min, double xi_max, int steps,
                                   const std::vector<Branch>& branches,
                                   const SweepOptions& opts) {
  return sweep(gamma, b, xi_samples(xi_min, xi_max, steps), branches, opts);
}

CriticalPoint critical_point(double gamma, double b, int n, const SolveOptions& opts) {
  if (!(b > 0.0) || classify_gamma(gamma) != GammaKind::finite) {
    throw DomainError("critical point needs b > 0 and finite gamma > 0");
  }
  const Branch br{BranchSign::minus, n};
  auto at = [&](double xi) {
    const FiberParams fp{b, gamma, xi};
    const ThetaSolution s = solve_theta(br, fp, grid_for(fp, n, opts));
    return CriticalPoint{xi, s.theta, s.theta_slope};
  };

  // theta- is increasing at xi = 0 (the minimizer satisfies
  // theta* = -2 gamma xi* / (gamma^2 + 1) > 0), so search to the left.
  const double limit = 20.0 * std::sqrt(b);
  CriticalPoint hi = at(0.0);
  if (hi.slope <= 0.0) {
    for (double step = std::sqrt(b); hi.slope <= 0.0; step *= 2.0) {
      if (hi.xi >= limit) {
        throw BracketError("theta- slope stays non-positive up to xi = " + fmt(hi.xi));
      }
      hi = at(std::min(hi.xi + step, limit));
    }
  }
  CriticalPoint lo = at(hi.xi - std::sqrt(b));
  for (double step = std::sqrt(b); lo.slope >= 0.0; step *= 2.0) {
    if (lo.xi <= -limit) {
      throw BracketError("theta- slope stays non-negative down to xi = " + fmt(lo.xi));
    }
    if (std::abs(lo.slope) < kSlopeResolution) {
      throw BracketError("theta- is flat to within " + fmt(kSlopeResolution) + " at xi = " +
                         fmt(lo.xi) + "; the minimizer is not resolved");
    }
    hi = lo;
    lo = at(std::max(lo.xi - step, -limit));
  }

  if (std::abs(lo.slope) < kSlopeResolution) {
    throw BracketError("theta- is flat to within " + fmt(kSlopeResolution) + " at xi = " +
                       fmt(lo.xi) + "; the minimizer is not resolved");
  }
  CriticalPoint best = std::abs(lo.slope) < std::abs(hi.slope) ? lo : hi;
  for (int it = 0; it < 200 && std::abs(best.slope) > 1e-8; ++it) {
    const double mid = 0.5 * (lo.xi + hi.xi);
    if (mid <= lo.xi || mid >= hi.xi) break;
    const CriticalPoint m = at(mid);
    if (std::abs(m.slope) < std::abs(best.slope)) best = m;
    if (m.slope < 0.0) {
      lo = m;
    } else {
      hi = m;
    }
  }
  return best;
}

std::vector<GapEntry> gap_profile(double b, const std::vector<double>& gammas,
                                  const GapOptions& opts) {
  if (!(b > 0.0)) throw DomainError("gap profile expects b > 0");
  std::vector<GapEntry> out(gammas.size());
  const Branch br{BranchSign::minus, 1};
  const std::vector<double> xis = xi_samples(opts.xi_min, opts.xi_max, opts.steps);

  parallel_for(gammas.size(), opts.workers, [&](std::size_t k) {
    const double gamma = gammas[k];
    if (std::isnan(gamma) || gamma < 0.0) throw DomainError("gap profile expects gamma >= 0");
    GapEntry e;
    e.gamma = gamma;
    if (classify_gamma(gamma) == GammaKind::finite) {
      try {
        const CriticalPoint cp = critical_point(gamma, b, 1, opts.solve);
        if (cp.xi >= opts.xi_min && cp.xi <= opts.xi_max) {
          e.max_negative_energy = -cp.theta;
          e.xi = cp.xi;
          out[k] = e;
          return;
        }
      } catch (const BracketError&) {
        // Minimizer outside the search range; fall back to the sampled window.
      }
    }
    double best = kInf;
    for (double xi : xis) {
      const FiberParams fp{b, gamma, xi};
      const double t = theta(br, fp, grid_for(fp, 1, opts.solve));
      if (t < best) {
        best = t;
        e.xi = xi;
      }
    }
    e.max_negative_energy = -best;
    out[k] = e;
  });
  return out;
}

}  // namespace hallfiber
