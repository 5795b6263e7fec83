#include "validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <memory>

#include "hallfiber/conductance.hpp"
#include "hallfiber/fiber_dirac.hpp"
#include "hallfiber/fiber_schrodinger.hpp"
#include "output.hpp"

namespace hallfiber::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances of the acceptance criteria.
constexpr double kDirichletRelTol = 1e-3;
constexpr double kRatioLo = 3.5;
constexpr double kRatioHi = 4.5;
constexpr double kLimitTol = 2e-3;
constexpr double kLimitXi = -8.0;
constexpr double kZigzagTol = 2e-3;
constexpr double kMirrorTol = 1e-6;
constexpr double kCrossTol = 1e-3;
constexpr double kPartialTol = 1e-3;
constexpr double kPartialStep = 1e-4;
constexpr double kSlopeTol = 2e-3;
constexpr double kSlopeStep = 1e-3;
constexpr double kVelocityTol = 2e-3;
constexpr double kRelationTol = 2e-3;
constexpr double kSecondDiffStep = 0.05;
constexpr double kGapEndpointTol = 5e-3;
constexpr double kIntegralTol = 1e-2;
constexpr double kSymmetryTol = 1e-6;
constexpr double kZeroModeTol = 1e-6;
constexpr double kGapMargin = 0.3;
// theta below this is not resolved by the discrete Robin forms.
constexpr double kResolvedTheta = 1e-3;
// Differences of theta below this are within the root-finding tolerance.
constexpr double kThetaResolution = 1e-9;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string fmt_gamma(double g) { return format_number(g); }

// Collects pass/fail checks and the worst tolerance usage.
class Tally {
 public:
  void require(bool ok, const std::string& label) {
    ++checks_;
    if (!ok) fail(label);
  }

  // |value| <= tol, tracking the largest |value| / tol.
  void within(double value, double tol, const std::string& label) {
    ++checks_;
    const double usage = std::abs(value) / tol;
    if (!(usage <= 1.0)) {
      fail(label + ": " + fmt(value) + " > " + fmt(tol));
    }
    if (usage > worst_usage_ || std::isnan(usage)) {
      worst_usage_ = usage;
      worst_ = label + ": " + fmt(std::abs(value)) + " (tol " + fmt(tol) + ")";
    }
  }

  void note(const std::string& text) { notes_ += (notes_.empty() ? "" : "; ") + text; }

  void fill(CriterionResult& r) const {
    r.checks = checks_;
    r.failures = failures_;
    r.pass = failures_ == 0 && checks_ > 0;
    if (failures_ > 0) {
      r.detail = std::to_string(failures_) + " failed; first: " + first_failure_;
    } else if (!worst_.empty()) {
      r.detail = "worst " + worst_;
    }
    if (!notes_.empty()) r.detail += (r.detail.empty() ? "" : "; ") + notes_;
  }

 private:
  void fail(const std::string& label) {
    if (failures_++ == 0) first_failure_ = label;
  }

  int checks_ = 0;
  int failures_ = 0;
  std::string first_failure_;
  double worst_usage_ = -1.0;
  std::string worst_;
  std::string notes_;
};

Branch plus(int n) { return {BranchSign::plus, n}; }
Branch minus(int n) { return {BranchSign::minus, n}; }

std::string point_label(const Branch& br, double gamma, double xi) {
  return br.label() + " gamma=" + fmt_gamma(gamma) + " xi=" + fmt(xi);
}

double theta_at(const Branch& br, double gamma, double xi, const ValidationOptions& o) {
  return evaluate_branch(br, {1.0, gamma, xi}, o.solve).theta;
}

// 1. Dirichlet eigenvalues against the odd Hermite values and the h^2 rate.
void odd_hermite(Tally& t, const ValidationOptions& o) {
  struct Case {
    double b;
    int n;
    double exact;
  };
  for (const Case c : {Case{1.0, 1, 4.0}, Case{1.0, 2, 8.0}, Case{-1.0, 1, 2.0}}) {
    const Grid g = grid_for({std::abs(c.b), kInf, 0.0}, 3, o.solve);
    const Grid fine = make_grid_with_spacing(g.length, 0.5 * g.spacing);
    const double coarse_err = nu_dirichlet(c.b, 0.0, c.n, g).nu - c.exact;
    const double fine_err = nu_dirichlet(c.b, 0.0, c.n, fine).nu - c.exact;
    const std::string label = "nu" + std::to_string(c.n) + "(b=" + fmt(c.b) + ")";
    t.within(coarse_err / c.exact, kDirichletRelTol, label + " relative error");
    const double ratio = coarse_err / fine_err;
    t.require(ratio >= kRatioLo && ratio <= kRatioHi,
              label + " refinement ratio " + fmt(ratio) + " outside [3.5, 4.5]");
    t.note(label + " ratio " + fmt(ratio));
  }
}

// 2. Landau limits at xi = -8.
void landau_limits(Tally& t, const ValidationOptions& o) {
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (int n = 1; n <= 3; ++n) {
      const double tp = theta_at(plus(n), gamma, kLimitXi, o);
      const double tm = theta_at(minus(n), gamma, kLimitXi, o);
      t.within(tp - std::sqrt(2.0 * (n - 1)), kLimitTol, point_label(plus(n), gamma, kLimitXi));
      t.within(tm - std::sqrt(2.0 * n), kLimitTol, point_label(minus(n), gamma, kLimitXi));
    }
  }
}

// 3. Zigzag closed forms and the symmetry of the zigzag spectra.
void zigzag_forms(Tally& t, const ValidationOptions& o) {
  for (int n = 1; n <= 3; ++n) {
    t.within(theta_at(plus(n), kInf, 0.0, o) - std::sqrt(4.0 * n - 2.0), kZigzagTol,
             point_label(plus(n), kInf, 0.0));
  }
  for (int n = 2; n <= 3; ++n) {
    t.within(theta_at(plus(n), 0.0, 0.0, o) - std::sqrt(4.0 * (n - 1)), kZigzagTol,
             point_label(plus(n), 0.0, 0.0));
  }
  SweepOptions so{o.solve, o.workers};
  const auto flat = sweep(0.0, 1.0, -6.0, 4.0, 41, {plus(1)}, so);
  double worst = 0.0;
  for (double v : flat.front().lambdas) worst = std::max(worst, std::abs(v));
  t.within(worst, kZigzagTol, "+1 at gamma=0 over [-6, 4]");

  for (double gamma : {0.0, kInf}) {
    const auto curves = sweep(gamma, 1.0, -6.0, 4.0, 21, branches_up_to(3), so);
    double mirror = 0.0;
    for (int n = 1; n <= 3; ++n) {
      // gamma = 0 pairs +(n+1) with -n, gamma = inf pairs +n with -n.
      const int pn = gamma == 0.0 ? n + 1 : n;
      if (pn > 3) continue;
      const auto& p = curves[static_cast<std::size_t>(pn - 1)];
      const auto& m = curves[static_cast<std::size_t>(3 + n - 1)];
      for (std::size_t i = 0; i < p.lambdas.size(); ++i) {
        mirror = std::max(mirror, std::abs(p.lambdas[i] + m.lambdas[i]));
      }
    }
    t.within(mirror, kMirrorTol, "curve mirror gamma=" + fmt_gamma(gamma));

    const int k = gamma == 0.0 ? 7 : 6;
    for (double xi : {-2.0, 0.0, 2.0}) {
      const FiberParams fp{1.0, gamma, xi};
      const auto w = dirac_spectrum_window(fp, grid_for(fp, 3, o.solve), k);
      double dev = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        dev = std::max(dev, std::abs(w[i] + w[w.size() - 1 - i]));
      }
      t.within(dev, kMirrorTol, "Dirac spectrum mirror gamma=" + fmt_gamma(gamma) + " xi=" + fmt(xi));
    }
  }
}

// 4. Fixed point against the staggered Dirac eigenvalues.
void cross_oracle(Tally& t, const ValidationOptions& o) {
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double xi : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
      const FiberParams fp{1.0, gamma, xi};
      const Grid g = grid_for(fp, 3, o.solve);
      const DiracBranches d = dirac_branches(fp, g, 3);
      for (int n = 1; n <= 3; ++n) {
        const double tp = theta_at(plus(n), gamma, xi, o);
        const double tm = theta_at(minus(n), gamma, xi, o);
        t.within((tp - d.plus[n - 1]) / (1.0 + tp), kCrossTol, point_label(plus(n), gamma, xi));
        t.within((tm - d.minus[n - 1]) / (1.0 + tm), kCrossTol, point_label(minus(n), gamma, xi));
      }
    }
  }
}

// 5. Closed-form derivatives against finite differences and Feynman-Hellmann.
void derivatives(Tally& t, const ValidationOptions& o) {
  const Grid g = grid_for({1.0, 1.0, -1.0}, 3, o.solve);
  for (FormSign sign : {FormSign::plus, FormSign::minus}) {
    const char* s = sign == FormSign::plus ? "+" : "-";
    for (double alpha : {0.5, 1.0, 2.0}) {
      for (double xi : {-1.0, 0.0, 1.0}) {
        for (int n = 1; n <= 2; ++n) {
          const RobinFiberParams p{sign, 1.0, alpha, xi};
          const EigenPair e = nu(p, n, g);
          auto at = [&](double a, double x) { return nu({sign, 1.0, a, x}, n, g, &e).nu; };
          const double fd_alpha =
              (at(alpha + kPartialStep, xi) - at(alpha - kPartialStep, xi)) / (2 * kPartialStep);
          const double fd_xi =
              (at(alpha, xi + kPartialStep) - at(alpha, xi - kPartialStep)) / (2 * kPartialStep);
          const std::string label = std::string("nu") + s + std::to_string(n) + " alpha=" +
                                    fmt(alpha) + " xi=" + fmt(xi);
          t.within(nu_partial_alpha(e) - fd_alpha, kPartialTol, label + " d/dalpha");
          t.within(nu_partial_xi(e) - fd_xi, kPartialTol, label + " d/dxi");
        }
      }
    }
  }

  int skipped = 0;
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double xi : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      for (const Branch& br : branches_up_to(2)) {
        const FiberParams fp{1.0, gamma, xi};
        const BranchPoint mid = evaluate_branch(br, fp, o.solve);
        const BranchPoint lo = evaluate_branch(br, {1.0, gamma, xi - kSlopeStep}, o.solve);
        const BranchPoint hi = evaluate_branch(br, {1.0, gamma, xi + kSlopeStep}, o.solve);
        if (std::min({lo.theta, mid.theta, hi.theta}) < kResolvedTheta) {
          ++skipped;
          continue;
        }
        const double fd = (hi.lambda - lo.lambda) / (2 * kSlopeStep);
        t.within(mid.slope - fd, kSlopeTol, point_label(br, gamma, xi) + " slope");
      }
    }
  }
  if (skipped > 0) t.note(std::to_string(skipped) + " unresolved slope points skipped");

  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double xi : {-1.0, 0.0, 1.0}) {
      for (int n = 1; n <= 2; ++n) {
        const FiberParams fp{1.0, gamma, xi};
        const Grid gn = grid_for(fp, n, o.solve);
        const ThetaSolution sol = solve_theta(plus(n), fp, gn);
        if (sol.pair && sol.theta > kResolvedTheta) {
          const Spinor s = reconstruct_spinor(*sol.pair, sol.theta, fp, gn);
          t.within(feynman_hellmann_velocity(s) - sol.theta_slope, kVelocityTol,
                   point_label(plus(n), gamma, xi) + " reconstructed velocity");
        }
        const BranchPoint m = evaluate_branch(minus(n), fp, o.solve);
        const Spinor sm = dirac_spinor(fp, gn, m.lambda);
        t.within(feynman_hellmann_velocity(sm) - m.slope, kVelocityTol,
                 point_label(minus(n), gamma, xi) + " Dirac velocity");
      }
    }
  }
}

// 6. Minimum of theta-_1 and the critical-point relation.
void critical_points(Tally& t, const ValidationOptions& o) {
  const SweepOptions so{o.solve, o.workers};
  for (double gamma : {0.5, 1.0, 2.0}) {
    const std::string tag = "gamma=" + fmt_gamma(gamma);
    const auto curve = sweep(gamma, 1.0, -8.0, 4.0, 121, {minus(1)}, so).front();
    int changes = 0;
    for (std::size_t i = 1; i < curve.slopes.size(); ++i) {
      if ((curve.slopes[i - 1] > 0.0) != (curve.slopes[i] > 0.0)) ++changes;
    }
    t.require(changes == 1, tag + " slope sign changes " + std::to_string(changes));

    const CriticalPoint cp = critical_point(gamma, 1.0, 1, o.solve);
    t.within(cp.theta + 2.0 * gamma * cp.xi / (gamma * gamma + 1.0), kRelationTol,
             tag + " critical relation");
    if (gamma == 1.0) {
      t.require(cp.theta > 0.0 && cp.theta < std::sqrt(2.0),
                "a0 = " + fmt(cp.theta) + " outside (0, sqrt 2)");
      t.note("a0 = " + format_number(cp.theta) + " at xi = " + format_number(cp.xi));
    }
    const double d = kSecondDiffStep;
    const double second = (theta_at(minus(1), gamma, cp.xi + d, o) - 2.0 * cp.theta +
                           theta_at(minus(1), gamma, cp.xi - d, o)) /
                          (d * d);
    t.require(second > 0.0, tag + " second difference " + fmt(second));

    const FiberParams fp{1.0, gamma, cp.xi};
    const Spinor s = dirac_spinor(fp, grid_for(fp, 1, o.solve), -cp.theta);
    t.within(feynman_hellmann_velocity(s), kVelocityTol, tag + " velocity at minimum");
  }
}

// 7. Monotonicity in xi and gamma, and the gap profile.
void monotonicity(Tally& t, const ValidationOptions& o) {
  const SweepOptions so{o.solve, o.workers};
  const auto curves = sweep(1.0, 1.0, -6.0, 4.0, 101, {plus(1), plus(2), plus(3)}, so);
  for (const auto& c : curves) {
    bool increasing = true;
    bool slopes_positive = true;
    for (std::size_t i = 1; i < c.lambdas.size(); ++i) {
      // Strict increase is asserted where the expected step is resolvable.
      const double step = c.xis[i] - c.xis[i - 1];
      const bool resolved = c.lambdas[i - 1] > kResolvedTheta &&
                            std::min(c.slopes[i - 1], c.slopes[i]) * step > kThetaResolution;
      if (resolved ? !(c.lambdas[i] > c.lambdas[i - 1])
                   : c.lambdas[i] < c.lambdas[i - 1] - kThetaResolution) {
        increasing = false;
      }
    }
    for (std::size_t i = 0; i < c.slopes.size(); ++i) {
      if (c.lambdas[i] > kResolvedTheta && !(c.slopes[i] > 0.0)) slopes_positive = false;
    }
    t.require(increasing, c.branch.label() + " not increasing in xi");
    t.require(slopes_positive, c.branch.label() + " slope not positive");
  }
  for (std::size_t k = 1; k < curves.size(); ++k) {
    bool ordered = true;
    for (std::size_t i = 0; i < curves[k].lambdas.size(); ++i) {
      if (!(curves[k].lambdas[i] > curves[k - 1].lambdas[i])) ordered = false;
    }
    t.require(ordered, curves[k].branch.label() + " not above " + curves[k - 1].branch.label());
  }

  const std::vector<double> gammas{0.1, 0.5, 1.0, 2.0, 10.0};
  for (double xi : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
    for (int n = 1; n <= 3; ++n) {
      for (std::size_t k = 1; k < gammas.size(); ++k) {
        const double p0 = theta_at(plus(n), gammas[k - 1], xi, o);
        const double p1 = theta_at(plus(n), gammas[k], xi, o);
        const double m0 = theta_at(minus(n), gammas[k - 1], xi, o);
        const double m1 = theta_at(minus(n), gammas[k], xi, o);
        const std::string span = " xi=" + fmt(xi) + " gamma " + fmt_gamma(gammas[k - 1]) +
                                 "->" + fmt_gamma(gammas[k]);
        const bool resolved = p0 > kResolvedTheta;
        t.require(resolved ? p1 > p0 : p1 >= p0, plus(n).label() + span + " not increasing");
        t.require(m1 < m0, minus(n).label() + span + " not decreasing");
      }
    }
  }

  GapOptions go;
  go.solve = o.solve;
  go.workers = o.workers;
  const std::vector<double> profile_gammas{0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, kInf};
  const auto profile = gap_profile(1.0, profile_gammas, go);
  for (std::size_t k = 1; k < profile.size(); ++k) {
    t.require(profile[k].max_negative_energy > profile[k - 1].max_negative_energy,
              "gap profile not increasing at gamma=" + fmt_gamma(profile[k].gamma));
  }
  t.within(profile.front().max_negative_energy + std::sqrt(2.0), kGapEndpointTol,
           "gap profile gamma=0 endpoint");
  const double at_one = profile[4].max_negative_energy;
  t.require(at_one > -std::sqrt(2.0) && at_one < 0.0, "gap at gamma=1 outside (-sqrt 2, 0)");
}

long expected_conductance(double gamma, std::size_t levels) {
  const long n = static_cast<long>(levels);
  if (gamma == 0.0) return n - 1;
  if (std::isinf(gamma)) return n + 1;
  return n;
}

// 8. Conductance table, spectral-flow integral and sign rule.
void conductance_table(Tally& t, const ValidationOptions& o) {
  const std::vector<std::vector<int>> windows{{0}, {0, 1}, {-1, 0, 1}};
  auto cache = std::make_shared<SampleCache>();
  IntegralOptions io;
  io.sweep = {o.solve, o.workers};
  io.cache = cache;
  double worst_stability = 0.0;

  for (double gamma : {0.0, 0.3, 1.0, 3.0, kInf}) {
    for (const auto& sel : windows) {
      const std::string tag = "gamma=" + fmt_gamma(gamma) + " levels=" +
                              std::to_string(sel.size());
      const LevelWindow w{1.0, sel, default_delta(1.0, sel)};
      const ConductanceReport r = conductance_by_integral(gamma, 1.0, w, io);
      const long expected = expected_conductance(gamma, sel.size());
      t.require(r.integer_value == expected, tag + " integer " + std::to_string(r.integer_value) +
                                                 " != " + std::to_string(expected));
      t.within(*r.integral_value - static_cast<double>(expected), kIntegralTol,
               tag + " integral");

      const LevelWindow half{1.0, sel, 0.5 * w.delta};
      const ConductanceReport rh = conductance_by_integral(gamma, 1.0, half, io);
      t.require(rh.integer_value == r.integer_value, tag + " integer changes with delta/2");
      const double dh = *rh.integral_value - *r.integral_value;

      IntegralOptions wide = io;
      wide.xi_half_width = 1.5 * r.xi_half_width;
      const ConductanceReport rw = conductance_by_integral(gamma, 1.0, w, wide);
      const double dw = *rw.integral_value - *r.integral_value;
      t.within(dh, kIntegralTol, tag + " delta/2 stability");
      t.within(dw, kIntegralTol, tag + " 1.5 Xi stability");
      worst_stability = std::max({worst_stability, std::abs(dh), std::abs(dw)});
    }
  }
  t.note("max stability shift " + fmt(worst_stability));

  for (double gamma : {0.0, 1.0, kInf}) {
    const double inverse = gamma == 0.0 ? kInf : (std::isinf(gamma) ? 0.0 : 1.0 / gamma);
    for (const auto& sel : windows) {
      std::vector<int> mirrored;
      for (int k : sel) mirrored.push_back(-k);
      std::sort(mirrored.begin(), mirrored.end());
      const std::string tag = "b=-1 gamma=" + fmt_gamma(gamma) + " levels=" +
                              std::to_string(sel.size());
      const LevelWindow w{-1.0, sel, default_delta(-1.0, sel)};
      const LevelWindow wm{1.0, mirrored, default_delta(1.0, mirrored)};
      const ConductanceReport r = conductance_by_integral(gamma, -1.0, w, io);
      const long rhs = -conductance_by_limits(inverse, 1.0, wm).integer_value;
      const long expected = -expected_conductance(inverse, sel.size());
      t.require(r.integer_value == rhs && rhs == expected,
                tag + " integer " + std::to_string(r.integer_value) + " != " +
                    std::to_string(expected));
      t.within(*r.integral_value - static_cast<double>(expected), kIntegralTol,
               tag + " integral");
    }
  }
}

// 9. Symmetry round trips and the zero-mode dichotomy.
void symmetry(Tally& t, const ValidationOptions& o) {
  const std::vector<FiberParams> cases{
      {-1.0, 2.0, 0.3},  {-1.0, 0.5, -1.0}, {-1.0, 0.0, 1.0},   {-1.0, kInf, 0.0},
      {1.0, -2.0, 0.3},  {1.0, -0.5, -1.0}, {-1.0, -2.0, 0.3}, {2.0, -1.0, 0.5},
      {-2.0, 3.0, -0.5},
  };
  for (const FiberParams& fp : cases) {
    const SymmetryPoint p = symmetry_point(fp, 6, o.solve);
    const std::string tag = "b=" + fmt(fp.b) + " gamma=" + fmt_gamma(fp.gamma) + " xi=" + fmt(fp.xi);
    t.within(p.deviation, kSymmetryTol, tag + " Dirac spectrum");
    t.within(p.fixed_point_deviation, kCrossTol, tag + " fixed point vs direct Dirac");
  }

  for (double gamma : {0.0, 0.5, 1.0, 2.0, kInf}) {
    for (double xi : {-2.0, 0.0, 2.0}) {
      const FiberParams fp{1.0, gamma, xi};
      const auto w = dirac_spectrum_window(fp, grid_for(fp, 3, o.solve), 1);
      const double smallest = std::abs(w.front());
      const std::string tag = "gamma=" + fmt_gamma(gamma) + " xi=" + fmt(xi);
      if (gamma == 0.0) {
        t.within(smallest, kZeroModeTol, tag + " zero mode");
      } else if (xi == -2.0) {
        t.require(smallest > kZeroModeTol, tag + " spurious zero mode");
      } else {
        t.require(smallest >= kGapMargin, tag + " margin " + fmt(smallest) + " < 0.3");
      }
    }
  }
}

// 10. Byte-identical outputs across worker counts.
void determinism(Tally& t, const ValidationOptions& o) {
  struct Config {
    double gamma;
    double b;
  };
  for (const Config c : {Config{1.0, 1.0}, Config{-2.0, -1.0}, Config{0.0, 1.0}}) {
    std::string csv_ref;
    std::string json_ref;
    for (int workers : {1, 4, 8}) {
      const auto curves =
          sweep(c.gamma, c.b, -6.0, 4.0, 41, branches_up_to(2), SweepOptions{o.solve, workers});
      const std::string csv = curves_to_csv(curves);
      const std::string json = curves_to_json(curves).dump(2);
      const std::string tag = "sweep gamma=" + fmt_gamma(c.gamma) + " b=" + fmt(c.b) +
                              " workers=" + std::to_string(workers);
      if (workers == 1) {
        csv_ref = csv;
        json_ref = json;
      } else {
        t.require(csv == csv_ref, tag + " CSV differs");
        t.require(json == json_ref, tag + " JSON differs");
      }
    }
  }
  std::string report_ref;
  for (int workers : {1, 4, 8}) {
    IntegralOptions io;
    io.sweep = {o.solve, workers};
    const LevelWindow w{1.0, {0}, default_delta(1.0, {0})};
    const std::string json = report_to_json(conductance_by_integral(kInf, 1.0, w, io)).dump(2);
    if (workers == 1) {
      report_ref = json;
    } else {
      t.require(json == report_ref, "conductance JSON differs at workers=" + std::to_string(workers));
    }
  }
}

}  // namespace

SymmetryPoint symmetry_point(const FiberParams& fp, int k, const SolveOptions& solve) {
  SymmetryPoint p;
  p.params = fp;
  p.canonical = canonicalize(fp);
  const Grid g = grid_for(p.canonical.params, 3, solve);
  p.direct = dirac_spectrum_window(fp, g, k);
  auto mapped_window = [&](int count) {
    std::vector<double> w = dirac_spectrum_window(p.canonical.params, g, count);
    for (auto& v : w) v *= p.canonical.transform.energy_factor();
    std::sort(w.begin(), w.end());
    return w;
  };
  p.mapped = mapped_window(k);
  // Eigenvalues tied in |lambda| make the k-window ambiguous, so each side is
  // matched against a wider window of the other.
  const std::vector<double> direct_wide = dirac_spectrum_window(fp, g, k + 2);
  const std::vector<double> mapped_wide = mapped_window(k + 2);
  auto nearest = [](double v, const std::vector<double>& w) {
    double best = kInf;
    for (double e : w) best = std::min(best, std::abs(e - v));
    return best;
  };
  for (double v : p.direct) p.deviation = std::max(p.deviation, nearest(v, mapped_wide));
  for (double v : p.mapped) p.deviation = std::max(p.deviation, nearest(v, direct_wide));

  const std::vector<double> wide = dirac_spectrum_window(fp, g, 8);
  for (const Branch& br : branches_up_to(3)) {
    const double lam = evaluate_branch(br, fp, solve).lambda;
    p.fixed_point_deviation =
        std::max(p.fixed_point_deviation, nearest(lam, wide) / (1.0 + std::abs(lam)));
  }
  return p;
}

std::string criterion_name(int id) {
  switch (id) {
    case 1: return "odd-Hermite oracle";
    case 2: return "Landau limits";
    case 3: return "zigzag closed forms";
    case 4: return "cross-oracle agreement";
    case 5: return "derivative identities";
    case 6: return "critical point";
    case 7: return "monotonicity";
    case 8: return "conductance table";
    case 9: return "symmetry";
    case 10: return "determinism";
    default: return "unknown";
  }
}

CriterionResult run_criterion(int id, const ValidationOptions& opts) {
  CriterionResult r;
  r.id = id;
  r.name = criterion_name(id);
  const auto start = std::chrono::steady_clock::now();
  Tally t;
  try {
    switch (id) {
      case 1: odd_hermite(t, opts); break;
      case 2: landau_limits(t, opts); break;
      case 3: zigzag_forms(t, opts); break;
      case 4: cross_oracle(t, opts); break;
      case 5: derivatives(t, opts); break;
      case 6: critical_points(t, opts); break;
      case 7: monotonicity(t, opts); break;
      case 8: conductance_table(t, opts); break;
      case 9: symmetry(t, opts); break;
      case 10: determinism(t, opts); break;
      default: t.require(false, "no criterion " + std::to_string(id));
    }
    t.fill(r);
  } catch (const std::exception& e) {
    t.fill(r);
    r.pass = false;
    ++r.failures;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_validation(
    const ValidationOptions& opts, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> ids = opts.only;
  if (ids.empty()) {
    for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
  }
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, opts));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %-24s [%d checks, %.1f s]", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.checks, r.seconds);
  std::string line = head;
  if (!r.detail.empty()) line += " " + r.detail;
  return line;
}

}  // namespace hallfiber::cli
