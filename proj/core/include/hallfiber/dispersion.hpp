#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hallfiber/errors.hpp"
#include "hallfiber/fiber_schrodinger.hpp"
#include "hallfiber/spectral_core.hpp"

namespace hallfiber {

/// One fiber problem D_{gamma,xi}(b). gamma may be +-infinity.
struct FiberParams {
  double b = 1.0;
  double gamma = 1.0;
  double xi = 0.0;
};

enum class BranchSign { plus, minus };

/// Signed branch label (+-, n). lambda_j = theta+_j for j >= 1 and
/// lambda_j = -theta-_{|j|} for j <= -1.
struct Branch {
  BranchSign sign = BranchSign::plus;
  int n = 1;

  /// "+n" or "-n".
  [[nodiscard]] std::string label() const;
  /// Parses "+n", "-n" or a bare "n" (positive). Throws DomainError.
  static Branch parse(const std::string& text);
  /// +1 or -1.
  [[nodiscard]] double sign_factor() const { return sign == BranchSign::plus ? 1.0 : -1.0; }
  [[nodiscard]] Branch flipped() const {
    return {sign == BranchSign::plus ? BranchSign::minus : BranchSign::plus, n};
  }
  friend bool operator==(const Branch&, const Branch&) = default;
};

/// Branches +1..+n_max followed by -1..-n_max.
std::vector<Branch> branches_up_to(int n_max);

/// Records how a requested problem relates to its canonical form (b > 0,
/// gamma in [0, +inf]). The requested spectrum is the canonical spectrum,
/// negated if negate_spectrum, evaluated at -xi if reflect_xi.
struct SymmetryTransform {
  bool negate_spectrum = false;
  bool reflect_xi = false;
  bool invert_gamma = false;
  /// Requested branch (s, n) is canonical branch (-s, n).
  bool flip_branch_sign = false;

  [[nodiscard]] bool is_identity() const {
    return !negate_spectrum && !reflect_xi && !invert_gamma && !flip_branch_sign;
  }
  [[nodiscard]] double xi_factor() const { return reflect_xi ? -1.0 : 1.0; }
  [[nodiscard]] double energy_factor() const { return negate_spectrum ? -1.0 : 1.0; }
  /// Canonical branch carrying the requested branch.
  [[nodiscard]] Branch canonical_branch(const Branch& requested) const {
    return flip_branch_sign ? requested.flipped() : requested;
  }
};

struct CanonicalProblem {
  FiberParams params;
  SymmetryTransform transform;
};

/// gamma = cos(eta) / (1 + sin(eta)) for eta in [-pi/2, 3pi/2); eta = -pi/2
/// gives +inf. Throws DomainError outside that range.
double gamma_from_eta(double eta);

/// Maps (b, gamma, xi) to b > 0, gamma in [0, +inf]. Throws DomainError for
/// b == 0 or non-finite b, xi, or NaN gamma.
CanonicalProblem canonicalize(const FiberParams& fp);

/// Canonical gamma at or below this is treated as the zigzag gamma = 0, at or
/// above kZigzagInfinity as gamma = +inf.
constexpr double kZigzagZero = 1e-12;
constexpr double kZigzagInfinity = 1e12;

enum class GammaKind { zero, finite, infinite };
GammaKind classify_gamma(double canonical_gamma);

/// Grid spacing override; 0 selects default_spacing(b).
struct SolveOptions {
  double spacing = 0.0;
};

/// Grid used for branch n of the canonical problem fp.
Grid grid_for(const FiberParams& canonical, int n, const SolveOptions& opts = {});

/// theta for one canonical branch together with the eigenpair it came from.
struct ThetaSolution {
  double theta = 0.0;
  /// d theta / d xi of the magnitude (not of lambda).
  double theta_slope = 0.0;
  /// Robin eigenpair at alpha = c * theta, or the Dirichlet pair for zigzag
  /// branches. Empty for the flat gamma = 0 band and for unresolved roots.
  std::optional<EigenPair> pair;
  /// c = gamma (sign +) or 1/gamma (sign -); 0 for zigzag.
  double robin_scale = 0.0;
  int iterations = 0;
};

/// Magnitude theta of branch br for canonical fp. Requires b > 0 and
/// gamma in [0, +inf].
ThetaSolution solve_theta(const Branch& br, const FiberParams& fp, const Grid& g);
double theta(const Branch& br, const FiberParams& fp, const Grid& g);

/// lambda'(xi) of the branch at a fixed-point solution, from the closed-form
/// eigenvalue derivatives. Negative for the - branch where theta increases.
/// Throws InvariantViolation if c * d_alpha nu - 2 theta >= 0.
double curve_slope(const Branch& br, const FiberParams& fp, double theta, const EigenPair& e);

/// Value of one requested branch at one requested (b, gamma, xi).
struct BranchPoint {
  double theta = 0.0;
  /// Signed energy lambda_j.
  double lambda = 0.0;
  /// d lambda_j / d xi.
  double slope = 0.0;
};

BranchPoint evaluate_branch(const Branch& br, const FiberParams& fp, const SolveOptions& opts = {});

/// lim_{xi -> -inf} lambda of a canonical branch (signed).
double asymptotic_limit(const Branch& br, double canonical_gamma, double b);

/// lim_{xi -> +inf} lambda of a canonical branch: +-inf, or 0 for the flat band.
double asymptotic_limit_plus(const Branch& br, double canonical_gamma, double b);

/// A branch sampled over momenta, in the requested frame.
struct DispersionCurve {
  Branch branch;
  double gamma = 1.0;
  double b = 1.0;
  std::vector<double> xis;
  /// Signed energies lambda_j(xi).
  std::vector<double> lambdas;
  /// d lambda_j / d xi from the closed-form slope.
  std::vector<double> slopes;
  /// lim_{xi -> -inf} lambda_j.
  double limit_minus_inf = 0.0;
  SymmetryTransform transform;
};

/// Solver failure inside a sweep, tagged with the sample that failed.
class SweepError : public Error {
 public:
  SweepError(const std::string& what, Branch branch, double xi)
      : Error(what), branch_(branch), xi_(xi) {}
  [[nodiscard]] const Branch& branch() const { return branch_; }
  [[nodiscard]] double xi() const { return xi_; }

 private:
  Branch branch_;
  double xi_;
};

/// `steps` equally spaced momenta from xi_min to xi_max inclusive.
std::vector<double> xi_samples(double xi_min, double xi_max, int steps);

struct SweepOptions {
  SolveOptions solve;
  int workers = 1;
};

/// One curve per requested branch, in the order given. Output is independent
/// of the worker count.
std::vector<DispersionCurve> sweep(double gamma, double b, const std::vector<double>& xis,
                                   const std::vector<Branch>& branches,
                                   const SweepOptions& opts = {});

std::vector<DispersionCurve> sweep(double gamma, double b, double xi_min, double xi_max, int steps,
                                   const std::vector<Branch>& branches,
                                   const SweepOptions& opts = {});

struct CriticalPoint {
  double xi = 0.0;
  double theta = 0.0;
  /// d theta / d xi at xi; |slope| <= 1e-8 unless the bracket collapsed first.
  double slope = 0.0;
};

/// Minimizer of theta-_n(gamma, .) for canonical b > 0 and finite gamma > 0.
/// Throws BracketError if no slope sign change is found for |xi| <= 20 sqrt(b),
/// or if the slope left of the minimizer is below 1e-12 (small gamma, where
/// theta- equals sqrt(2b) to double precision).
CriticalPoint critical_point(double gamma, double b, int n, const SolveOptions& opts = {});

struct GapEntry {
  double gamma = 0.0;
  /// -min_xi theta-_1 over the window.
  double max_negative_energy = 0.0;
  /// Where the minimum is attained.
  double xi = 0.0;
};

struct GapOptions {
  double xi_min = -8.0;
  double xi_max = 4.0;
  /// Samples used when the critical point is not available.
  int steps = 121;
  SolveOptions solve;
  int workers = 1;
};

/// Maximal negative energy -min theta-_1(gamma, .) per gamma (canonical
/// b > 0; gamma in [0, +inf]).
std::vector<GapEntry> gap_profile(double b, const std::vector<double>& gammas,
                                  const GapOptions& opts = {});

}  // namespace hallfiber
