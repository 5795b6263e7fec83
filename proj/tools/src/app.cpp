#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hallfiber/conductance.hpp"
#include "hallfiber/dispersion.hpp"
#include "hallfiber/errors.hpp"
#include "hallfiber/parallel.hpp"
#include "output.hpp"
#include "validation.hpp"

namespace hallfiber::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuantizationTol = 1e-2;
constexpr double kSymmetryTol = 1e-6;
constexpr double kFixedPointTol = 1e-3;

/// Invalid flag value; reported with exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  double b = 1.0;
  std::string gamma;
  std::string eta;
  std::string xi;
  std::string branches;
  std::optional<int> workers;
  std::string out = "-";
  /// Empty selects the command's default format.
  std::string format;
  std::string svg;
  double spacing = 0.0;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double number(const std::string& text, const std::string& flag) {
  try {
    return parse_number(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(flag + ": '" + text + "' is not a number");
  }
}

int integer(const std::string& text, const std::string& flag) {
  const double v = number(text, flag);
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1e6) {
    throw UsageError(flag + ": '" + text + "' is not an integer");
  }
  return static_cast<int>(v);
}

/// "min:max:steps", or "min:max:steps:log" for geometric spacing.
std::vector<double> parse_range(const std::string& text, const std::string& flag) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 && !(parts.size() == 4 && parts[3] == "log")) {
    throw UsageError(flag + ": expected min:max:steps, got '" + text + "'");
  }
  const double lo = number(parts[0], flag);
  const double hi = number(parts[1], flag);
  const int steps = integer(parts[2], flag);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw UsageError(flag + ": range needs finite min < max, got '" + text + "'");
  }
  if (steps < 2) throw UsageError(flag + ": range needs at least 2 steps");
  if (parts.size() == 3) return xi_samples(lo, hi, steps);
  if (!(lo > 0.0)) throw UsageError(flag + ": log range needs min > 0");
  std::vector<double> out = xi_samples(std::log(lo), std::log(hi), steps);
  for (auto& v : out) v = std::exp(v);
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// A single number or a range.
std::vector<double> parse_values(const std::string& text, const std::string& flag) {
  if (text.find(':') != std::string::npos) return parse_range(text, flag);
  return {number(text, flag)};
}

/// Comma-separated numbers and ranges.
std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw UsageError(flag + ": empty list entry in '" + text + "'");
    const auto vals = parse_values(part, flag);
    out.insert(out.end(), vals.begin(), vals.end());
  }
  return out;
}

/// Values of --gamma or --eta; exactly one of them must be given.
std::vector<double> gammas_of(const Common& c, bool allow_list) {
  if (c.gamma.empty() == c.eta.empty()) {
    throw UsageError("exactly one of --gamma and --eta is required");
  }
  std::vector<double> out;
  if (!c.gamma.empty()) {
    out = parse_list(c.gamma, "--gamma");
  } else {
    for (double eta : parse_list(c.eta, "--eta")) {
      try {
        out.push_back(gamma_from_eta(eta));
      } catch (const DomainError& e) {
        throw UsageError(std::string("--eta: ") + e.what());
      }
    }
  }
  for (double g : out) {
    if (std::isnan(g)) throw UsageError("--gamma: NaN is not allowed");
  }
  if (!allow_list && out.size() != 1) throw UsageError("--gamma: exactly one value expected");
  return out;
}

double field_of(const Common& c) {
  if (!std::isfinite(c.b) || c.b == 0.0) throw UsageError("--b: must be finite and nonzero");
  return c.b;
}

std::vector<Branch> branches_of(const Common& c, int default_max) {
  if (c.branches.empty()) return branches_up_to(default_max);
  std::vector<Branch> out;
  for (const auto& part : split(c.branches, ',')) {
    try {
      out.push_back(Branch::parse(part));
    } catch (const DomainError& e) {
      throw UsageError(std::string("--branches: ") + e.what());
    }
  }
  return out;
}

std::vector<int> levels_of(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) out.push_back(integer(part, "--levels"));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw UsageError("--levels: at least one level is required");
  return out;
}

SweepOptions sweep_options(const Common& c) {
  if (c.spacing < 0.0 || !std::isfinite(c.spacing)) throw UsageError("--spacing: must be > 0");
  if (c.workers && *c.workers < 1) throw UsageError("--workers: must be >= 1");
  return {SolveOptions{c.spacing}, resolve_workers(c.workers)};
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  write_text(path, text);
}

std::string prefix_column(const std::string& csv, const std::string& name,
                          const std::string& value) {
  std::istringstream in(csv);
  std::string line;
  std::string out;
  bool header = true;
  while (std::getline(in, line)) {
    out += (header ? name : value) + "," + line + "\n";
    header = false;
  }
  return out;
}

std::string title_of(const std::string& what, double b, const std::vector<double>& gammas) {
  std::string t = what + " b=" + format_number(b);
  if (gammas.size() == 1) t += " gamma=" + format_number(gammas.front());
  return t;
}

/// Applies the command's default format.
Common with_format(Common c, const std::string& fallback) {
  if (c.format.empty()) c.format = fallback;
  if (c.format != "csv" && c.format != "json") throw UsageError("--format: csv or json expected");
  return c;
}

// dispersion / zigzag ------------------------------------------------------

int write_curves(const Common& c, const std::vector<DispersionCurve>& curves, bool with_gamma,
                 const std::string& title, std::ostream& out) {
  const std::string data =
      c.format == "json" ? curves_to_json(curves).dump(2) + "\n" : curves_to_csv(curves, with_gamma);
  emit(c.out, data, out);
  if (!c.svg.empty()) write_text(c.svg, render_svg(curves_plot(curves, title)));
  return kExitOk;
}

std::vector<double> xis_of(const Common& c, const std::string& fallback) {
  return parse_values(c.xi.empty() ? fallback : c.xi, "--xi");
}

int cmd_dispersion(const Common& in, std::ostream& out) {
  const Common c = with_format(in, "csv");
  const double b = field_of(c);
  const auto gammas = gammas_of(c, true);
  const auto xis = xis_of(c, "-6:4:201");
  const auto branches = branches_of(c, 3);
  const SweepOptions so = sweep_options(c);
  std::vector<DispersionCurve> curves;
  for (double g : gammas) {
    auto part = sweep(g, b, xis, branches, so);
    curves.insert(curves.end(), part.begin(), part.end());
  }
  return write_curves(c, curves, gammas.size() > 1, title_of("dispersion", b, gammas), out);
}

int cmd_zigzag(const Common& in, std::ostream& out) {
  const Common c = with_format(in, "csv");
  const double b = field_of(c);
  const auto xis = xis_of(c, "-6:4:201");
  const auto branches = branches_of(c, 3);
  const SweepOptions so = sweep_options(c);
  std::vector<DispersionCurve> curves;
  for (double g : {0.0, kInf}) {
    auto part = sweep(g, b, xis, branches, so);
    curves.insert(curves.end(), part.begin(), part.end());
  }
  return write_curves(c, curves, true, "zigzag b=" + format_number(b), out);
}

// gap-profile / critical-point --------------------------------------------

void require_canonical_field(double b) {
  if (!(b > 0.0)) throw UsageError("--b: this command expects b > 0");
}

int cmd_gap_profile(const Common& in, std::ostream& out) {
  const Common c = with_format(in, "csv");
  const double b = field_of(c);
  require_canonical_field(b);
  Common g = c;
  if (g.gamma.empty() && g.eta.empty()) g.gamma = "0:5:51";
  const auto gammas = gammas_of(g, true);
  for (double v : gammas) {
    if (v < 0.0) throw UsageError("--gamma: gap profile expects gamma >= 0");
  }
  const auto window = parse_range(c.xi.empty() ? "-8:4:121" : c.xi, "--xi");
  const SweepOptions so = sweep_options(c);
  GapOptions opts;
  opts.xi_min = window.front();
  opts.xi_max = window.back();
  opts.steps = static_cast<int>(window.size());
  opts.solve = so.solve;
  opts.workers = so.workers;
  const auto entries = gap_profile(b, gammas, opts);

  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
      arr.push_back({{"gamma", number_to_json(e.gamma)},
                     {"max_negative_energy", number_to_json(e.max_negative_energy)},
                     {"xi", number_to_json(e.xi)}});
    }
    emit(c.out, nlohmann::json{{"b", number_to_json(b)}, {"entries", arr}}.dump(2) + "\n", out);
  } else {
    std::string csv = "gamma,max_negative_energy,xi\n";
    for (const auto& e : entries) {
      csv += format_number(e.gamma) + "," + format_number(e.max_negative_energy) + "," +
             format_number(e.xi) + "\n";
    }
    emit(c.out, csv, out);
  }
  if (!c.svg.empty()) {
    Plot p;
    p.title = "maximal negative energy b=" + format_number(b);
    p.x_label = "gamma";
    p.y_label = "max negative energy";
    Series s;
    s.label = "-min theta-_1";
    for (const auto& e : entries) {
      s.x.push_back(e.gamma);
      s.y.push_back(e.max_negative_energy);
    }
    p.series.push_back(std::move(s));
    p.reference_levels = {-std::sqrt(2.0 * b), 0.0};
    write_text(c.svg, render_svg(p));
  }
  return kExitOk;
}

int cmd_critical_point(const Common& in, int n, std::ostream& out, std::ostream& err) {
  const Common c = with_format(in, "csv");
  const double b = field_of(c);
  require_canonical_field(b);
  if (n < 1) throw UsageError("--n: must be >= 1");
  const auto all_gammas = gammas_of(c, true);
  for (double g : all_gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw UsageError("--gamma: critical points need finite gamma > 0");
    }
  }
  const SweepOptions so = sweep_options(c);
  std::vector<std::optional<CriticalPoint>> found(all_gammas.size());
  std::vector<std::string> unresolved(all_gammas.size());
  parallel_for(all_gammas.size(), so.workers, [&](std::size_t i) {
    try {
      found[i] = critical_point(all_gammas[i], b, n, so.solve);
    } catch (const BracketError& e) {
      unresolved[i] = e.what();
    }
  });
  std::vector<double> gammas;
  std::vector<CriticalPoint> points;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i]) {
      gammas.push_back(all_gammas[i]);
      points.push_back(*found[i]);
    } else {
      err << "skipping gamma = " << format_number(all_gammas[i]) << ": " << unresolved[i] << "\n";
    }
  }

  auto residual = [&](std::size_t i) {
    const double g = gammas[i];
    return points[i].theta + 2.0 * g * points[i].xi / (g * g + 1.0);
  };
  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      arr.push_back({{"gamma", number_to_json(gammas[i])},
                     {"xi", number_to_json(points[i].xi)},
                     {"theta", number_to_json(points[i].theta)},
                     {"slope", number_to_json(points[i].slope)},
                     {"relation_residual", number_to_json(residual(i))}});
    }
    emit(c.out,
         nlohmann::json{{"b", number_to_json(b)}, {"n", n}, {"points", arr}}.dump(2) + "\n", out);
  } else {
    std::string csv = "gamma,xi,theta,slope,relation_residual\n";
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      csv += format_number(gammas[i]) + "," + format_number(points[i].xi) + "," +
             format_number(points[i].theta) + "," + format_number(points[i].slope) + "," +
             format_number(residual(i)) + "\n";
    }
    emit(c.out, csv, out);
  }
  if (!c.svg.empty()) {
    Plot p;
    p.title = "minimum of theta-_" + std::to_string(n) + " b=" + format_number(b);
    p.x_label = "gamma";
    p.y_label = "xi / theta";
    Series loc{"xi*", gammas, {}};
    Series val{"theta*", gammas, {}};
    for (const auto& pt : points) {
      loc.y.push_back(pt.xi);
      val.y.push_back(pt.theta);
    }
    p.series = {std::move(loc), std::move(val)};
    write_text(c.svg, render_svg(p));
  }
  return kExitOk;
}

// conductance ---------------------------------------------------------------

struct ConductanceFlags {
  std::string levels = "0";
  double delta = 0.0;
  double xi_half_width = 0.0;
  double xi_step = 0.05;
  int j_max = 0;
  bool limits_only = false;
};

int cmd_conductance(const Common& in, const ConductanceFlags& f, std::ostream& out,
                    std::ostream& err) {
  const Common c = with_format(in, "json");
  const double b = field_of(c);
  const double gamma = gammas_of(c, false).front();
  const auto levels = levels_of(f.levels);
  if (f.delta < 0.0) throw UsageError("--delta: must be > 0");
  if (f.xi_half_width < 0.0) throw UsageError("--xi-half-width: must be > 0");
  if (!(f.xi_step > 0.0)) throw UsageError("--xi-step: must be > 0");
  if (f.j_max < 0) throw UsageError("--jmax: must be >= 1");
  const LevelWindow w{b, levels, f.delta > 0.0 ? f.delta : default_delta(b, levels)};
  try {
    validate_window(w);
  } catch (const WindowError& e) {
    throw UsageError(std::string("--delta/--levels: ") + e.what());
  }

  ConductanceReport r;
  if (f.limits_only) {
    r = conductance_by_limits(gamma, b, w);
  } else {
    IntegralOptions io;
    io.xi_half_width = f.xi_half_width;
    io.xi_step = f.xi_step;
    io.j_max = f.j_max;
    io.sweep = sweep_options(c);
    r = conductance_by_integral(gamma, b, w, io);
  }

  if (c.format == "csv") {
    std::string csv = "branch,limit_minus,limit_plus,F_minus,F_plus,contribution,integral\n";
    for (const auto& pc : r.per_curve) {
      csv += pc.branch.label() + "," + format_number(pc.limit_minus) + "," +
             format_number(pc.limit_plus) + "," + format_number(pc.f_minus) + "," +
             format_number(pc.f_plus) + "," + format_number(pc.contribution) + "," +
             (pc.integral ? format_number(*pc.integral) : std::string()) + "\n";
    }
    emit(c.out, csv, out);
  } else {
    emit(c.out, report_to_json(r).dump(2) + "\n", out);
  }
  if (r.integral_value &&
      std::abs(*r.integral_value - static_cast<double>(r.integer_value)) > kQuantizationTol) {
    err << "integral " << format_number(*r.integral_value) << " is not within "
        << format_number(kQuantizationTol) << " of " << r.integer_value << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

// symmetry-check ------------------------------------------------------------

double inverse_gamma(double g) {
  if (g == 0.0) return kInf;
  if (std::isinf(g)) return 0.0;
  return 1.0 / g;
}

int cmd_symmetry(const Common& in, int k, const std::string& curves_path, std::ostream& out,
                 std::ostream& err) {
  const Common c = with_format(in, "json");
  const double b = field_of(c);
  const double gamma = gammas_of(c, false).front();
  if (k < 1) throw UsageError("--k: must be >= 1");
  const auto xis = xis_of(c, "0");
  const SweepOptions so = sweep_options(c);

  std::vector<SymmetryPoint> points(xis.size());
  parallel_for(xis.size(), so.workers, [&](std::size_t i) {
    points[i] = symmetry_point({b, gamma, xis[i]}, k, so.solve);
  });
  double max_dev = 0.0;
  double max_fixed = 0.0;
  for (const auto& p : points) {
    max_dev = std::max(max_dev, p.deviation);
    max_fixed = std::max(max_fixed, p.fixed_point_deviation);
  }
  const bool pass = max_dev <= kSymmetryTol && max_fixed <= kFixedPointTol;

  if (c.format == "csv") {
    std::string csv = "xi,deviation,fixed_point_deviation\n";
    for (const auto& p : points) {
      csv += format_number(p.params.xi) + "," + format_number(p.deviation) + "," +
             format_number(p.fixed_point_deviation) + "\n";
    }
    emit(c.out, csv, out);
  } else {
    const auto& first = points.front().canonical;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : points) {
      nlohmann::json direct = nlohmann::json::array();
      nlohmann::json mapped = nlohmann::json::array();
      for (double v : p.direct) direct.push_back(number_to_json(v));
      for (double v : p.mapped) mapped.push_back(number_to_json(v));
      arr.push_back({{"xi", number_to_json(p.params.xi)},
                     {"canonical_xi", number_to_json(p.canonical.params.xi)},
                     {"direct", direct},
                     {"mapped", mapped},
                     {"deviation", number_to_json(p.deviation)},
                     {"fixed_point_deviation", number_to_json(p.fixed_point_deviation)}});
    }
    const nlohmann::json j = {
        {"requested", {{"b", number_to_json(b)}, {"gamma", number_to_json(gamma)}}},
        {"canonical",
         {{"b", number_to_json(first.params.b)}, {"gamma", number_to_json(first.params.gamma)}}},
        {"transform", transform_to_json(first.transform)},
        {"points", arr},
        {"max_deviation", number_to_json(max_dev)},
        {"tolerance", number_to_json(kSymmetryTol)},
        {"max_fixed_point_deviation", number_to_json(max_fixed)},
        {"fixed_point_tolerance", number_to_json(kFixedPointTol)},
        {"pass", pass}};
    emit(c.out, j.dump(2) + "\n", out);
  }

  if (!curves_path.empty() || !c.svg.empty()) {
    // The requested problem and its images under sigma_3 and charge conjugation.
    const std::vector<double> sweep_xis = xis.size() > 1 ? xis : parse_range("-6:4:101", "--xi");
    const auto branches = branches_of(c, 2);
    struct Problem {
      double b;
      double gamma;
    };
    const std::vector<Problem> problems{{b, gamma}, {b, -gamma}, {-b, inverse_gamma(gamma)}};
    std::string csv;
    Plot plot;
    plot.title = "symmetries b=" + format_number(b) + " gamma=" + format_number(gamma);
    plot.x_label = "xi";
    plot.y_label = "lambda";
    double extent = 0.0;
    for (const auto& pr : problems) {
      const auto curves = sweep(pr.gamma, pr.b, sweep_xis, branches, so);
      const std::string part = prefix_column(curves_to_csv(curves, true), "b", format_number(pr.b));
      csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
      for (const auto& cv : curves) {
        Series s;
        s.label = "b=" + format_number(pr.b) + " gamma=" + format_number(pr.gamma) + " " +
                  cv.branch.label();
        s.x = cv.xis;
        s.y = cv.lambdas;
        for (double v : cv.lambdas) extent = std::max(extent, std::abs(v));
        plot.series.push_back(std::move(s));
      }
    }
    int k_max = 1;
    while (landau_energy(b, k_max) < extent) ++k_max;
    plot.reference_levels = landau_levels(b, k_max);
    if (!curves_path.empty()) emit(curves_path, csv, out);
    if (!c.svg.empty()) write_text(c.svg, render_svg(plot));
  }

  if (!pass) {
    err << "symmetry deviation " << format_number(max_dev) << " (tol "
        << format_number(kSymmetryTol) << "), fixed point deviation " << format_number(max_fixed)
        << " (tol " << format_number(kFixedPointTol) << ")\n";
    return kExitFailure;
  }
  return kExitOk;
}

// validate ------------------------------------------------------------------

int cmd_validate(const Common& c, const std::string& only, std::ostream& out) {
  ValidationOptions opts;
  const SweepOptions so = sweep_options(c);
  opts.workers = so.workers;
  opts.solve = so.solve;
  if (!only.empty()) {
    for (const auto& part : split(only, ',')) {
      const int id = integer(part, "--only");
      if (id < 1 || id > kCriterionCount) throw UsageError("--only: criteria are 1..10");
      opts.only.push_back(id);
    }
  }
  int failed = 0;
  const auto results = run_validation(opts, [&](const CriterionResult& r) {
    out << format_result(r) << "\n";
    out.flush();
    if (!r.pass) ++failed;
  });
  out << (results.size() - static_cast<std::size_t>(failed)) << "/" << results.size()
      << " criteria passed\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

// CLI wiring ------------------------------------------------------------------

void add_field(CLI::App* sub, Common& c) {
  sub->add_option("--b", c.b, "magnetic field strength, nonzero")->capture_default_str();
}

void add_gamma(CLI::App* sub, Common& c, bool list) {
  const std::string what = list ? "boundary parameter(s): values, inf, or min:max:steps[:log], "
                                  "comma separated"
                                : "boundary parameter (number or inf)";
  auto* g = sub->add_option("--gamma", c.gamma, what);
  auto* e = sub->add_option("--eta", c.eta, "boundary angle in [-pi/2, 3pi/2) instead of --gamma");
  g->excludes(e);
}

void add_run(CLI::App* sub, Common& c) {
  sub->add_option("--workers", c.workers,
                  std::string("worker threads (default $") + kWorkersEnv + " or all cores)");
  sub->add_option("--spacing", c.spacing, "grid spacing h (default 0.0025/max(1,|b|))");
}

void add_output(CLI::App* sub, Common& c, const std::string& default_format) {
  sub->add_option("--out", c.out, "data output path, - for stdout")->capture_default_str();
  sub->add_option("--format", c.format, "csv or json (default " + default_format + ")")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--svg", c.svg, "also write an SVG plot to this path");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dispersion curves and edge Hall conductance of half-plane magnetic Dirac operators"};
  app.name("hallfiber");
  app.require_subcommand(1);

  Common c;
  int n = 1;
  int k = 6;
  std::string curves_path;
  std::string only;
  ConductanceFlags cf;

  auto* dispersion = app.add_subcommand("dispersion", "sample dispersion curves lambda_j(xi)");
  add_field(dispersion, c);
  add_gamma(dispersion, c, true);
  dispersion->add_option("--xi", c.xi, "momentum xi or min:max:steps (default -6:4:201)");
  dispersion->add_option("--branches", c.branches, "branches like +1,-2 (default +-1..3)");
  add_run(dispersion, c);
  add_output(dispersion, c, "csv");

  auto* zigzag = app.add_subcommand("zigzag", "dispersion curves for gamma = 0 and gamma = inf");
  add_field(zigzag, c);
  zigzag->add_option("--xi", c.xi, "momentum xi or min:max:steps (default -6:4:201)");
  zigzag->add_option("--branches", c.branches, "branches like +1,-2 (default +-1..3)");
  add_run(zigzag, c);
  add_output(zigzag, c, "csv");

  auto* gap = app.add_subcommand("gap-profile", "maximal negative energy -min theta-_1 per gamma");
  add_field(gap, c);
  add_gamma(gap, c, true);
  gap->add_option("--xi", c.xi, "momentum window min:max:steps (default -8:4:121)");
  add_run(gap, c);
  add_output(gap, c, "csv");

  auto* critical = app.add_subcommand("critical-point", "minimizer of theta-_n per gamma");
  add_field(critical, c);
  add_gamma(critical, c, true);
  critical->add_option("--n", n, "branch index")->capture_default_str();
  add_run(critical, c);
  add_output(critical, c, "csv");

  auto* conductance = app.add_subcommand("conductance", "edge Hall conductance for a level window");
  add_field(conductance, c);
  add_gamma(conductance, c, false);
  conductance->add_option("--levels", cf.levels, "selected Landau levels k, comma separated")
      ->capture_default_str();
  conductance->add_option("--delta", cf.delta, "window half-width (default min(0.3 sqrt|b|, capped))");
  conductance->add_option("--xi-half-width", cf.xi_half_width, "integration half-width (default 10 sqrt|b|)");
  conductance->add_option("--xi-step", cf.xi_step, "coarse momentum step")->capture_default_str();
  conductance->add_option("--jmax", cf.j_max, "branches per sign (default from the window)");
  conductance->add_flag("--no-integral", cf.limits_only, "only classify the limits");
  add_run(conductance, c);
  add_output(conductance, c, "json");

  auto* symmetry = app.add_subcommand("symmetry-check", "canonical map against direct spectra");
  add_field(symmetry, c);
  add_gamma(symmetry, c, false);
  symmetry->add_option("--xi", c.xi, "momentum xi or min:max:steps (default 0)");
  symmetry->add_option("--k", k, "eigenvalues nearest 0 compared per point")->capture_default_str();
  symmetry->add_option("--curves", curves_path, "write curves of the related problems as CSV");
  symmetry->add_option("--branches", c.branches, "branches for --curves/--svg (default +-1..2)");
  add_run(symmetry, c);
  add_output(symmetry, c, "json");

  auto* validate = app.add_subcommand("validate", "run the acceptance criteria");
  validate->add_option("--only", only, "comma separated criteria ids (default all)");
  add_run(validate, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (dispersion->parsed()) return cmd_dispersion(c, out);
    if (zigzag->parsed()) return cmd_zigzag(c, out);
    if (gap->parsed()) return cmd_gap_profile(c, out);
    if (critical->parsed()) return cmd_critical_point(c, n, out, err);
    if (conductance->parsed()) return cmd_conductance(c, cf, out, err);
    if (symmetry->parsed()) return cmd_symmetry(c, k, curves_path, out, err);
    if (validate->parsed()) return cmd_validate(c, only, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SweepError& e) {
    err << "error at branch " << e.branch().label() << ", xi = " << format_number(e.xi()) << ": "
        << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hallfiber::cli
