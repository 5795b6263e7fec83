#include "output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hallfiber::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fixed17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round numbers for axis ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return out;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") return kInf;
  if (t == "-inf" || t == "-infinity") return -kInf;
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text[0] == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || std::isnan(v)) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

std::string curves_to_csv(const std::vector<DispersionCurve>& curves, bool with_gamma) {
  std::ostringstream out;
  if (with_gamma) out << "gamma,";
  out << "xi,branch,lambda,dlambda_dxi\n";
  for (const auto& c : curves) {
    const std::string label = c.branch.label();
    for (std::size_t i = 0; i < c.xis.size(); ++i) {
      if (with_gamma) out << fixed17(c.gamma) << ',';
      out << fixed17(c.xis[i]) << ',' << label << ',' << fixed17(c.lambdas[i]) << ','
          << fixed17(c.slopes[i]) << '\n';
    }
  }
  return out.str();
}

nlohmann::json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return 0.0;
  return v;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_number(j.get<std::string>());
  return j.get<double>();
}

nlohmann::json transform_to_json(const SymmetryTransform& t) {
  return {{"negate_spectrum", t.negate_spectrum},
          {"reflect_xi", t.reflect_xi},
          {"invert_gamma", t.invert_gamma},
          {"flip_branch_sign", t.flip_branch_sign}};
}

SymmetryTransform transform_from_json(const nlohmann::json& j) {
  SymmetryTransform t;
  t.negate_spectrum = j.at("negate_spectrum").get<bool>();
  t.reflect_xi = j.at("reflect_xi").get<bool>();
  t.invert_gamma = j.at("invert_gamma").get<bool>();
  t.flip_branch_sign = j.at("flip_branch_sign").get<bool>();
  return t;
}

nlohmann::json curves_to_json(const std::vector<DispersionCurve>& curves) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : curves) {
    nlohmann::json lambdas = nlohmann::json::array();
    nlohmann::json slopes = nlohmann::json::array();
    nlohmann::json xis = nlohmann::json::array();
    for (std::size_t i = 0; i < c.xis.size(); ++i) {
      xis.push_back(number_to_json(c.xis[i]));
      lambdas.push_back(number_to_json(c.lambdas[i]));
      slopes.push_back(number_to_json(c.slopes[i]));
    }
    arr.push_back({{"branch", c.branch.label()},
                   {"gamma", number_to_json(c.gamma)},
                   {"b", number_to_json(c.b)},
                   {"limit_minus_inf", number_to_json(c.limit_minus_inf)},
                   {"transform", transform_to_json(c.transform)},
                   {"xi", xis},
                   {"lambda", lambdas},
                   {"dlambda_dxi", slopes}});
  }
  return {{"curves", arr}};
}

nlohmann::json report_to_json(const ConductanceReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& c : r.per_curve) {
    nlohmann::json e = {{"branch", c.branch.label()},
                        {"limit_minus", number_to_json(c.limit_minus)},
                        {"limit_plus", number_to_json(c.limit_plus)},
                        {"F_minus", number_to_json(c.f_minus)},
                        {"F_plus", number_to_json(c.f_plus)},
                        {"contribution", number_to_json(c.contribution)}};
    e["integral"] = c.integral ? number_to_json(*c.integral) : nlohmann::json(nullptr);
    per.push_back(e);
  }
  nlohmann::json j = {
      {"integer", r.integer_value},
      {"gamma", number_to_json(r.gamma)},
      {"b", number_to_json(r.b)},
      {"window",
       {{"b", number_to_json(r.window.b)},
        {"selected", r.window.selected},
        {"delta", number_to_json(r.window.delta)}}},
      {"transform", transform_to_json(r.transform)},
      {"per_curve", per},
  };
  if (r.integral_value) {
    j["integral"] = number_to_json(*r.integral_value);
    j["xi_half_width"] = number_to_json(r.xi_half_width);
    j["xi_step"] = number_to_json(r.xi_step);
    j["j_max"] = r.j_max;
    j["samples"] = r.samples;
  } else {
    j["integral"] = nullptr;
  }
  return j;
}

ConductanceReport report_from_json(const nlohmann::json& j) {
  ConductanceReport r;
  r.integer_value = j.at("integer").get<long>();
  r.gamma = number_from_json(j.at("gamma"));
  r.b = number_from_json(j.at("b"));
  const auto& w = j.at("window");
  r.window.b = number_from_json(w.at("b"));
  r.window.selected = w.at("selected").get<std::vector<int>>();
  r.window.delta = number_from_json(w.at("delta"));
  r.transform = transform_from_json(j.at("transform"));
  for (const auto& e : j.at("per_curve")) {
    CurveContribution c;
    c.branch = Branch::parse(e.at("branch").get<std::string>());
    c.limit_minus = number_from_json(e.at("limit_minus"));
    c.limit_plus = number_from_json(e.at("limit_plus"));
    c.f_minus = number_from_json(e.at("F_minus"));
    c.f_plus = number_from_json(e.at("F_plus"));
    c.contribution = number_from_json(e.at("contribution"));
    if (!e.at("integral").is_null()) c.integral = number_from_json(e.at("integral"));
    r.per_curve.push_back(c);
  }
  if (!j.at("integral").is_null()) {
    r.integral_value = number_from_json(j.at("integral"));
    r.xi_half_width = number_from_json(j.at("xi_half_width"));
    r.xi_step = number_from_json(j.at("xi_step"));
    r.j_max = j.at("j_max").get<int>();
    r.samples = j.at("samples").get<std::size_t>();
  }
  return r;
}

bool reports_equal(const ConductanceReport& a, const ConductanceReport& b) {
  auto same_transform = [](const SymmetryTransform& x, const SymmetryTransform& y) {
    return x.negate_spectrum == y.negate_spectrum && x.reflect_xi == y.reflect_xi &&
           x.invert_gamma == y.invert_gamma && x.flip_branch_sign == y.flip_branch_sign;
  };
  if (a.integer_value != b.integer_value || a.gamma != b.gamma || a.b != b.b ||
      a.window.b != b.window.b || a.window.selected != b.window.selected ||
      a.window.delta != b.window.delta || !same_transform(a.transform, b.transform) ||
      a.integral_value != b.integral_value || a.xi_half_width != b.xi_half_width ||
      a.xi_step != b.xi_step || a.j_max != b.j_max || a.samples != b.samples ||
      a.per_curve.size() != b.per_curve.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.per_curve.size(); ++i) {
    const auto& x = a.per_curve[i];
    const auto& y = b.per_curve[i];
    if (!(x.branch == y.branch) || x.limit_minus != y.limit_minus ||
        x.limit_plus != y.limit_plus || x.f_minus != y.f_minus || x.f_plus != y.f_plus ||
        x.contribution != y.contribution || x.integral != y.integral) {
      return false;
    }
  }
  return true;
}

std::string render_svg(const Plot& plot) {
  constexpr double width = 820.0;
  constexpr double height = 520.0;
  constexpr double left = 70.0;
  constexpr double right = 150.0;
  constexpr double top = 40.0;
  constexpr double bottom = 55.0;

  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 < x1)) {
    x0 = std::isfinite(x0) ? x0 - 1.0 : -1.0;
    x1 = std::isfinite(x1) ? x1 + 1.0 : 1.0;
  }
  if (!(y0 < y1)) {
    y0 = std::isfinite(y0) ? y0 - 1.0 : -1.0;
    y1 = std::isfinite(y1) ? y1 + 1.0 : 1.0;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape_xml(plot.title) << "</text>\n";
  out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(x0, x1, 8)) {
    out << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(top + ph) << "\" x2=\""
        << num(sx(t)) << "\" y2=\"" << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(top + ph + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << short_number(t) << "</text>\n";
  }
  for (double t : ticks(y0, y1, 8)) {
    out << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(left)
        << "\" y2=\"" << num(sy(t)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(t) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << short_number(t) << "</text>\n";
  }
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape_xml(plot.x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 18 "
      << num(top + ph / 2) << ")\">" << escape_xml(plot.y_label) << "</text>\n";

  for (double level : plot.reference_levels) {
    if (level < y0 || level > y1) continue;
    out << "<line class=\"level\" x1=\"" << num(left) << "\" y1=\"" << num(sy(level))
        << "\" x2=\"" << num(left + pw) << "\" y2=\"" << num(sy(level))
        << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }

  std::size_t color = 0;
  for (const auto& s : plot.series) {
    const char* stroke = kPalette[color++ % std::size(kPalette)];
    out << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!first) out << ' ';
      out << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
      first = false;
    }
    out << "\"/>\n";
  }
  for (const auto& [mx, my] : plot.markers) {
    out << "<circle cx=\"" << num(sx(mx)) << "\" cy=\"" << num(sy(my))
        << "\" r=\"4\" fill=\"red\"/>\n";
  }

  // Legend, one entry per series.
  color = 0;
  double ly = top + 10;
  for (const auto& s : plot.series) {
    const char* stroke = kPalette[color++ % std::size(kPalette)];
    out << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(left + pw + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << stroke
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(s.label)
        << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
  return out.str();
}

Plot curves_plot(const std::vector<DispersionCurve>& curves, const std::string& title) {
  Plot p;
  p.title = title;
  p.x_label = "xi";
  p.y_label = "lambda";
  double b = 1.0;
  double extent = 0.0;
  bool several_gammas = false;
  for (const auto& c : curves) {
    if (c.gamma != curves.front().gamma && !(std::isnan(c.gamma))) several_gammas = true;
  }
  for (const auto& c : curves) {
    Series s;
    s.label = c.branch.label();
    if (several_gammas) s.label = "gamma=" + format_number(c.gamma) + " " + s.label;
    s.x = c.xis;
    s.y = c.lambdas;
    for (double v : c.lambdas) extent = std::max(extent, std::abs(v));
    b = c.b;
    p.series.push_back(std::move(s));
  }
  int k_max = 1;
  while (landau_energy(b, k_max) < extent) ++k_max;
  p.reference_levels = landau_levels(b, k_max);
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw std::runtime_error("failed to write '" + path + "'");
}

}  // namespace hallfiber::cli
