#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hallfiber/conductance.hpp"
#include "hallfiber/dispersion.hpp"

namespace hallfiber::cli {

/// Shortest text that reads back as the same double; "inf" / "-inf" for
/// infinities, and -0 printed as 0.
std::string format_number(double v);

/// Parses a number or "inf" / "+inf" / "-inf" / "infinity".
double parse_number(const std::string& text);

/// header xi,branch,lambda,dlambda_dxi (prefixed by gamma, when
/// `with_gamma`), one row per sample, 17 significant digits.
std::string curves_to_csv(const std::vector<DispersionCurve>& curves, bool with_gamma = false);

nlohmann::json transform_to_json(const SymmetryTransform& t);
SymmetryTransform transform_from_json(const nlohmann::json& j);

/// Numbers that may be infinite are stored as strings "inf" / "-inf".
nlohmann::json number_to_json(double v);
double number_from_json(const nlohmann::json& j);

nlohmann::json curves_to_json(const std::vector<DispersionCurve>& curves);

nlohmann::json report_to_json(const ConductanceReport& r);
ConductanceReport report_from_json(const nlohmann::json& j);

/// Compares every field of two reports exactly.
bool reports_equal(const ConductanceReport& a, const ConductanceReport& b);

/// A line series of an SVG plot.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Drawn as dashed horizontal lines when inside the y range.
  std::vector<double> reference_levels;
  /// Optional marked points (x, y).
  std::vector<std::pair<double, double>> markers;
};

/// Static SVG line chart; one polyline per series.
std::string render_svg(const Plot& plot);

/// Plot of dispersion curves with the Landau levels of b as dashed lines.
Plot curves_plot(const std::vector<DispersionCurve>& curves, const std::string& title);

/// Writes text to path; "-" or empty path means stdout. Throws
/// std::runtime_error if the file cannot be written.
void write_text(const std::string& path, const std::string& text);

}  // namespace hallfiber::cli
