#pragma once

// Accuracy-versus-SNR line plot. Every plotted point is also written as an
// XML comment "<!-- point series=NAME snr_db=X accuracy=Y -->" so the data can
// be checked without rasterizing.

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "rcsid/error.hpp"
#include "rcsid/io/csv.hpp"

namespace rcsid::io {

struct PlotSeries {
  std::string name;
  std::vector<double> snr_db;
  std::vector<double> accuracy;
};

inline std::string accuracy_svg(const std::vector<PlotSeries>& series, const std::string& title = "") {
  rcsid::detail::require(!series.empty(), "accuracy_svg: nothing to plot");
  double xmin = 1e300, xmax = -1e300;
  for (const auto& s : series) {
    rcsid::detail::require(s.snr_db.size() == s.accuracy.size() && !s.snr_db.empty(),
                           "accuracy_svg: series '" + s.name + "' is empty or ragged");
    xmin = std::min(xmin, *std::min_element(s.snr_db.begin(), s.snr_db.end()));
    xmax = std::max(xmax, *std::max_element(s.snr_db.begin(), s.snr_db.end()));
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  const double W = 640, H = 420, L = 60, R = 20, T = 40, B = 50;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - y * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.snr_db.size(); ++i)
      o << "<!-- point series=" << s.name << " snr_db=" << format_double(s.snr_db[i])
        << " accuracy=" << format_double(s.accuracy[i]) << " -->\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << W - R << "\" y2=\"" << py(0)
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << L << "\" y2=\"" << py(1)
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 10; k += 2) {
    const double y = k / 10.0;
    o << "<text x=\"" << L - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << k * 10 << "%</text>\n";
  }
  for (double x : series.front().snr_db)
    o << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << format_double(x) << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">SNR (dB)</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 6];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.snr_db.size(); ++i)
      o << (i ? " " : "") << px(s.snr_db[i]) << "," << py(s.accuracy[i]);
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.snr_db.size(); ++i)
      o << "<circle cx=\"" << px(s.snr_db[i]) << "\" cy=\"" << py(s.accuracy[i]) << "\" r=\"3\" fill=\"" << c
        << "\"/>\n";
    o << "<text x=\"" << L + 10 << "\" y=\"" << T + 16 * (k + 1) << "\" fill=\"" << c << "\">" << s.name
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace rcsid::io
