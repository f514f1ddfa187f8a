#include "svg.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

namespace dfpp::cli {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 220.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

double px(double alpha) { return kLeft + (kWidth - kLeft - kRight) * alpha / 100.0; }
double py(double fraction) { return kHeight - kBottom - (kHeight - kTop - kBottom) * fraction; }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_profile_svg(const std::vector<ProfileCurve>& curves, const std::string& title) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  s += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">{}</text>\n", kLeft, escape(title));

  // Axes and ticks.
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", px(0),
                   py(0), px(100));
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", px(0),
                   py(0), py(1));
  for (int a = 0; a <= 100; a += 20) {
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", px(a),
                     py(0) + 18, a);
  }
  for (int i = 0; i <= 5; ++i) {
    const double f = i / 5.0;
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n",
                     px(0) - 6, py(f) + 4, f);
  }
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">alpha</text>\n",
                   px(50), kHeight - 10);
  s += fmt::format(
      "<text x=\"15\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {:.1f})\">"
      "fraction solved</text>\n",
      py(0.5), py(0.5));

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const ProfileCurve& curve = curves[c];
    const char* colour = kColours[c % kColours.size()];
    const char* dash = curve.line_search ? "" : " stroke-dasharray=\"6 3\"";
    std::string points;
    for (std::size_t i = 0; i < curve.alpha.size(); ++i) {
      const double a = std::clamp(static_cast<double>(curve.alpha[i]), 0.0, 100.0);
      points += fmt::format("{:.1f},{:.1f} ", px(a), py(std::clamp(curve.fraction[i], 0.0, 1.0)));
    }
    if (!points.empty()) points.pop_back();
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n",
                     colour, dash, points);

    const double ly = kTop + 18.0 * static_cast<double>(c);
    const double lx = kWidth - kRight + 20;
    s += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
        "stroke-width=\"1.5\"{}/>\n",
        lx, ly, lx + 24, ly, colour, dash);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}{}</text>\n", lx + 30, ly + 4,
                     curve.strategy.code(), curve.line_search ? " + ls" : "");
  }
  s += "</svg>\n";
  return s;
}

}  // namespace dfpp::cli
