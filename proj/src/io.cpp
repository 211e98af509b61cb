#include "rgdist/io.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

namespace rgdist {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string run_comment(std::uint64_t manifest_hash, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# manifest=%016llx seed=%llu\n",
                static_cast<unsigned long long>(manifest_hash),
                static_cast<unsigned long long>(seed));
  return buf;
}

namespace {

std::string escape(std::string_view s) {
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

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void write_svg_polylines(std::ostream& out, const std::vector<SvgSeries>& series,
                         std::string_view title, std::string_view x_label,
                         std::string_view y_label) {
  constexpr double W = 640, H = 420, L = 60, R = 150, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!(x1 > x0)) {
    x0 = (x0 == std::numeric_limits<double>::infinity()) ? 0.0 : x0 - 0.5;
    x1 = x0 + 1.0;
  }
  if (!(y1 > y0)) {
    y0 = (y0 == std::numeric_limits<double>::infinity()) ? 0.0 : y0 - 0.5;
    y1 = y0 + 1.0;
  }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                W, H);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  out << buf;
  out << "<text x=\"" << L << "\" y=\"" << T - 12 << "\">" << escape(title) << "</text>\n";
  out << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "<text x=\"14\" y=\"" << (T + (H - T - B) / 2) << "\" transform=\"rotate(-90 14 "
      << (T + (H - T - B) / 2) << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%g</text>\n"
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%g</text>\n"
                "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%g</text>\n"
                "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%g</text>\n",
                L, H - B + 16, x0, W - R, H - B + 16, x1, L - 6, H - B, y0, L - 6, T + 10, y1);
  out << buf;

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : series[k].points) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f ", px(x), py(y));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
                  "stroke-width=\"2\"/>\n",
                  W - R + 10, T + 16.0 * k + 6, W - R + 30, T + 16.0 * k + 6, color);
    out << buf;
    out << "<text x=\"" << W - R + 36 << "\" y=\"" << T + 16.0 * k + 10 << "\">"
        << escape(series[k].label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace rgdist
