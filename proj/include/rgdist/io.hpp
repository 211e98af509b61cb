#pragma once
// Output helpers shared by the command-line driver.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rgdist {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// "# manifest=<16 hex digits> seed=<seed>" plus newline.
std::string run_comment(std::uint64_t manifest_hash, std::uint64_t seed);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Plain SVG with one polyline per series, axes boxed to the data range.
void write_svg_polylines(std::ostream& out, const std::vector<SvgSeries>& series,
                         std::string_view title, std::string_view x_label,
                         std::string_view y_label);

}  // namespace rgdist
