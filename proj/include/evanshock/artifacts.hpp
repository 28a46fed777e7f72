#ifndef EVANSHOCK_ARTIFACTS_HPP
#define EVANSHOCK_ARTIFACTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace evanshock::artifacts {

inline constexpr const char* kSchema = "evanshock/1";

/// %.17g, with nan/inf spelled out.
std::string format_number(double x);

/// CSV text: '#'-prefixed schema and config lines, a header, then rows.
std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows, const std::string& config);

/// JSON document carrying schema and config next to `body`'s fields.
nlohmann::ordered_json document(nlohmann::ordered_json body, const std::string& config);

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
  bool markers = false;
};

struct Panel {
  std::string title;
  std::string x_label, y_label;
  std::vector<Series> series;
  bool log_x = false;
  bool log_y = false;
};

/// The figure layouts: g_curve and boundary_map take one panel, contour_pair
/// two side by side, snapshot_panel four in a 2x2 grid.
enum class SvgKind { g_curve, boundary_map, contour_pair, snapshot_panel };
const char* to_string(SvgKind kind);

/// Self-contained SVG with axes, ticks, labels, legend and the config in a
/// comment. Throws DomainError on a wrong panel count or an empty dataset.
std::string emit_svg(SvgKind kind, const std::vector<Panel>& panels, const std::string& config);

/// Writes text with LF line endings, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace evanshock::artifacts

#endif  // EVANSHOCK_ARTIFACTS_HPP
