#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace critkerr::cli {

/// Rows of preformatted cells under a header.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);

/// UTC timestamp used in file names, e.g. 20261016T120102.345Z.
std::string timestamp_token();
std::string timestamp_iso();

/// <dir>/<stem>_<timestamp><ext>, suffixed with -1, -2, ... if taken.
std::filesystem::path artifact_path(const std::string& dir, const std::string& stem, const std::string& ext);

/// Header block shared by every text artifact. The first line carries the
/// timestamp and run environment; the rest is the resolved config.
std::string provenance_header(const std::string& command, const std::string& config, unsigned workers);

std::string render_csv(const Table& t);

struct Heatmap {
  std::vector<double> x, y;
  std::vector<double> values;  // row-major, values[iy * nx + ix]
  std::string title, x_label, y_label, value_label;
  bool diverging = false;
};

std::string render_svg(const Heatmap& h);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace critkerr::cli
