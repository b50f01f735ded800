#include "output.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "critkerr/error.hpp"

namespace critkerr::cli {

namespace {

struct Rgb {
  double r, g, b;
};

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  return {a.r + t * (b.r - a.r), a.g + t * (b.g - a.g), a.b + t * (b.b - a.b)};
}

Rgb ramp(const std::vector<Rgb>& stops, double u) {
  u = std::clamp(u, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(u), stops.size() - 2);
  return lerp(stops[i], stops[i + 1], u - static_cast<double>(i));
}

const std::vector<Rgb> kSequential = {
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
const std::vector<Rgb> kDiverging = {{33, 102, 172}, {247, 247, 247}, {178, 24, 43}};

std::string hex(const Rgb& c) {
  auto ch = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0))); };
  return fmt::format("#{:02x}{:02x}{:02x}", ch(c.r), ch(c.g), ch(c.b));
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::tm utc_now(int& millis) {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  millis = static_cast<int>(ms % 1000);
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return tm;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.12g}", v);
}

std::string timestamp_token() {
  int ms = 0;
  const std::tm tm = utc_now(ms);
  return fmt::format("{:04d}{:02d}{:02d}T{:02d}{:02d}{:02d}.{:03d}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                     tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

std::string timestamp_iso() {
  int ms = 0;
  const std::tm tm = utc_now(ms);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}.{:03d}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

std::filesystem::path artifact_path(const std::string& dir, const std::string& stem, const std::string& ext) {
  std::filesystem::create_directories(dir);
  const std::string base = stem + "_" + timestamp_token();
  std::filesystem::path p = std::filesystem::path(dir) / (base + ext);
  for (int k = 1; std::filesystem::exists(p); ++k) p = std::filesystem::path(dir) / fmt::format("{}-{}{}", base, k, ext);
  return p;
}

std::string provenance_header(const std::string& command, const std::string& config, unsigned workers) {
  std::string h = fmt::format("# critkerr {} written {} workers {}\n", command, timestamp_iso(), workers);
  h += "# command: " + command + "\n";
  std::istringstream in(config);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) h += "#> " + line + "\n";
  return h;
}

std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

std::string render_svg(const Heatmap& h) {
  const std::size_t nx = h.x.size(), ny = h.y.size();
  const double left = 80, top = 40, size = 480, bar = 20, gap = 20;
  const double cw = size / static_cast<double>(nx), chh = size / static_cast<double>(ny);
  double lo = INFINITY, hi = -INFINITY;
  for (double v : h.values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  if (h.diverging) {
    const double m = std::max(std::abs(lo), std::abs(hi));
    lo = -m;
    hi = m;
  }
  const double span = hi > lo ? hi - lo : 1.0;
  auto color = [&](double v) {
    if (!std::isfinite(v)) return std::string("#bdbdbd");
    return hex(ramp(h.diverging ? kDiverging : kSequential, (v - lo) / span));
  };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n",
      left + size + gap + bar + 90, top + size + 60);
  s += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\">{}</text>\n", left + size / 2, escape(h.title));
  s += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double py = top + size - static_cast<double>(iy + 1) * chh;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      s += fmt::format("<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"{}\"/>\n",
                       left + static_cast<double>(ix) * cw, py, cw + 0.05, chh + 0.05,
                       color(h.values[iy * nx + ix]));
    }
  }
  s += "</g>\n";
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top,
                   size, size);
  auto tick = [](double v) { return fmt::format("{:.6g}", v); };
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"start\">{}</text>\n", left, top + size + 16, tick(h.x.front()));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left + size, top + size + 16,
                   tick(h.x.back()));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + size / 2, top + size + 40,
                   escape(h.x_label));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 6, top + size, tick(h.y.front()));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 6, top + 12, tick(h.y.back()));
  s += fmt::format("<text transform=\"translate({},{}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n", 20,
                   top + size / 2, escape(h.y_label));

  const double bx = left + size + gap;
  const int bands = 64;
  for (int i = 0; i < bands; ++i) {
    const double u = (i + 0.5) / bands;
    s += fmt::format("<rect x=\"{}\" y=\"{:.3f}\" width=\"{}\" height=\"{:.3f}\" fill=\"{}\"/>\n", bx,
                     top + size - (i + 1) * size / bands, bar, size / bands + 0.05, color(lo + u * span));
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx + bar + 4, top + 12, tick(hi));
  s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx + bar + 4, top + size, tick(lo));
  s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx, top - 8, escape(h.value_label));
  s += "</svg>\n";
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
}

}  // namespace critkerr::cli
