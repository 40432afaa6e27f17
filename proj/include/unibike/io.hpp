#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "constants.hpp"
#include "error.hpp"
#include "models.hpp"
#include "pipeline.hpp"
#include "polar_track.hpp"

namespace unibike {

// ---------------------------------------------------------------------------------------
// Angles in units of pi

namespace detail {
inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}
}  // namespace detail

/// Accepts "60pi", "0.5pi", "pi", "-pi", "2*pi", "pi/200", "3pi/4" and plain radians.
inline double parse_angle(std::string_view text) {
  const std::string_view s = detail::trim(text);
  const auto bad = [&] { return DomainError("cannot parse angle '" + std::string(text) + "'"); };
  const auto at = s.find("pi");
  double value = 0.0;
  if (at == std::string_view::npos) {
    if (!detail::parse_number(s, value)) throw bad();
    return value;
  }
  std::string_view coef = detail::trim(s.substr(0, at));
  if (!coef.empty() && coef.back() == '*') coef = detail::trim(coef.substr(0, coef.size() - 1));
  double c = 1.0;
  if (coef.empty() || coef == "+") {
    c = 1.0;
  } else if (coef == "-") {
    c = -1.0;
  } else if (!detail::parse_number(coef, c)) {
    throw bad();
  }
  std::string_view rest = detail::trim(s.substr(at + 2));
  double denom = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw bad();
    if (!detail::parse_number(rest.substr(1), denom) || denom == 0.0) throw bad();
  }
  return c * pi / denom;
}

/// "%.17g" of angle / pi followed by "pi".
inline std::string format_angle(double radians) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17gpi", radians / pi);
  return buf;
}

// ---------------------------------------------------------------------------------------
// Track files

inline constexpr std::string_view kTrackMagic = "UBTK";
inline constexpr int kTrackVersion = 1;

namespace detail {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

}  // namespace detail

inline nlohmann::json manifest_json(const TrackManifest& m, std::size_t knots, const std::string& body_hash) {
  return {
      {"format", std::string(kTrackMagic)},
      {"version", kTrackVersion},
      {"n", m.n},
      {"seed_family", to_string(m.seed_family)},
      {"domain_pi", {m.domain.lo / pi, m.domain.hi / pi}},
      {"ode_abs_tol", m.ode_abs_tol},
      {"ode_rel_tol", m.ode_rel_tol},
      {"parent_hash", m.parent_hash},
      {"knots", knots},
      {"body_hash", body_hash},
  };
}

/// Text track file: "UBTK 1", a key = value manifest, "end_header", then one
/// "theta r dr/dtheta" row per knot (theta in radians, all at 17 significant digits).
/// A JSON mirror of the manifest is written to `<path>.json` unless disabled.
inline void write_track(const PolarTrack& track, const std::filesystem::path& path, bool sidecar = true) {
  const TrackManifest& m = track.manifest();
  if (m.domain.empty()) throw DomainError("write_track: track has an empty domain");
  std::string body;
  body.reserve(track.size() * 64);
  Fnv1a64 h;
  for (std::size_t i = 0; i < track.size(); ++i) {
    const std::string row = format_knot_row(track.theta()[i], track.radii()[i], track.slopes()[i]);
    h.update(row);
    body += row;
  }
  std::ostringstream head;
  head << kTrackMagic << ' ' << kTrackVersion << '\n'
       << "n = " << m.n << '\n'
       << "seed_family = " << to_string(m.seed_family) << '\n'
       << "domain = " << format_angle(m.domain.lo) << ' ' << format_angle(m.domain.hi) << '\n'
       << "ode_abs_tol = " << detail::format_real(m.ode_abs_tol) << '\n'
       << "ode_rel_tol = " << detail::format_real(m.ode_rel_tol) << '\n'
       << "parent_hash = " << m.parent_hash << '\n'
       << "knots = " << track.size() << '\n'
       << "body_hash = " << h.hex() << '\n'
       << "end_header\n";
  detail::write_file_atomic(path, head.str() + body);
  if (sidecar) {
    std::filesystem::path side = path;
    side += ".json";
    detail::write_file_atomic(side, manifest_json(m, track.size(), h.hex()).dump(2) + "\n");
  }
}

inline PolarTrack parse_track(std::string_view text, const std::string& origin = "<memory>") {
  auto fail = [&](const std::string& why) { return IoError(origin + ": " + why); };
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    const std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      line = text.substr(pos);
      pos = text.size();
    } else {
      line = text.substr(pos, end - pos);
      pos = end + 1;
    }
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw fail("empty file");
  {
    const std::string_view first = detail::trim(line);
    if (first.substr(0, kTrackMagic.size()) != kTrackMagic) throw fail("malformed header: bad magic");
    double version = 0.0;
    if (!detail::parse_number(first.substr(kTrackMagic.size()), version)) {
      throw fail("malformed header: missing version");
    }
    if (version != kTrackVersion) {
      throw fail("unsupported track version " + std::string(detail::trim(first.substr(kTrackMagic.size()))));
    }
  }

  std::map<std::string, std::string, std::less<>> kv;
  bool ended = false;
  while (next_line(line)) {
    const std::string_view l = detail::trim(line);
    if (l.empty() || l.front() == '#') continue;
    if (l == "end_header") { ended = true; break; }
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw fail("malformed header line " + std::to_string(line_no));
    const std::string key(detail::trim(l.substr(0, eq)));
    if (key.empty() || kv.count(key)) throw fail("malformed header line " + std::to_string(line_no));
    kv[key] = std::string(detail::trim(l.substr(eq + 1)));
  }
  if (!ended) throw fail("malformed header: missing end_header");
  for (const char* k : {"n", "seed_family", "domain", "ode_abs_tol", "ode_rel_tol", "parent_hash", "knots", "body_hash"}) {
    if (!kv.count(k)) throw fail(std::string("malformed header: missing key ") + k);
  }

  TrackManifest m;
  double num = 0.0;
  if (!detail::parse_number(kv["n"], num) || num < 1 || num != std::floor(num)) throw fail("malformed header: n");
  m.n = static_cast<int>(num);
  try {
    m.seed_family = seed_family_from_string(kv["seed_family"]);
  } catch (const Error&) {
    throw fail("malformed header: seed_family");
  }
  if (!detail::parse_number(kv["ode_abs_tol"], m.ode_abs_tol) ||
      !detail::parse_number(kv["ode_rel_tol"], m.ode_rel_tol)) {
    throw fail("malformed header: tolerances");
  }
  m.parent_hash = kv["parent_hash"];
  double knots = 0.0;
  if (!detail::parse_number(kv["knots"], knots) || knots < 2 || knots != std::floor(knots)) {
    throw fail("malformed header: knots");
  }
  Interval declared{};
  {
    const std::string& d = kv["domain"];
    const auto sp = d.find(' ');
    try {
      if (sp == std::string::npos) throw DomainError("");
      declared = {parse_angle(d.substr(0, sp)), parse_angle(d.substr(sp + 1))};
    } catch (const DomainError&) {
      throw fail("malformed header: domain");
    }
  }

  std::vector<double> th;
  std::vector<double> r;
  std::vector<double> dr;
  const auto expected = static_cast<std::size_t>(knots);
  th.reserve(expected);
  r.reserve(expected);
  dr.reserve(expected);
  Fnv1a64 h;
  while (next_line(line)) {
    if (detail::trim(line).empty()) continue;
    double v[3];
    std::string_view rest = line;
    for (double& x : v) {
      rest = detail::trim(rest);
      const auto sp = rest.find(' ');
      if (!detail::parse_number(rest.substr(0, sp), x)) {
        throw fail("malformed body row at line " + std::to_string(line_no));
      }
      rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp);
    }
    if (!detail::trim(rest).empty()) throw fail("malformed body row at line " + std::to_string(line_no));
    th.push_back(v[0]);
    r.push_back(v[1]);
    dr.push_back(v[2]);
    h.update(format_knot_row(v[0], v[1], v[2]));
  }
  if (th.size() != expected) {
    throw fail("knot count mismatch: header says " + kv["knots"] + ", body has " + std::to_string(th.size()));
  }
  if (h.hex() != kv["body_hash"]) throw fail("body hash mismatch (file is corrupted)");
  PolarTrack track = [&] {
    try {
      return PolarTrack(std::move(th), std::move(r), std::move(dr), m);
    } catch (const DomainError& e) {
      throw fail(std::string("invalid track body: ") + e.what());
    }
  }();
  const Interval actual = track.domain();
  const double slack = 1e-12 * std::max(1.0, std::fabs(actual.hi));
  if (std::fabs(declared.lo - actual.lo) > slack || std::fabs(declared.hi - actual.hi) > slack) {
    throw fail("malformed header: domain does not match knots");
  }
  return track;
}

inline PolarTrack read_track(const std::filesystem::path& path) {
  return parse_track(detail::read_file(path), path.string());
}

// ---------------------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
      if (row.size() != columns.size()) throw DomainError("CsvTable: row width differs from header");
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += detail::format_real(row[i]);
      }
      out += '\n';
    }
    return out;
  }
};

inline void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  detail::write_file_atomic(path, table.str());
}

/// Profile columns t, error, s_star; with `log10` the first two become log10 values.
inline CsvTable profile_table(const ErrorProfile& p, bool log10 = false) {
  CsvTable t;
  t.columns = log10 ? std::vector<std::string>{"log10_t", "log10_error", "s_star"}
                    : std::vector<std::string>{"t", "error", "s_star"};
  for (const auto& s : p.samples) {
    if (log10) {
      t.rows.push_back({std::log10(s.t), std::log10(s.error), s.s_star});
    } else {
      t.rows.push_back({s.t, s.error, s.s_star});
    }
  }
  return t;
}

inline CsvTable radius_table(const PolarTrack& track) {
  CsvTable t;
  t.columns = {"theta", "r", "dr_dtheta"};
  for (std::size_t i = 0; i < track.size(); ++i) {
    t.rows.push_back({track.theta()[i], track.radii()[i], track.slopes()[i]});
  }
  return t;
}

inline CsvTable comparison_table(std::span<const ModelComparisonRow> rows) {
  CsvTable t;
  t.columns = {"t", "measured", "model", "rel_dev"};
  for (const auto& r : rows) t.rows.push_back({r.t, r.measured, r.model, r.rel_dev});
  return t;
}

/// E_n(2pi) against n for every track of a run, next to the model value.
inline CsvTable error_at_2pi_table(const IterationRun& run) {
  CsvTable t;
  t.columns = {"n", "measured", "model", "scaled_n32"};
  for (int n = 1; n <= run.size(); ++n) {
    const auto e = run.profile(n).at(two_pi);
    if (!e) throw DomainError("error_at_2pi_table: profile of n = " + std::to_string(n) + " lacks t = 2pi");
    t.rows.push_back({double(n), *e, en_star(n, two_pi), *e * std::pow(double(n), 1.5)});
  }
  return t;
}

inline CsvTable conjecture2_table(std::span<const Conjecture2Row> rows) {
  CsvTable t;
  t.columns = {"t", "value", "tail_bound", "ratio_2t", "ratio_2t2"};
  for (const auto& r : rows) t.rows.push_back({r.t, r.value, r.tail_bound, r.ratio, r.ratio_literal});
  return t;
}

// ---------------------------------------------------------------------------------------
// SVG

struct SvgCurve {
  std::string label;
  std::vector<Point2> points;
};

/// `count` + 1 equally spaced parameter samples of a curve over [lo, hi].
inline SvgCurve sample_for_svg(const Curve& c, double lo, double hi, std::size_t count, std::string label) {
  if (count < 1 || !(hi > lo)) throw DomainError("sample_for_svg: bad sampling range");
  SvgCurve out{std::move(label), {}};
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = i == count ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count);
    out.points.push_back(c.eval(t));
  }
  return out;
}

inline std::string svg_document(std::span<const SvgCurve> curves) {
  if (curves.empty()) throw DomainError("export_svg: no curves given");
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const auto& c : curves) {
    if (c.points.size() < 2) throw DomainError("export_svg: curve '" + c.label + "' has fewer than two points");
    for (const auto& p : c.points) {
      xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double pad = 0.03 * span;
  const double stroke = span / 500.0;
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};
  auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + f(xmin - pad) + " " +
         f(-ymax - pad) + " " + f(xmax - xmin + 2 * pad) + " " + f(ymax - ymin + 2 * pad) + "\">\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    out += "  <polyline fill=\"none\" stroke=\"" + std::string(palette[k % std::size(palette)]) +
           "\" stroke-width=\"" + f(stroke) + "\"";
    if (k >= std::size(palette)) out += " stroke-dasharray=\"" + f(4 * stroke) + "\"";
    out += " points=\"";
    for (std::size_t i = 0; i < curves[k].points.size(); ++i) {
      if (i) out += ' ';
      out += f(curves[k].points[i].x) + "," + f(-curves[k].points[i].y);
    }
    out += "\"><title>" + curves[k].label + "</title></polyline>\n";
  }
  out += "</svg>\n";
  return out;
}

inline void export_svg(std::span<const SvgCurve> curves, const std::filesystem::path& path) {
  detail::write_file_atomic(path, svg_document(curves));
}

// ---------------------------------------------------------------------------------------
// Run reports

inline nlohmann::json run_report(const IterationRun& run, const nlohmann::json& config_echo, double wall_seconds) {
  nlohmann::json iterations = nlohmann::json::array();
  for (int n = 1; n <= run.size(); ++n) {
    const PolarTrack& tr = run.track(n);
    const ErrorProfile& pr = run.profile(n);
    nlohmann::json e{
        {"n", n},
        {"domain_pi", {tr.domain().lo / pi, tr.domain().hi / pi}},
        {"knots", tr.size()},
        {"hash", pr.track_ref},
        {"max_error", pr.max_error()},
    };
    const double t0 = run.t0_values[static_cast<std::size_t>(n - 1)];
    e["t0"] = std::isfinite(t0) ? nlohmann::json(t0) : nlohmann::json(nullptr);
    if (const auto at = pr.at(two_pi)) {
      e["error_at_2pi"] = *at;
      e["model_at_2pi"] = en_star(n, two_pi);
      e["model_deviation"] = en_star(n, two_pi) / *at - 1.0;
    }
    const OdeStats& st = run.ode_stats[static_cast<std::size_t>(n - 1)];
    e["ode"] = {{"accepted", st.accepted}, {"rejected", st.rejected}, {"max_drift", st.max_drift}};
    iterations.push_back(std::move(e));
  }
  return {
      {"seed_family", to_string(run.seed_family)},
      {"config", config_echo},
      {"iterations", std::move(iterations)},
      {"wall_clock_seconds", wall_seconds},
  };
}

}  // namespace unibike
