#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "sweep.hpp"

namespace qwalk {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(out);
}
}  // namespace detail

// Radians, either decimal ("0.7854") or a fraction of pi ("-3pi/8", "pi", "7*pi/6").
inline double parse_angle(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto bad = [&] { return ValidationError("cannot parse angle '" + text + "'"); };
  const auto at = s.find("pi");
  if (at == std::string::npos) {
    double v;
    if (!detail::parse_number(s, v)) throw bad();
    return v;
  }
  std::string coef = s.substr(0, at);
  std::string rest = s.substr(at + 2);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double c = 1;
  if (coef == "-") c = -1;
  else if (!coef.empty() && coef != "+" && !detail::parse_number(coef, c)) throw bad();
  double v = c * pi;
  if (!rest.empty()) {
    double d;
    if (rest.front() != '/' || !detail::parse_number(rest.substr(1), d) || d == 0) throw bad();
    v /= d;
  }
  return v;
}

inline std::string fmt12(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

inline void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline void write_table_csv(const SweepTable& t, const std::string& path) {
  auto f = open_out(path);
  for (const Axis& a : t.axes) f << a.name << ',';
  f << "value,status\n";
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    for (double c : t.coords(i)) f << fmt12(c) << ',';
    f << fmt12(t.values[i]) << ',' << status_name(t.status[i]) << '\n';
  }
  finish(f, path);
}

inline nlohmann::ordered_json nan_to_null(double v) {
  return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v);
}

inline nlohmann::ordered_json table_to_json(const SweepTable& t) {
  nlohmann::ordered_json j;
  j["axes"] = nlohmann::ordered_json::array();
  for (const Axis& a : t.axes) j["axes"].push_back({{"name", a.name}, {"values", a.values}});
  j["cells"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < t.values.size(); ++i)
    j["cells"].push_back({{"value", nan_to_null(t.values[i])}, {"status", status_name(t.status[i])}});
  j["meta"] = t.meta;
  j["overlays"] = nlohmann::ordered_json::array();
  for (const Overlay& o : t.overlays) {
    nlohmann::ordered_json vals = nlohmann::ordered_json::array();
    for (double v : o.values) vals.push_back(nan_to_null(v));
    j["overlays"].push_back({{"name", o.name}, {"axis", o.axis}, {"values", vals}});
  }
  return j;
}

inline double null_to_nan(const nlohmann::ordered_json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

inline SweepTable table_from_json(const nlohmann::ordered_json& j) {
  SweepTable t;
  for (const auto& a : j.at("axes")) t.axes.push_back({a.at("name").get<std::string>(), a.at("values").get<std::vector<double>>()});
  for (const auto& c : j.at("cells")) {
    t.values.push_back(null_to_nan(c.at("value")));
    t.status.push_back(status_from_name(c.at("status").get<std::string>()));
  }
  t.meta = j.at("meta");
  if (j.contains("overlays"))
    for (const auto& o : j.at("overlays")) {
      Overlay ov{o.at("name").get<std::string>(), o.at("axis").get<std::string>(), {}};
      for (const auto& v : o.at("values")) ov.values.push_back(null_to_nan(v));
      t.overlays.push_back(std::move(ov));
    }
  if (t.values.size() != t.cell_count()) throw ValidationError("table JSON: cell count does not match axes");
  return t;
}

inline void write_table_json(const SweepTable& t, const std::string& path) {
  auto f = open_out(path);
  f << table_to_json(t).dump(1) << '\n';
  finish(f, path);
}

inline SweepTable read_table_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  try {
    return table_from_json(nlohmann::ordered_json::parse(f));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

enum class TableFormat { Csv, Json };

inline void write_table(const SweepTable& t, const std::string& path, TableFormat fmt) {
  fmt == TableFormat::Csv ? write_table_csv(t, path) : write_table_json(t, path);
}

// One row per overlay sample: axis value, then each overlay column.
inline void write_overlays_csv(const SweepTable& t, const std::string& path) {
  auto f = open_out(path);
  if (t.overlays.empty()) throw IoError("table has no overlays");
  f << t.overlays.front().axis;
  for (const Overlay& o : t.overlays) f << ',' << o.name;
  f << '\n';
  const Axis* axis = nullptr;
  for (const Axis& a : t.axes)
    if (a.name == t.overlays.front().axis) axis = &a;
  if (!axis) throw IoError("overlay axis not found in table");
  for (std::size_t i = 0; i < axis->values.size(); ++i) {
    f << fmt12(axis->values[i]);
    for (const Overlay& o : t.overlays) f << ',' << fmt12(o.values[i]);
    f << '\n';
  }
  finish(f, path);
}

inline void write_spectrum_csv(const std::vector<EigenPair>& pairs, const std::string& path) {
  auto f = open_out(path);
  f << "re_lambda,im_lambda,abs_lambda,re_E,im_E\n";
  for (const EigenPair& p : pairs) {
    const cplx e = quasi_energy_of(p.value);
    f << fmt12(p.value.real()) << ',' << fmt12(p.value.imag()) << ',' << fmt12(std::abs(p.value)) << ','
      << fmt12(e.real()) << ',' << fmt12(e.imag()) << '\n';
  }
  finish(f, path);
}

inline void write_strip_csv(const std::vector<StripRow>& rows, const std::string& path) {
  auto f = open_out(path);
  f << "kx,re_E,status\n";
  for (const StripRow& r : rows) {
    if (!r.ok) {
      f << fmt12(r.kx) << ",nan,error\n";
      continue;
    }
    for (double e : r.re_energies) f << fmt12(r.kx) << ',' << fmt12(e) << ",ok\n";
  }
  finish(f, path);
}

inline void write_profiles_csv(const std::vector<EdgeStateReport>& states, int n_sites, const std::string& path) {
  auto f = open_out(path);
  f << "site";
  for (std::size_t s = 0; s < states.size(); ++s) f << ",state" << s;
  f << '\n';
  for (int i = 0; i < n_sites; ++i) {
    f << site_of(i, n_sites);
    for (const EdgeStateReport& s : states) f << ',' << fmt12(s.profile[i]);
    f << '\n';
  }
  finish(f, path);
}

enum class PlotKind { Heatmap, Spectrum, Bands, Profiles, Curve };

struct PlotSpec {
  PlotKind kind = PlotKind::Heatmap;
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<std::string> data;  // data files, relative to the script
  std::string overlay;            // heatmaps only
  std::string image;              // output png
  int series = 2;                 // profiles only
};

inline std::string gp_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("''") : std::string(1, c);
  return out + "'";
}

// gnuplot script; run it from the directory holding the data files.
inline std::string plot_script(const PlotSpec& s) {
  std::ostringstream o;
  o << "set terminal pngcairo size 900,700 enhanced\n";
  o << "set output " << gp_quote(s.image) << "\n";
  o << "set datafile separator ','\n";
  o << "set datafile missing 'nan'\n";
  o << "set key off\n";
  o << "set title " << gp_quote(s.title) << "\n";
  o << "set xlabel " << gp_quote(s.xlabel) << "\n";
  o << "set ylabel " << gp_quote(s.ylabel) << "\n";
  switch (s.kind) {
    case PlotKind::Heatmap:
      o << "set view map\nset palette defined (-1 'violet', 0 'white', 1 'yellow')\n";
      o << "plot " << gp_quote(s.data.at(0)) << " skip 1 using 2:1:3 with image";
      if (!s.overlay.empty()) {
        o << ", \\\n     " << gp_quote(s.overlay) << " skip 1 using 1:2 with lines lw 2 lc rgb 'red'";
        o << ", \\\n     " << gp_quote(s.overlay) << " skip 1 using 1:3 with lines lw 2 lc rgb 'black'";
      }
      o << "\n";
      break;
    case PlotKind::Spectrum:
      o << "set size ratio -1\n";
      o << "set object 1 circle at 0,0 size 1 fs empty border lc rgb 'gray'\n";
      o << "plot " << gp_quote(s.data.at(0)) << " skip 1 using 1:2 with points pt 7 ps 0.5 lc rgb 'blue'\n";
      break;
    case PlotKind::Bands:
      o << "set xrange [-pi:pi]\nset yrange [-pi:pi]\n";
      o << "plot " << gp_quote(s.data.at(0)) << " skip 1 using 1:2 with dots lc rgb 'black'\n";
      break;
    case PlotKind::Curve:
      o << "set size ratio -1\nset xzeroaxis\nset yzeroaxis\n";
      o << "plot " << gp_quote(s.data.at(0)) << " skip 1 using 2:3 with lines lw 2 lc rgb 'blue', \\\n";
      o << "     '+' using (0):(0) with points pt 7 lc rgb 'red'\n";
      break;
    case PlotKind::Profiles:
      o << "set key on\n";
      o << "plot ";
      for (int c = 0; c < s.series; ++c)
        o << (c ? ", \\\n     " : "") << gp_quote(s.data.at(0)) << " skip 1 using 1:" << c + 2
          << " with lines title 'state " << c << "'";
      o << "\n";
      break;
  }
  return o.str();
}

inline void emit_plot_script(const PlotSpec& spec, const std::string& path) {
  auto f = open_out(path);
  f << plot_script(spec);
  finish(f, path);
}

}  // namespace qwalk
