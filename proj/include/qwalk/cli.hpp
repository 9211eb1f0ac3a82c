#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "io.hpp"
#include "presets.hpp"
#include "symmetries.hpp"

namespace qwalk::cli {

struct Options {
  std::string config;
  bool json = false;
  std::string out_dir = "out";
  std::string prefix;
  std::string checkpoint;
  int workers = 0;

  std::string theta1, theta2;
  std::string theta1_min = "-pi", theta1_max = "pi";
  std::string theta2_min = "-pi", theta2_max = "pi";
  int theta1_cells = 101, theta2_cells = 101;
  double gamma = 0, phi = 0;
  double gamma_min = 0, gamma_max = 2;
  int gamma_cells = 41;
  double gamma_x = 0, gamma_y = 0;
  double gamma_x_min = 0, gamma_x_max = 2;
  int gamma_x_cells = 21;
  int nk = presets::kNk;
  int grid = 201;
  std::string band = "lower";
  std::string k0, e0;
  int dim = 1;
  double tol = 1e-10;

  std::string inner1 = "-3pi/8", inner2 = "5pi/8", outer1 = "-3pi/8", outer2 = "pi/4";
  int sites = presets::kChainSites;
  int boundary = presets::kBoundary;
  int kx_samples = presets::kKxSamples;
  double real_axis_tol = -1;
  std::string output;

  std::string figure;
  int cells = 0;  // figure grid override, 0 keeps the preset
};

struct Ctx {
  std::ostream& out;
  std::ostream& err;
  const Options& o;
};

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string path_in(const Options& o, const std::string& name) {
  return (std::filesystem::path(o.out_dir) / name).string();
}

inline void report(const Ctx& c, const nlohmann::ordered_json& j, const std::string& text) {
  if (c.o.json)
    c.out << j.dump() << '\n';
  else
    c.out << text;
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

inline double angle(const std::string& s, const char* name) {
  require(!s.empty(), std::string("--") + name + " is required");
  return parse_angle(s);
}

inline double zero_or_pi(const std::string& s, const char* name) {
  const double v = parse_angle(s);
  require(v == 0.0 || v == pi, std::string("--") + name + " must be 0 or pi");
  return v;
}

inline SweepOptions sweep_opts(const Options& o) { return {o.workers, o.checkpoint, -1}; }

struct TableFiles {
  std::string csv, json, script, overlay;
};

inline TableFiles save_table(const Ctx& c, const SweepTable& t, const std::string& stem, const std::string& title,
                             const std::string& xl, const std::string& yl) {
  TableFiles f{path_in(c.o, stem + ".csv"), path_in(c.o, stem + ".json"), path_in(c.o, stem + ".gp"), ""};
  write_table_csv(t, f.csv);
  write_table_json(t, f.json);
  PlotSpec ps{PlotKind::Heatmap, title, xl, yl, {stem + ".csv"}, "", stem + ".png"};
  if (!t.overlays.empty()) {
    f.overlay = path_in(c.o, stem + "_overlay.csv");
    write_overlays_csv(t, f.overlay);
    ps.overlay = stem + "_overlay.csv";
  }
  emit_plot_script(ps, f.script);
  return f;
}

inline nlohmann::ordered_json table_summary(const SweepTable& t, const TableFiles& f) {
  std::size_t ok = 0, gap = 0, bad = 0;
  for (CellStatus s : t.status) (s == CellStatus::Ok ? ok : s == CellStatus::GapClosed ? gap : bad)++;
  return {{"csv", f.csv}, {"json", f.json}, {"script", f.script}, {"cells", t.values.size()},
          {"ok", ok},     {"gap_closed", gap}, {"error", bad}};
}

inline std::string summary_text(const nlohmann::ordered_json& s) {
  return "wrote " + s["csv"].get<std::string>() + ", " + s["json"].get<std::string>() + ", " +
         s["script"].get<std::string>() + " (" + std::to_string(s["cells"].get<std::size_t>()) + " cells, " +
         std::to_string(s["gap_closed"].get<std::size_t>()) + " gap_closed, " +
         std::to_string(s["error"].get<std::size_t>()) + " error)\n";
}

inline int finish_sweep(const Ctx& c, const SweepOutcome& r, const std::string& stem, const std::string& title,
                        const std::string& xl, const std::string& yl) {
  if (!r.complete) {
    report(c, {{"complete", false}}, "sweep incomplete; rerun with the same --checkpoint to resume\n");
    return 2;
  }
  const auto s = table_summary(r.table, save_table(c, r.table, stem, title, xl, yl));
  report(c, s, summary_text(s));
  return 0;
}

inline int cmd_winding(const Ctx& c) {
  const auto& o = c.o;
  require(o.nk >= 3, "--nk must be >= 3");
  require(o.band == "lower" || o.band == "upper", "--band must be lower or upper");
  const WalkParams1D p{angle(o.theta1, "theta1"), angle(o.theta2, "theta2"), o.gamma, o.phi};
  const WindingResult w = winding_number(p, o.nk, o.band == "lower" ? Band::Lower : Band::Upper);
  report(c,
         {{"w", w.w}, {"is_integer", w.is_integer}, {"total_phase", w.total_phase}, {"orientation", w.orientation}},
         fmt("%.6f\n", w.w));
  return 0;
}

inline int cmd_chern(const Ctx& c) {
  const auto& o = c.o;
  require(o.grid >= 2, "--grid must be >= 2");
  const WalkParams2D p{angle(o.theta1, "theta1"), angle(o.theta2, "theta2"), o.gamma_x, o.gamma_y};
  const BandData2D b = band_spectrum_2d(p, o.grid, o.band == "upper" ? Band::Upper : Band::Lower);
  const double gap = min_gap_2d(p, b);
  if (gap < kGapTol) throw GapClosed("band gap closes on the momentum grid");
  const ChernResult r = chern_number(b);
  report(c, {{"c", r.c}, {"raw", r.raw}, {"min_gap", gap}}, std::to_string(r.c) + "\n");
  return 0;
}

inline int cmd_critical(const Ctx& c) {
  const auto& o = c.o;
  const double t1 = angle(o.theta1, "theta1"), t2 = angle(o.theta2, "theta2");
  CriticalGamma g;
  if (!o.k0.empty() || !o.e0.empty()) {
    g = critical_gamma(t1, t2, {zero_or_pi(o.k0.empty() ? "0" : o.k0, "k0"), zero_or_pi(o.e0.empty() ? "0" : o.e0, "e0")});
  } else {
    g = min_critical_gamma(t1, t2);
  }
  const char* kind = g.kind == CriticalKind::RealCritical      ? "RealCritical"
                     : g.kind == CriticalKind::ShiftedCritical ? "ShiftedCritical"
                                                               : "NoClosing";
  nlohmann::ordered_json j{{"kind", kind},
                           {"gamma_c", nan_to_null(g.gamma_c)},
                           {"phi_c", g.phi_c},
                           {"k0", g.channel.k0},
                           {"e0", g.channel.e0}};
  report(c, j, g.kind == CriticalKind::NoClosing ? std::string("none\n") : fmt("%.10g\n", g.gamma_c));
  return 0;
}

inline int cmd_symmetry(const Ctx& c) {
  const auto& o = c.o;
  require(o.nk >= 3, "--nk must be >= 3");
  std::vector<SymmetryReport> rs;
  if (o.dim == 2) {
    const WalkParams2D p{angle(o.theta1, "theta1"), angle(o.theta2, "theta2"), o.gamma_x, o.gamma_y};
    rs = {check_phs(p, o.nk, o.tol), check_exact_pt(p, o.nk, o.tol)};
  } else {
    require(o.dim == 1, "--dim must be 1 or 2");
    const WalkParams1D p{angle(o.theta1, "theta1"), angle(o.theta2, "theta2"), o.gamma, o.phi};
    rs = {check_pt_1d(p, o.nk, o.tol), check_exact_pt(p, o.nk, o.tol), check_phs(p, o.nk, o.tol),
          check_cs(p, o.nk, o.tol)};
  }
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  std::string text;
  for (const auto& r : rs) {
    j.push_back({{"relation", relation_name(r.relation)},
                 {"max_violation", r.max_violation},
                 {"passed", r.passed},
                 {"grid_size", r.grid_size},
                 {"tolerance", r.tolerance}});
    text += std::string(relation_name(r.relation)) + " " + (r.passed ? "pass" : "fail") + " max_violation=" +
            fmt("%.3e", r.max_violation) + "\n";
  }
  report(c, j, text);
  return 0;
}

inline RegionSpec regions_from(const Options& o) {
  return {o.boundary, {parse_angle(o.inner1), parse_angle(o.inner2)}, {parse_angle(o.outer1), parse_angle(o.outer2)}};
}

inline nlohmann::ordered_json edge_json(const std::vector<EdgeStateReport>& es) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : es)
    j.push_back({{"re_lambda", e.eigenvalue.real()},
                 {"im_lambda", e.eigenvalue.imag()},
                 {"re_E", e.quasi_energy.real()},
                 {"im_E", e.quasi_energy.imag()},
                 {"ipr", e.ipr},
                 {"peak_site", e.peak_site},
                 {"is_edge", e.is_edge}});
  return j;
}

struct ChainRun {
  std::vector<EigenPair> pairs;
  std::vector<EdgeStateReport> edges;
  int off_axis = 0;  // |Im E| > 1e-3
};

inline ChainRun run_chain(int sites, const RegionSpec& spec, double gamma, double real_axis_tol) {
  ChainRun r;
  r.pairs = chain_spectrum(build_chain_operator(sites, spec, gamma));
  EdgeDetectOptions eo;
  eo.real_axis_tol = real_axis_tol > 0 ? real_axis_tol : (gamma == 0 ? 1e-6 : 1e-4);
  r.edges = detect_edge_states(r.pairs, sites, spec.boundary, eo);
  for (const auto& p : r.pairs) r.off_axis += std::abs(quasi_energy_of(p.value).imag()) > 1e-3;
  return r;
}

inline nlohmann::ordered_json chain_json(const ChainRun& r, double gamma, const std::string& file) {
  return {{"gamma", gamma},
          {"file", file},
          {"eigenvalues", r.pairs.size()},
          {"edge_states", count_edge_states(r.edges)},
          {"complex_energy_states", r.off_axis},
          {"real_axis", edge_json(r.edges)}};
}

inline std::string chain_text(const nlohmann::ordered_json& j) {
  return "gamma=" + fmt("%g", j["gamma"].get<double>()) + " edge_states=" + std::to_string(j["edge_states"].get<int>()) +
         " complex_energy_states=" + std::to_string(j["complex_energy_states"].get<int>()) + " -> " +
         j["file"].get<std::string>() + "\n";
}

inline void spectrum_plot(const Options& o, const std::string& stem, const std::string& title) {
  emit_plot_script({PlotKind::Spectrum, title, "Re {/Symbol l}", "Im {/Symbol l}", {stem + ".csv"}, "", stem + ".png"},
                   path_in(o, stem + ".gp"));
}

inline int cmd_chain(const Ctx& c) {
  const auto& o = c.o;
  const RegionSpec spec = regions_from(o);
  const ChainRun r = run_chain(o.sites, spec, o.gamma, o.real_axis_tol);
  const std::string stem = o.prefix.empty() ? "chain_spectrum" : o.prefix;
  const std::string file = o.output.empty() ? path_in(o, stem + ".csv") : o.output;
  write_spectrum_csv(r.pairs, file);
  if (o.output.empty()) spectrum_plot(o, stem, "chain spectrum");
  const auto j = chain_json(r, o.gamma, file);
  report(c, j, chain_text(j));
  return 0;
}

struct StripSummary {
  int in_gap_own = 0;
  int in_gap_edge = 0;  // in-gap states peaked within 10 sites of a boundary
  int in_gap_reference = 0;
};

inline StripSummary summarize_strip(const std::vector<StripRow>& rows, const RegionSpec& spec, double gx, double gy,
                                    bool profiles) {
  StripSummary s;
  for (const StripRow& r : rows) {
    if (!r.ok) continue;
    const auto own = bulk_gaps(spec, r.kx, gx, gy);
    const auto ref = bulk_gaps(spec, r.kx, 0, 0);
    for (std::size_t i = 0; i < r.re_energies.size(); ++i) {
      const double e = std::abs(r.re_energies[i]);
      if (in_gaps(e, ref)) ++s.in_gap_reference;
      if (!in_gaps(e, own)) continue;
      ++s.in_gap_own;
    }
    if (profiles)
      for (const StripState& st : r.states)
        if (in_gaps(std::abs(st.quasi_energy.real()), own) &&
            std::min(std::abs(st.peak_site - spec.boundary), std::abs(st.peak_site + spec.boundary)) <= 10)
          ++s.in_gap_edge;
  }
  return s;
}

inline nlohmann::ordered_json strip_json(const StripSummary& s, double gx, double gy, const std::string& file) {
  return {{"gamma_x", gx},
          {"gamma_y", gy},
          {"file", file},
          {"in_gap_states", s.in_gap_own},
          {"in_gap_edge_states", s.in_gap_edge},
          {"in_lossless_gap_states", s.in_gap_reference}};
}

inline std::string strip_text(const nlohmann::ordered_json& j) {
  return "gamma=(" + fmt("%g", j["gamma_x"].get<double>()) + "," + fmt("%g", j["gamma_y"].get<double>()) +
         ") in_gap=" + std::to_string(j["in_gap_states"].get<int>()) +
         " in_lossless_gap=" + std::to_string(j["in_lossless_gap_states"].get<int>()) + " -> " +
         j["file"].get<std::string>() + "\n";
}

inline void bands_plot(const Options& o, const std::string& stem, const std::string& title) {
  emit_plot_script({PlotKind::Bands, title, "k_x", "Re E", {stem + ".csv"}, "", stem + ".png"}, path_in(o, stem + ".gp"));
}

inline int cmd_strip(const Ctx& c) {
  const auto& o = c.o;
  RegionSpec spec = presets::strip_regions();
  spec.boundary = o.boundary;
  require(o.kx_samples >= 1, "--kx-samples must be positive");
  const auto rows = strip_band_structure(spec, o.sites, o.kx_samples, o.gamma_x, o.gamma_y, true);
  const std::string stem = o.prefix.empty() ? "strip_bands" : o.prefix;
  const std::string file = path_in(o, stem + ".csv");
  write_strip_csv(rows, file);
  bands_plot(o, stem, "strip bands");
  const auto j = strip_json(summarize_strip(rows, spec, o.gamma_x, o.gamma_y, true), o.gamma_x, o.gamma_y, file);
  report(c, j, strip_text(j));
  return 0;
}

inline int cmd_phase1d(const Ctx& c) {
  const auto& o = c.o;
  require(o.nk >= 3 && o.theta1_cells >= 1 && o.theta2_cells >= 1, "grid sizes must be positive (--nk >= 3)");
  const Axis a1{"theta1", linspace(parse_angle(o.theta1_min), parse_angle(o.theta1_max), o.theta1_cells)};
  const Axis a2{"theta2", linspace(parse_angle(o.theta2_min), parse_angle(o.theta2_max), o.theta2_cells)};
  return finish_sweep(c, sweep_phase_diagram_1d(a1, a2, o.nk, sweep_opts(o)), o.prefix.empty() ? "phase1d" : o.prefix,
                      "W_- at gamma = 0", "theta2", "theta1");
}

inline int cmd_winding_sweep(const Ctx& c) {
  const auto& o = c.o;
  require(o.nk >= 3 && o.theta2_cells >= 1 && o.gamma_cells >= 1, "grid sizes must be positive (--nk >= 3)");
  const Axis a2{"theta2", linspace(parse_angle(o.theta2_min), parse_angle(o.theta2_max), o.theta2_cells)};
  const Axis ag{"gamma", linspace(o.gamma_min, o.gamma_max, o.gamma_cells)};
  return finish_sweep(c, sweep_winding_vs_gamma(angle(o.theta1, "theta1"), a2, ag, o.nk, sweep_opts(o)),
                      o.prefix.empty() ? "winding_sweep" : o.prefix, "W_- vs gamma", "gamma", "theta2");
}

inline int cmd_chern_sweep(const Ctx& c) {
  const auto& o = c.o;
  require(o.grid >= 2 && o.theta2_cells >= 1, "grid sizes must be positive");
  const Axis a2{"theta2", linspace(parse_angle(o.theta2_min), parse_angle(o.theta2_max), o.theta2_cells)};
  if (!o.theta1.empty()) {
    const Axis ag{"gamma_x", linspace(o.gamma_x_min, o.gamma_x_max, o.gamma_x_cells)};
    return finish_sweep(c, sweep_chern_vs_gamma(parse_angle(o.theta1), a2, ag, o.gamma_y, o.grid, sweep_opts(o)),
                        o.prefix.empty() ? "chern_sweep" : o.prefix, "C vs gamma_x", "gamma_x", "theta2");
  }
  const Axis a1{"theta1", linspace(parse_angle(o.theta1_min), parse_angle(o.theta1_max), o.theta1_cells)};
  return finish_sweep(c, sweep_chern_2d(a1, a2, o.grid, sweep_opts(o)), o.prefix.empty() ? "chern_sweep" : o.prefix,
                      "C at zero loss", "theta2", "theta1");
}

// ---- figure presets ----

inline int cells_or(const Options& o, int preset) { return o.cells > 0 ? o.cells : preset; }

inline nlohmann::ordered_json figure_2a(const Ctx& c) {
  const int n = cells_or(c.o, presets::kPhase1dCells);
  const Axis a1{"theta1", linspace(-pi, pi, n)}, a2{"theta2", linspace(-pi, pi, n)};
  const auto r = sweep_phase_diagram_1d(a1, a2, presets::kNk, sweep_opts(c.o));
  return table_summary(r.table, save_table(c, r.table, "fig2a", "1D SSQW phases (W_-)", "theta2", "theta1"));
}

inline nlohmann::ordered_json figure_2b(const Ctx& c) {
  const int n = cells_or(c.o, presets::kPhase2dCells);
  const Axis a1{"theta1", linspace(0, 2 * pi, n)}, a2{"theta2", linspace(0, 2 * pi, n)};
  const auto r = sweep_chern_2d(a1, a2, presets::kChernGrid, sweep_opts(c.o));
  return table_summary(r.table, save_table(c, r.table, "fig2b", "2D DTQW phases (C)", "theta2", "theta1"));
}

inline nlohmann::ordered_json figure_3(const Ctx& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  const char* tags = "abcd";
  for (std::size_t i = 0; i < presets::kFig3.size(); ++i) {
    const auto& q = presets::kFig3[i];
    const WalkParams1D p{q[0], q[1], q[2]};
    const std::string stem = std::string("fig3") + tags[i];
    const std::string file = path_in(c.o, stem + ".csv");
    auto f = open_out(file);
    f << "k,re_ny,re_nz,im_ny,im_nz,re_nx,im_nx\n";
    for (double k : momentum_grid(presets::kNk)) {
      const Coin u = u1d_ssqw_timesym_k(p, k);
      const cplx e = principal_acos(0.5 * u.trace());
      const Bloch3 n = bloch_from(u, e);
      f << fmt12(k) << ',' << fmt12(n[1].real()) << ',' << fmt12(n[2].real()) << ',' << fmt12(n[1].imag()) << ','
        << fmt12(n[2].imag()) << ',' << fmt12(n[0].real()) << ',' << fmt12(n[0].imag()) << '\n';
    }
    finish(f, file);
    emit_plot_script({PlotKind::Curve, "Bloch vector", "Re n_y", "Re n_z", {stem + ".csv"}, "", stem + ".png"},
                     path_in(c.o, stem + ".gp"));
    const WindingResult w = winding_number(p, presets::kNk);
    j.push_back({{"theta1", q[0]}, {"theta2", q[1]}, {"gamma", q[2]}, {"w", w.w}, {"file", file}});
  }
  return j;
}

inline nlohmann::ordered_json figure_4(const Ctx& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  const int n = cells_or(c.o, presets::kPhase1dCells);
  const char* tags = "abc";
  for (std::size_t i = 0; i < presets::kFig4Theta1.size(); ++i) {
    const Axis a2{"theta2", linspace(-pi, pi, n)}, ag{"gamma", linspace(0, presets::kFig4GammaMax, n)};
    const auto r = sweep_winding_vs_gamma(presets::kFig4Theta1[i], a2, ag, presets::kNk, sweep_opts(c.o));
    j.push_back(table_summary(
        r.table, save_table(c, r.table, std::string("fig4") + tags[i], "W_- vs gamma", "gamma", "theta2")));
  }
  return j;
}

inline nlohmann::ordered_json figure_5(const Ctx& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  const char* tags = "abcdef";
  const int nt = cells_or(c.o, presets::kFig5Theta2Cells);
  const int ng = c.o.cells > 0 ? c.o.cells : presets::kFig5GammaCells;
  for (std::size_t i = 0; i < presets::kFig5.size(); ++i) {
    const Axis a2{"theta2", linspace(0, 2 * pi, nt)}, ag{"gamma_x", linspace(0, presets::kFig5GammaMax, ng)};
    const auto r = sweep_chern_vs_gamma(presets::kFig5[i][0], a2, ag, presets::kFig5[i][1], presets::kChernGrid,
                                        sweep_opts(c.o));
    j.push_back(table_summary(
        r.table, save_table(c, r.table, std::string("fig5") + tags[i], "C vs gamma_x", "gamma_x", "theta2")));
  }
  return j;
}

inline nlohmann::ordered_json figure_6(const Ctx& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  const char* tags = "abcd";
  for (std::size_t i = 0; i < presets::kFig6Gamma.size(); ++i) {
    const double g = presets::kFig6Gamma[i];
    const ChainRun r = run_chain(presets::kChainSites, presets::chain_regions(), g, -1);
    const std::string stem = std::string("fig6") + tags[i];
    const std::string file = path_in(c.o, stem + ".csv");
    write_spectrum_csv(r.pairs, file);
    spectrum_plot(c.o, stem, "chain spectrum, gamma = " + fmt("%g", g));
    j.push_back(chain_json(r, g, file));
  }
  return j;
}

inline nlohmann::ordered_json figure_7(const Ctx& c) {
  nlohmann::ordered_json j;
  const RegionSpec chain = presets::chain_regions(), strip = presets::strip_regions();
  auto layout = [&](const RegionSpec& s, int n, const std::string& stem, bool two_d) {
    const std::string file = path_in(c.o, stem + ".csv");
    auto f = open_out(file);
    f << "site,theta1,theta2,invariant\n";
    const int inner = two_d ? chern_number(band_spectrum_2d({s.inner.theta1, s.inner.theta2}, presets::kChernGrid)).c
                            : static_cast<int>(std::lround(winding_number(WalkParams1D{s.inner.theta1, s.inner.theta2}, presets::kNk).w));
    const int outer = two_d ? chern_number(band_spectrum_2d({s.outer.theta1, s.outer.theta2}, presets::kChernGrid)).c
                            : static_cast<int>(std::lround(winding_number(WalkParams1D{s.outer.theta1, s.outer.theta2}, presets::kNk).w));
    for (int i = 0; i < n; ++i) {
      const int site = site_of(i, n);
      const AnglePair& a = s.at(site);
      f << site << ',' << fmt12(a.theta1) << ',' << fmt12(a.theta2) << ',' << (std::abs(site) <= s.boundary ? inner : outer)
        << '\n';
    }
    finish(f, file);
    return nlohmann::ordered_json{{"file", file}, {"inner_invariant", inner}, {"outer_invariant", outer}};
  };
  j["chain_layout"] = layout(chain, presets::kChainSites, "fig7_chain_layout", false);
  j["strip_layout"] = layout(strip, presets::kStripSites, "fig7_strip_layout", true);
  j["profiles"] = nlohmann::ordered_json::array();
  for (double g : {0.0, 0.2}) {
    const ChainRun r = run_chain(presets::kChainSites, chain, g, -1);
    std::vector<EdgeStateReport> edges;
    for (const auto& e : r.edges)
      if (e.is_edge) edges.push_back(e);
    const std::string stem = "fig7_profiles_g" + fmt("%g", g);
    const std::string file = path_in(c.o, stem + ".csv");
    write_profiles_csv(edges, presets::kChainSites, file);
    PlotSpec ps{PlotKind::Profiles, "edge-state profiles", "site", "|psi|^2", {stem + ".csv"}, "", stem + ".png"};
    ps.series = static_cast<int>(edges.size());
    if (ps.series > 0) emit_plot_script(ps, path_in(c.o, stem + ".gp"));
    j["profiles"].push_back({{"gamma", g}, {"file", file}, {"edge_states", edges.size()}});
  }
  return j;
}

inline nlohmann::ordered_json figure_8(const Ctx& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  const char* tags = "abcd";
  const RegionSpec spec = presets::strip_regions();
  for (std::size_t i = 0; i < presets::kFig8Gamma.size(); ++i) {
    const double g = presets::kFig8Gamma[i];
    const auto rows = strip_band_structure(spec, presets::kStripSites, presets::kKxSamples, g, g, false);
    const std::string stem = std::string("fig8") + tags[i];
    const std::string file = path_in(c.o, stem + ".csv");
    write_strip_csv(rows, file);
    bands_plot(c.o, stem, "strip bands, gamma = " + fmt("%g", g));
    j.push_back(strip_json(summarize_strip(rows, spec, g, g, false), g, g, file));
  }
  return j;
}

inline int cmd_figure(const Ctx& c) {
  const std::string& id = c.o.figure;
  static const std::map<std::string, nlohmann::ordered_json (*)(const Ctx&)> table = {
      {"2a", figure_2a}, {"2b", figure_2b}, {"3", figure_3}, {"4", figure_4}, {"5", figure_5},
      {"6", figure_6},   {"7", figure_7},   {"8", figure_8}};
  const auto it = table.find(id);
  require(it != table.end(), "unknown figure '" + id + "' (expected 2a, 2b, 3, 4, 5, 6, 7 or 8)");
  const nlohmann::ordered_json j{{"figure", id}, {"outputs", it->second(c)}};
  report(c, j, j.dump(2) + "\n");
  return 0;
}

// ---- argument handling ----

inline nlohmann::json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read config '" + path + "'");
  try {
    nlohmann::json j = nlohmann::json::parse(f);
    if (!j.is_object()) throw ValidationError("config '" + path + "' must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
}

struct App {
  CLI::App app{"Topological invariants and spectra of unitary and lossy discrete-time quantum walks", "qwalk"};
  Options o;
  std::map<std::string, CLI::App*> subs;
  std::map<CLI::App*, int (*)(const Ctx&)> handlers;

  App() {
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add("phase1d", "W_- phase diagram over (theta1, theta2) at zero loss", cmd_phase1d);
    add("winding", "winding number of one band", cmd_winding);
    add("chern", "Chern number of one band of the 2D walk", cmd_chern);
    add("winding-sweep", "W_- over (theta2, gamma) at fixed theta1", cmd_winding_sweep);
    add("chern-sweep", "Chern phase diagram, or C over (theta2, gamma_x) when --theta1 is given", cmd_chern_sweep);
    add("critical-gamma", "closed-form exceptional point", cmd_critical);
    add("symmetry-check", "PT, exact-PT, PHS and CS diagnostics", cmd_symmetry);
    add("chain-spectrum", "spectrum and edge states of the two-region chain", cmd_chain);
    add("strip-bands", "band structure of the two-region strip", cmd_strip);
    add("figure", "write the data and script for one figure preset", cmd_figure);

    auto* s = subs["phase1d"];
    sweep_flags(s);
    range_flags(s, true);
    s->add_option("--nk", o.nk, "momentum samples");

    s = subs["winding"];
    walk1d_flags(s);
    s->add_option("--nk", o.nk, "momentum samples");
    s->add_option("--band", o.band, "lower or upper");

    s = subs["chern"];
    s->add_option("--theta1", o.theta1, "angle (radians or e.g. 7pi/6)");
    s->add_option("--theta2", o.theta2, "angle");
    s->add_option("--gamma-x", o.gamma_x, "loss along x");
    s->add_option("--gamma-y", o.gamma_y, "loss along y");
    s->add_option("--grid", o.grid, "momentum grid per direction");
    s->add_option("--band", o.band, "lower or upper");

    s = subs["winding-sweep"];
    sweep_flags(s);
    s->add_option("--theta1", o.theta1, "angle");
    theta2_range(s);
    s->add_option("--gamma-min", o.gamma_min);
    s->add_option("--gamma-max", o.gamma_max);
    s->add_option("--gamma-cells", o.gamma_cells);
    s->add_option("--nk", o.nk, "momentum samples");

    s = subs["chern-sweep"];
    sweep_flags(s);
    range_flags(s, true);
    s->add_option("--theta1", o.theta1, "fixed theta1: sweep gamma_x instead of theta1");
    s->add_option("--gamma-x-min", o.gamma_x_min);
    s->add_option("--gamma-x-max", o.gamma_x_max);
    s->add_option("--gamma-x-cells", o.gamma_x_cells);
    s->add_option("--gamma-y", o.gamma_y);
    s->add_option("--grid", o.grid, "momentum grid per direction");

    s = subs["critical-gamma"];
    s->add_option("--theta1", o.theta1, "angle");
    s->add_option("--theta2", o.theta2, "angle");
    s->add_option("--k0", o.k0, "channel momentum, 0 or pi (default: smallest over all channels)");
    s->add_option("--e0", o.e0, "channel quasi-energy, 0 or pi");

    s = subs["symmetry-check"];
    walk1d_flags(s);
    s->add_option("--gamma-x", o.gamma_x);
    s->add_option("--gamma-y", o.gamma_y);
    s->add_option("--dim", o.dim, "1 or 2");
    s->add_option("--nk", o.nk, "momentum samples per direction");
    s->add_option("--tol", o.tol, "pass threshold");

    s = subs["chain-spectrum"];
    s->add_option("--gamma", o.gamma);
    s->add_option("--sites", o.sites, "odd number of sites");
    s->add_option("--boundary", o.boundary, "L_B");
    s->add_option("--inner-theta1", o.inner1);
    s->add_option("--inner-theta2", o.inner2);
    s->add_option("--outer-theta1", o.outer1);
    s->add_option("--outer-theta2", o.outer2);
    s->add_option("--real-axis-tol", o.real_axis_tol);
    s->add_option("--output", o.output, "spectrum CSV path");
    s->add_option("--out", o.out_dir, "output directory");
    s->add_option("--prefix", o.prefix, "file stem");

    s = subs["strip-bands"];
    s->add_option("--gamma-x", o.gamma_x);
    s->add_option("--gamma-y", o.gamma_y);
    s->add_option("--sites", o.sites, "odd number of sites along y");
    s->add_option("--boundary", o.boundary, "L_B");
    s->add_option("--kx-samples", o.kx_samples);
    s->add_option("--out", o.out_dir, "output directory");
    s->add_option("--prefix", o.prefix, "file stem");
    s->add_option("--workers", o.workers);

    s = subs["figure"];
    s->add_option("id", o.figure, "2a, 2b, 3, 4, 5, 6, 7 or 8")->required();
    s->add_option("--out", o.out_dir, "output directory");
    s->add_option("--cells", o.cells, "override the parameter-grid size of sweep figures");
    s->add_option("--workers", o.workers);
  }

  void add(const std::string& name, const std::string& desc, int (*fn)(const Ctx&)) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--config", o.config, "JSON file with option values");
    s->add_flag("--json", o.json, "machine-readable output");
    subs[name] = s;
    handlers[s] = fn;
  }
  void walk1d_flags(CLI::App* s) {
    s->add_option("--theta1", o.theta1, "angle (radians or e.g. -3pi/8)");
    s->add_option("--theta2", o.theta2, "angle");
    s->add_option("--gamma", o.gamma, "loss/gain scaling");
    s->add_option("--phi", o.phi, "imaginary part of delta");
  }
  void sweep_flags(CLI::App* s) {
    s->add_option("--out", o.out_dir, "output directory");
    s->add_option("--prefix", o.prefix, "file stem");
    s->add_option("--checkpoint", o.checkpoint, "resumable checkpoint file");
    s->add_option("--workers", o.workers, "worker threads");
  }
  void theta2_range(CLI::App* s) {
    s->add_option("--theta2-min", o.theta2_min);
    s->add_option("--theta2-max", o.theta2_max);
    s->add_option("--theta2-cells", o.theta2_cells);
  }
  void range_flags(CLI::App* s, bool with_theta1) {
    if (with_theta1) {
      s->add_option("--theta1-min", o.theta1_min);
      s->add_option("--theta1-max", o.theta1_max);
      s->add_option("--theta1-cells", o.theta1_cells);
    }
    theta2_range(s);
  }
};

// Config keys are long option names without dashes; explicit flags win.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args, App& a) {
  std::string cfg;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") cfg = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) cfg = args[i].substr(9);
  if (cfg.empty() && !args.empty() && args.back().rfind("--config=", 0) == 0) cfg = args.back().substr(9);
  if (cfg.empty()) return args;
  const nlohmann::json j = load_config(cfg);
  std::vector<std::string> rest = args;
  std::string command;
  if (!rest.empty() && a.subs.count(rest.front())) {
    command = rest.front();
    rest.erase(rest.begin());
  }
  if (j.contains("command")) {
    const std::string c = j["command"].get<std::string>();
    if (!command.empty() && c != command) throw ValidationError("config command '" + c + "' does not match '" + command + "'");
    command = c;
  }
  if (!a.subs.count(command)) throw ValidationError("config: unknown or missing command");
  CLI::App* sub = a.subs[command];
  std::vector<std::string> out{command};
  for (const auto& [key, val] : j.items()) {
    if (key == "command") continue;
    if (key == "id" && command == "figure") {
      out.push_back(val.is_string() ? val.get<std::string>() : val.dump());
      continue;
    }
    if (key == "config" || !sub->get_option_no_throw("--" + key))
      throw ValidationError("config: unknown key '" + key + "' for command '" + command + "'");
    if (val.is_boolean()) {
      if (val.get<bool>()) out.push_back("--" + key);
    } else if (val.is_string()) {
      out.push_back("--" + key);
      out.push_back(val.get<std::string>());
    } else if (val.is_number()) {
      out.push_back("--" + key);
      out.push_back(val.dump());
    } else {
      throw ValidationError("config: value of '" + key + "' must be a string, number or boolean");
    }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  App a;
  const bool json = std::find(args.begin(), args.end(), "--json") != args.end();
  auto fail = [&](int code, const char* kind, const std::string& msg) {
    if (json)
      out << nlohmann::ordered_json{{"error", {{"kind", kind}, {"message", msg}, {"exit_code", code}}}}.dump() << '\n';
    else
      err << "error: " << msg << '\n';
    return code;
  };
  try {
    std::vector<std::string> merged = merge_config(args, a);
    std::reverse(merged.begin(), merged.end());
    try {
      a.app.parse(merged);
    } catch (const CLI::CallForHelp&) {
      out << a.app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << a.app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return 0;
      err << a.app.help();
      return fail(1, "usage", e.what());
    }
    for (auto& [sub, fn] : a.handlers)
      if (sub->parsed()) return fn({out, err, a.o});
    return fail(1, "usage", "no command given");
  } catch (const ValidationError& e) {
    return fail(1, "validation", e.what());
  } catch (const NumericalError& e) {
    return fail(2, "numerical", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(1, "validation", e.what());
  } catch (const std::exception& e) {
    return fail(2, "runtime", e.what());
  }
}

inline int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace qwalk::cli
