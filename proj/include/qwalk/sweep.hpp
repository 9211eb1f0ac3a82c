#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "invariants.hpp"
#include "json.hpp"
#include "parallel.hpp"

namespace qwalk {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr double kGapTol = 1e-9;

enum class CellStatus : std::uint8_t { Ok = 0, GapClosed = 1, Error = 2 };

inline const char* status_name(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::GapClosed: return "gap_closed";
    case CellStatus::Error: return "error";
  }
  return "error";
}

inline CellStatus status_from_name(const std::string& s) {
  if (s == "ok") return CellStatus::Ok;
  if (s == "gap_closed") return CellStatus::GapClosed;
  if (s == "error") return CellStatus::Error;
  throw ValidationError("unknown cell status '" + s + "'");
}

struct Axis {
  std::string name;
  std::vector<double> values;
};

// Curve over one axis drawn on top of a table (e.g. critical gamma lines).
struct Overlay {
  std::string name;
  std::string axis;
  std::vector<double> values;
};

struct SweepTable {
  std::vector<Axis> axes;
  std::vector<double> values;
  std::vector<CellStatus> status;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  std::vector<Overlay> overlays;

  std::size_t cell_count() const {
    std::size_t n = 1;
    for (const Axis& a : axes) n *= a.values.size();
    return n;
  }
  std::vector<std::size_t> unravel(std::size_t flat) const {
    std::vector<std::size_t> idx(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
      idx[d] = flat % axes[d].values.size();
      flat /= axes[d].values.size();
    }
    return idx;
  }
  std::vector<double> coords(std::size_t flat) const {
    const auto idx = unravel(flat);
    std::vector<double> c(idx.size());
    for (std::size_t d = 0; d < idx.size(); ++d) c[d] = axes[d].values[idx[d]];
    return c;
  }
};

inline bool operator==(const Axis& a, const Axis& b) { return a.name == b.name && a.values == b.values; }
inline bool operator==(const Overlay& a, const Overlay& b) {
  return a.name == b.name && a.axis == b.axis && a.values.size() == b.values.size() &&
         std::equal(a.values.begin(), a.values.end(), b.values.begin(),
                    [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); });
}

// Bitwise equality; NaN cells compare equal to NaN.
inline bool same_table(const SweepTable& a, const SweepTable& b) {
  if (!(a.axes == b.axes) || a.status != b.status || a.meta != b.meta || !(a.overlays == b.overlays)) return false;
  if (a.values.size() != b.values.size()) return false;
  return std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

struct CellResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  CellStatus status = CellStatus::Ok;
};

struct SweepOptions {
  int workers = 0;             // 0: QWALK_WORKERS or logical cores
  std::string checkpoint;      // empty: no checkpointing
  long row_budget = -1;        // stop after this many new rows (testing interrupted runs)
};

struct SweepOutcome {
  SweepTable table;
  bool complete = false;
  std::size_t rows_computed = 0;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ValidationError("linspace: count must be positive");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t config_hash(const std::vector<Axis>& axes, const nlohmann::ordered_json& meta) {
  nlohmann::ordered_json j;
  for (const Axis& a : axes) j["axes"].push_back({{"name", a.name}, {"values", a.values}});
  j["meta"] = meta;
  return fnv1a(j.dump());
}

// Checkpoint file, little-endian:
//   char[8]  magic "QWCKPT01"
//   u32      format version (1)
//   u64      config hash (FNV-1a of axes + meta)
//   u64      rows, u64 cols
//   u8[ceil(rows/8)]  completed-row bitmap, bit r%8 of byte r/8
//   rows*cols records of {f64 value, u8 status}
namespace checkpoint {

inline constexpr char kMagic[8] = {'Q', 'W', 'C', 'K', 'P', 'T', '0', '1'};
inline constexpr std::uint32_t kFormat = 1;

template <class T>
void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ValidationError("checkpoint: truncated file");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

struct State {
  std::uint64_t hash = 0;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<bool> done;
  std::vector<double> values;
  std::vector<CellStatus> status;
};

inline std::string encode(const State& s) {
  std::string out(kMagic, 8);
  put(out, kFormat);
  put(out, s.hash);
  put(out, s.rows);
  put(out, s.cols);
  std::string bitmap((s.rows + 7) / 8, '\0');
  for (std::size_t r = 0; r < s.rows; ++r)
    if (s.done[r]) bitmap[r / 8] = static_cast<char>(bitmap[r / 8] | (1 << (r % 8)));
  out += bitmap;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    put(out, s.values[i]);
    put(out, static_cast<std::uint8_t>(s.status[i]));
  }
  return out;
}

inline State decode(const std::string& in) {
  if (in.size() < 8 || std::memcmp(in.data(), kMagic, 8) != 0) throw ValidationError("checkpoint: bad magic");
  std::size_t pos = 8;
  if (get<std::uint32_t>(in, pos) != kFormat) throw ValidationError("checkpoint: unsupported format version");
  State s;
  s.hash = get<std::uint64_t>(in, pos);
  s.rows = get<std::uint64_t>(in, pos);
  s.cols = get<std::uint64_t>(in, pos);
  const std::size_t nb = (s.rows + 7) / 8;
  if (pos + nb > in.size()) throw ValidationError("checkpoint: truncated file");
  s.done.resize(s.rows);
  for (std::size_t r = 0; r < s.rows; ++r) s.done[r] = (static_cast<unsigned char>(in[pos + r / 8]) >> (r % 8)) & 1;
  pos += nb;
  const std::size_t n = s.rows * s.cols;
  s.values.resize(n);
  s.status.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.values[i] = get<double>(in, pos);
    const auto st = get<std::uint8_t>(in, pos);
    if (st > 2) throw ValidationError("checkpoint: bad status byte");
    s.status[i] = static_cast<CellStatus>(st);
  }
  if (pos != in.size()) throw ValidationError("checkpoint: trailing bytes");
  return s;
}

inline void save(const std::string& path, const State& s) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write checkpoint '" + tmp + "'");
    const std::string bytes = encode(s);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("cannot write checkpoint '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline State load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read checkpoint '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode(bytes);
}

}  // namespace checkpoint

using CellFn = std::function<CellResult(const std::vector<double>&)>;

// Rows run along the first axis; each row is computed by one worker and
// checkpointed as soon as it completes.
inline SweepOutcome run_sweep(std::vector<Axis> axes, nlohmann::ordered_json meta, const CellFn& cell,
                              const SweepOptions& opt = {}) {
  if (axes.empty()) throw ValidationError("sweep needs at least one axis");
  for (const Axis& a : axes)
    if (a.values.empty()) throw ValidationError("sweep axis '" + a.name + "' is empty");
  SweepOutcome out;
  SweepTable& t = out.table;
  t.axes = std::move(axes);
  t.meta = std::move(meta);
  const std::size_t n = t.cell_count();
  const std::size_t rows = t.axes.front().values.size();
  const std::size_t cols = n / rows;
  t.values.assign(n, std::numeric_limits<double>::quiet_NaN());
  t.status.assign(n, CellStatus::Error);

  checkpoint::State ck{config_hash(t.axes, t.meta), rows, cols, std::vector<bool>(rows, false), {}, {}};
  if (!opt.checkpoint.empty() && std::filesystem::exists(opt.checkpoint)) {
    checkpoint::State prev = checkpoint::load(opt.checkpoint);
    if (prev.hash != ck.hash || prev.rows != rows || prev.cols != cols)
      throw ValidationError("checkpoint '" + opt.checkpoint + "' belongs to a different configuration");
    ck = std::move(prev);
    for (std::size_t r = 0; r < rows; ++r)
      if (ck.done[r])
        for (std::size_t c = 0; c < cols; ++c) {
          t.values[r * cols + c] = ck.values[r * cols + c];
          t.status[r * cols + c] = ck.status[r * cols + c];
        }
  }
  ck.values = t.values;
  ck.status = t.status;

  std::vector<std::size_t> pending;
  for (std::size_t r = 0; r < rows; ++r)
    if (!ck.done[r]) pending.push_back(r);
  std::size_t todo = pending.size();
  if (opt.row_budget >= 0) todo = std::min<std::size_t>(todo, static_cast<std::size_t>(opt.row_budget));

  std::mutex mu;
  parallel_for(
      todo,
      [&](std::size_t i) {
        const std::size_t r = pending[i];
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t flat = r * cols + c;
          CellResult res;
          try {
            res = cell(t.coords(flat));
          } catch (const GapClosed&) {
            res = {std::numeric_limits<double>::quiet_NaN(), CellStatus::GapClosed};
          } catch (const std::exception&) {
            res = {std::numeric_limits<double>::quiet_NaN(), CellStatus::Error};
          }
          t.values[flat] = res.value;
          t.status[flat] = res.status;
        }
        std::lock_guard lock(mu);
        for (std::size_t c = 0; c < cols; ++c) {
          ck.values[r * cols + c] = t.values[r * cols + c];
          ck.status[r * cols + c] = t.status[r * cols + c];
        }
        ck.done[r] = true;
        if (!opt.checkpoint.empty()) checkpoint::save(opt.checkpoint, ck);
      },
      opt.workers);

  out.rows_computed = todo;
  out.complete = std::all_of(ck.done.begin(), ck.done.end(), [](bool b) { return b; });
  return out;
}

inline nlohmann::ordered_json base_meta(const std::string& model) {
  nlohmann::ordered_json m;
  m["model"] = model;
  m["version"] = kVersion;
  m["gap_tol"] = kGapTol;
  return m;
}

// Smallest |lambda+ - lambda-| over the grid and the k = 0 closing point.
inline double min_gap_1d(const WalkParams1D& p, const BandPair1D& b) {
  return std::min(b.min_gap, split_bands(u1d_ssqw_k(p, 0.0)).gap);
}

// Same for the 2D walk: odd reduced grids skip the high-symmetry points
// kx, ky in {-pi/2, 0}, where gapless lines (e.g. theta2 = 0) pass.
inline double min_gap_2d(const WalkParams2D& p, const BandData2D& b) {
  double g = b.min_gap;
  for (double kx : {-pi / 2, 0.0})
    for (double ky : {-pi / 2, 0.0}) g = std::min(g, split_bands(u2d_k(p, kx, ky)).gap);
  return g;
}

inline CellResult winding_cell(const WalkParams1D& p, int n_k) {
  const BandPair1D b = band_spectrum_1d(p, n_k);
  if (min_gap_1d(p, b) < kGapTol) return {std::numeric_limits<double>::quiet_NaN(), CellStatus::GapClosed};
  return {winding_number(b.lower).w, CellStatus::Ok};
}

inline CellResult chern_cell(const WalkParams2D& p, int n) {
  const BandData2D b = band_spectrum_2d(p, n, Band::Lower);
  if (min_gap_2d(p, b) < kGapTol) return {std::numeric_limits<double>::quiet_NaN(), CellStatus::GapClosed};
  return {static_cast<double>(chern_number(b).c), CellStatus::Ok};
}

inline SweepOutcome sweep_phase_diagram_1d(const Axis& theta1, const Axis& theta2, int n_k,
                                           const SweepOptions& opt = {}) {
  auto meta = base_meta("ssqw1d-winding");
  meta["gamma"] = 0.0;
  meta["n_k"] = n_k;
  meta["band"] = "lower";
  return run_sweep({theta1, theta2}, meta,
                   [n_k](const std::vector<double>& c) { return winding_cell({c[0], c[1], 0.0}, n_k); }, opt);
}

inline Overlay critical_overlay(double theta1, const Axis& theta2, Channel ch, const std::string& name) {
  Overlay o{name, theta2.name, {}};
  for (double t2 : theta2.values) {
    double g = std::numeric_limits<double>::quiet_NaN();
    try {
      const CriticalGamma c = critical_gamma(theta1, t2, ch);
      if (c.kind == CriticalKind::RealCritical) g = c.gamma_c;
    } catch (const DegenerateCoin&) {
    }
    o.values.push_back(g);
  }
  return o;
}

inline SweepOutcome sweep_winding_vs_gamma(double theta1, const Axis& theta2, const Axis& gamma, int n_k,
                                           const SweepOptions& opt = {}) {
  auto meta = base_meta("ssqw1d-winding");
  meta["theta1"] = theta1;
  meta["n_k"] = n_k;
  meta["band"] = "lower";
  SweepOutcome out = run_sweep(
      {theta2, gamma}, meta,
      [theta1, n_k](const std::vector<double>& c) { return winding_cell({theta1, c[0], c[1]}, n_k); }, opt);
  out.table.overlays.push_back(critical_overlay(theta1, theta2, {0, 0}, "gamma_c_k0_E0"));
  out.table.overlays.push_back(critical_overlay(theta1, theta2, {pi, 0}, "gamma_c_kpi_E0"));
  return out;
}

inline SweepOutcome winding_sweep(double theta1, const Axis& theta2, const Axis& gamma, int n_points,
                                  const SweepOptions& opt = {}) {
  return sweep_winding_vs_gamma(theta1, theta2, gamma, n_points, opt);
}

inline SweepOutcome sweep_chern_2d(const Axis& theta1, const Axis& theta2, int grid, const SweepOptions& opt = {}) {
  auto meta = base_meta("dtqw2d-chern");
  meta["gamma_x"] = 0.0;
  meta["gamma_y"] = 0.0;
  meta["grid"] = grid;
  meta["band"] = "lower";
  return run_sweep({theta1, theta2}, meta,
                   [grid](const std::vector<double>& c) { return chern_cell({c[0], c[1], 0.0, 0.0}, grid); }, opt);
}

inline SweepOutcome sweep_chern_vs_gamma(double theta1, const Axis& theta2, const Axis& gamma_x, double gamma_y,
                                         int grid, const SweepOptions& opt = {}) {
  auto meta = base_meta("dtqw2d-chern");
  meta["theta1"] = theta1;
  meta["gamma_y"] = gamma_y;
  meta["grid"] = grid;
  meta["band"] = "lower";
  return run_sweep({theta2, gamma_x}, meta,
                   [theta1, gamma_y, grid](const std::vector<double>& c) {
                     return chern_cell({theta1, c[0], c[1], gamma_y}, grid);
                   },
                   opt);
}

}  // namespace qwalk
