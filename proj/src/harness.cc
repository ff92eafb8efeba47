// Copyright 2026 The qudit2t Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qudit2t/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qudit2t/channels.h"
#include "qudit2t/fidelity_opt.h"

namespace q2t {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void config_fail(int line, const std::string& what) {
  if (line <= 0) throw std::invalid_argument("bad value: " + what);
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, int line) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) config_fail(line, "trailing characters in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    config_fail(line, "not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    config_fail(line, "number out of range: '" + s + "'");
  }
}

long parse_long(const std::string& s, int line) {
  double v = parse_double(s, line);
  if (v != std::floor(v)) config_fail(line, "expected an integer, got '" + s + "'");
  return static_cast<long>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

// Grid value syntax: "none" | "lo:step:hi" | "log:lo:hi:n" | "v1,v2,...".
std::vector<double> parse_grid(const std::string& value, int line) {
  if (value.empty() || value == "none") return {};
  if (value.rfind("log:", 0) == 0) {
    auto parts = split(value.substr(4), ':');
    if (parts.size() != 3) config_fail(line, "log grid wants log:lo:hi:n");
    return log_grid(parse_double(parts[0], line), parse_double(parts[1], line),
                    static_cast<int>(parse_long(parts[2], line)));
  }
  if (value.find(':') != std::string::npos) {
    auto parts = split(value, ':');
    if (parts.size() != 3) config_fail(line, "linear grid wants lo:step:hi");
    return linear_grid(parse_double(parts[0], line), parse_double(parts[2], line),
                       parse_double(parts[1], line));
  }
  std::vector<double> out;
  for (const auto& p : split(value, ',')) {
    if (!p.empty()) out.push_back(parse_double(p, line));
  }
  return out;
}

void require_increasing(const std::vector<double>& g, const char* name) {
  for (size_t i = 0; i + 1 < g.size(); i++) {
    if (!(g[i] < g[i + 1])) {
      throw std::invalid_argument(std::string(name) + " grid must be strictly increasing");
    }
  }
}

std::vector<double> capped_alpha_grid(const ExperimentConfig& cfg) {
  std::vector<double> g;
  for (double a : cfg.alpha_grid) {
    if (cfg.alpha_cap <= 0.0 || a <= cfg.alpha_cap + 1e-12) g.push_back(a);
  }
  if (g.empty()) throw std::invalid_argument("alpha cap removes every grid point");
  return g;
}

double loss_point_fidelity(const ExperimentConfig& cfg, double gamma, double alpha) {
  Encoding enc = make_code(cfg.code, alpha);
  // The gamma = 0 channel is the identity on the code span, where the
  // adjoint recovery is already perfect.
  if (gamma <= 0.0) return 1.0;
  ChannelRep noise = loss_superop(enc.basis, gamma);
  return optimal_recovery(encoding_choi(enc, noise.in_frame), noise, enc.d, cfg.scan).fidelity;
}

double dephasing_point_fidelity(const ExperimentConfig& cfg, double delta, double alpha,
                                const SolverSettings& settings) {
  Encoding enc = make_code(cfg.code, alpha);
  return fidelity_dephasing(enc, delta, cfg.trunc_n, settings, cfg.min_captured, cfg.support_tol)
      .fidelity;
}

AlphaSweep sweep_alpha_core(const ExperimentConfig& cfg, double rate, bool dephasing) {
  cfg.validate();
  const std::vector<double> grid = capped_alpha_grid(cfg);
  AlphaSweep sweep;
  sweep.points.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), cfg.workers, [&](int i) {
    SweepPoint& p = sweep.points[i];
    p.alpha = grid[i];
    try {
      p.fidelity = dephasing ? dephasing_point_fidelity(cfg, rate, grid[i], cfg.scan)
                             : loss_point_fidelity(cfg, rate, grid[i]);
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  });
  for (const auto& p : sweep.points) {
    if (p.ok && p.fidelity > sweep.best_fidelity) {
      sweep.best_fidelity = p.fidelity;
      sweep.best_alpha = p.alpha;
    }
  }
  return sweep;
}

RateSweep sweep_rate_core(const ExperimentConfig& cfg, bool dephasing) {
  cfg.validate();
  const std::vector<double>& rates = dephasing ? cfg.delta_grid : cfg.gamma_grid;
  RateSweep out;
  out.points.resize(rates.size());
  for (size_t i = 0; i < rates.size(); i++) {
    RatePoint& row = out.points[i];
    row.rate = rates[i];
    AlphaSweep scan = sweep_alpha_core(cfg, rates[i], dephasing);
    if (scan.best_fidelity <= 0.0) {
      for (const auto& p : scan.points) {
        if (!p.ok) {
          row.error = p.error;
          break;
        }
      }
      if (row.error.empty()) row.error = "no usable alpha point";
      continue;
    }
    double f = scan.best_fidelity;
    // Polish the scan argmax: a short recovery/encoding alternation for the
    // loss channel, a tighter re-solve for dephasing.
    if (cfg.refine_steps > 0 && rates[i] > 0.0) {
      try {
        if (dephasing) {
          f = std::max(f, dephasing_point_fidelity(cfg, rates[i], scan.best_alpha, cfg.refine));
        } else {
          Encoding enc = make_code(cfg.code, scan.best_alpha);
          ChannelRep noise = loss_superop(enc.basis, rates[i]);
          AlternationResult alt =
              alternate_optimize(enc, noise, cfg.refine_steps, cfg.refine, 1e-7);
          f = std::max(f, alt.trajectory.back());
        }
      } catch (const std::exception&) {
        // keep the scan value
      }
    }
    row.infidelity = 1.0 - f;
    row.best_alpha = scan.best_alpha;
    row.ok = true;
  }
  return out;
}

// Piecewise-linear interpolation of log(1-F) against log(rate); end segments
// extrapolate, which is exact for power-law data.
double interp_fidelity(const std::vector<double>& xs, const Eigen::VectorXd& fs, double x) {
  if (x <= 0.0) return 1.0;
  const int n = static_cast<int>(xs.size());
  if (n == 1) return fs(0);
  auto ly = [&](int i) { return std::log(std::max(1.0 - fs(i), 1e-15)); };
  const double lx = std::log(x);
  int k = 0;
  while (k + 2 < n && std::log(xs[k + 1]) < lx) k++;
  const double x0 = std::log(xs[k]), x1 = std::log(xs[k + 1]);
  const double t = (lx - x0) / (x1 - x0);
  return 1.0 - std::exp(ly(k) + t * (ly(k + 1) - ly(k)));
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// ---- svg helpers ----

struct AxisMap {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double px0 = 0.0, px1 = 1.0;

  double at(double v) const {
    double a = log ? std::log10(lo) : lo;
    double b = log ? std::log10(hi) : hi;
    double x = log ? std::log10(v) : v;
    if (b - a == 0.0) return 0.5 * (px0 + px1);
    return px0 + (x - a) / (b - a) * (px1 - px0);
  }
};

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string svg_head(const std::string& title, int w, int h) {
  std::ostringstream ss;
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  return ss.str();
}

void axis_range(const std::vector<double>& vals, bool log, double& lo, double& hi) {
  lo = 1e300;
  hi = -1e300;
  for (double v : vals) {
    if (log && v <= 0.0) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) {
    lo = log ? 1e-3 : 0.0;
    hi = 1.0;
  }
  if (lo == hi) {
    lo = log ? lo * 0.5 : lo - 0.5;
    hi = log ? hi * 2.0 : hi + 0.5;
  }
}

void svg_axes(std::ostringstream& ss, const AxisMap& xm, const AxisMap& ym) {
  ss << "<line x1=\"" << xm.px0 << "\" y1=\"" << ym.px1 << "\" x2=\"" << xm.px1 << "\" y2=\""
     << ym.px1 << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << xm.px0 << "\" y1=\"" << ym.px0 << "\" x2=\"" << xm.px0 << "\" y2=\""
     << ym.px1 << "\" stroke=\"black\"/>\n";
  char buf[64];
  for (int i = 0; i <= 4; i++) {
    double fx = i / 4.0;
    double vx = xm.log ? std::pow(10.0, std::log10(xm.lo) + fx * (std::log10(xm.hi) - std::log10(xm.lo)))
                       : xm.lo + fx * (xm.hi - xm.lo);
    double px = xm.px0 + fx * (xm.px1 - xm.px0);
    std::snprintf(buf, sizeof buf, "%.3g", vx);
    ss << "<text x=\"" << px << "\" y=\"" << ym.px1 + 18 << "\" text-anchor=\"middle\" font-size=\"10\">"
       << buf << "</text>\n";
    double vy = ym.log ? std::pow(10.0, std::log10(ym.lo) + fx * (std::log10(ym.hi) - std::log10(ym.lo)))
                       : ym.lo + fx * (ym.hi - ym.lo);
    double py = ym.px1 + fx * (ym.px0 - ym.px1);
    std::snprintf(buf, sizeof buf, "%.3g", vy);
    ss << "<text x=\"" << xm.px0 - 6 << "\" y=\"" << py + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
       << buf << "</text>\n";
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

std::string CodeSpec::label() const {
  if (kind == "qutrit") return "2T-qutrit";
  if (kind == "quoctit") return "2T-quoctit";
  if (kind == "psk") {
    return "psk[" + std::to_string(psk_d) + "," + std::to_string(psk_d * psk_n) + "]";
  }
  if (kind == "random") {
    return "random" + std::to_string(random_d) + "-seed" + std::to_string(random_seed);
  }
  return kind;
}

Encoding make_code(const CodeSpec& spec, double alpha) {
  if (spec.kind == "qutrit") return qutrit_logical(alpha);
  if (spec.kind == "quoctit") return quoctit_logical(alpha);
  if (spec.kind == "psk") return psk_encoding(spec.psk_d, spec.psk_n, alpha);
  if (spec.kind == "random") {
    return random_encoding(spec.random_d, group2t_constellation(alpha), spec.random_seed);
  }
  throw std::invalid_argument("unknown code kind '" + spec.kind + "'");
}

void ExperimentConfig::validate() const {
  if (code.kind != "qutrit" && code.kind != "quoctit" && code.kind != "psk" &&
      code.kind != "random") {
    throw std::invalid_argument("unknown code kind '" + code.kind + "'");
  }
  if (code.psk_d < 2 || code.psk_n < 1) throw std::invalid_argument("psk wants d >= 2, n >= 1");
  if (code.random_d < 2) throw std::invalid_argument("random code dimension must be >= 2");
  if (alpha_grid.empty()) throw std::invalid_argument("alpha grid is empty");
  require_increasing(alpha_grid, "alpha");
  require_increasing(gamma_grid, "gamma");
  require_increasing(delta_grid, "delta");
  for (double a : alpha_grid) {
    if (a <= 0.0) throw std::invalid_argument("alpha grid values must be positive");
  }
  for (double g : gamma_grid) {
    if (g < 0.0 || g >= 1.0) throw std::invalid_argument("gamma grid values must be in [0, 1)");
  }
  for (double d : delta_grid) {
    if (d < 0.0) throw std::invalid_argument("delta grid values must be nonnegative");
  }
  if (alpha_cap < 0.0) throw std::invalid_argument("alpha cap must be positive when present");
  if (!delta_grid.empty() && trunc_n < 1) throw std::invalid_argument("trunc_n must be >= 1");
  if (min_captured <= 0.0 || min_captured > 1.0) {
    throw std::invalid_argument("min_captured must lie in (0, 1]");
  }
  if (support_tol < 0.0) throw std::invalid_argument("support_tol must be nonnegative");
  auto check_solver = [](const SolverSettings& s, const char* name) {
    if (s.tol <= 0.0 || s.sigma <= 0.0 || s.max_iter < 1) {
      throw std::invalid_argument(std::string(name) + " solver settings are invalid");
    }
  };
  check_solver(scan, "scan");
  check_solver(refine, "refine");
  if (refine_steps < 0) throw std::invalid_argument("refine_steps must be nonnegative");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (t1 <= 0.0 || tphi <= 0.0) throw std::invalid_argument("lifetimes must be positive");
}

ExperimentConfig default_config(const CodeSpec& code) {
  ExperimentConfig cfg;
  cfg.code = code;
  cfg.alpha_grid = linear_grid(0.5, 4.0, 0.25);
  if (code.kind == "psk") {
    for (double a : linear_grid(4.5, 12.0, 0.5)) cfg.alpha_grid.push_back(a);
  }
  cfg.gamma_grid = log_grid(1e-3, 3e-1, 7);
  cfg.delta_grid = log_grid(1e-3, 1e-1, 5);
  cfg.trunc_n = 10;
  cfg.scan.tol = 1e-5;
  cfg.scan.sigma = 0.2;
  cfg.scan.max_iter = 20000;
  cfg.refine = cfg.scan;
  cfg.refine.max_iter = 30000;
  cfg.refine_steps = 2;
  return cfg;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (step <= 0.0 || hi < lo) throw std::invalid_argument("linear grid wants lo <= hi, step > 0");
  std::vector<double> out;
  for (int i = 0;; i++) {
    double v = lo + i * step;
    if (v > hi + 1e-9 * step) break;
    out.push_back(v);
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (lo <= 0.0 || hi <= lo || points < 2) {
    throw std::invalid_argument("log grid wants 0 < lo < hi and >= 2 points");
  }
  std::vector<double> out(points);
  for (int i = 0; i < points; i++) {
    out[i] = lo * std::pow(hi / lo, double(i) / (points - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> parse_grid_spec(const std::string& text) { return parse_grid(trim(text), 0); }

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg = default_config();
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    line++;
    std::string s = trim(raw);
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') config_fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) config_fail(line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    std::string qual = section.empty() ? key : section + "." + key;

    if (qual == "code.kind") {
      cfg.code.kind = value;
    } else if (qual == "code.psk") {
      auto parts = split(value, ',');
      if (parts.size() != 2) config_fail(line, "psk wants 'd,n'");
      cfg.code.psk_d = static_cast<int>(parse_long(parts[0], line));
      cfg.code.psk_n = static_cast<int>(parse_long(parts[1], line));
    } else if (qual == "code.random_d") {
      cfg.code.random_d = static_cast<int>(parse_long(value, line));
    } else if (qual == "code.random_seed") {
      cfg.code.random_seed = static_cast<std::uint64_t>(parse_long(value, line));
    } else if (qual == "grids.alpha") {
      cfg.alpha_grid = parse_grid(value, line);
    } else if (qual == "grids.gamma") {
      cfg.gamma_grid = parse_grid(value, line);
    } else if (qual == "grids.delta") {
      cfg.delta_grid = parse_grid(value, line);
    } else if (qual == "noise.trunc_n") {
      cfg.trunc_n = static_cast<int>(parse_long(value, line));
    } else if (qual == "noise.min_captured") {
      cfg.min_captured = parse_double(value, line);
    } else if (qual == "noise.support_tol") {
      cfg.support_tol = parse_double(value, line);
    } else if (qual == "solver.scan_tol") {
      cfg.scan.tol = parse_double(value, line);
    } else if (qual == "solver.scan_sigma") {
      cfg.scan.sigma = parse_double(value, line);
    } else if (qual == "solver.scan_max_iter") {
      cfg.scan.max_iter = static_cast<int>(parse_long(value, line));
    } else if (qual == "solver.refine_tol") {
      cfg.refine.tol = parse_double(value, line);
    } else if (qual == "solver.refine_sigma") {
      cfg.refine.sigma = parse_double(value, line);
    } else if (qual == "solver.refine_max_iter") {
      cfg.refine.max_iter = static_cast<int>(parse_long(value, line));
    } else if (qual == "solver.refine_steps") {
      cfg.refine_steps = static_cast<int>(parse_long(value, line));
    } else if (qual == "run.alpha_cap") {
      cfg.alpha_cap = parse_double(value, line);
    } else if (qual == "run.workers") {
      cfg.workers = static_cast<int>(parse_long(value, line));
    } else if (qual == "run.seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_long(value, line));
    } else if (qual == "run.out") {
      cfg.out_dir = value;
    } else if (qual == "run.t1") {
      cfg.t1 = parse_double(value, line);
    } else if (qual == "run.tphi") {
      cfg.tphi = parse_double(value, line);
    } else {
      config_fail(line, "unknown key '" + qual + "'");
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  return parse_config(in);
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  std::ostringstream ss;
  ss << "kind=" << cfg.code.kind << "\npsk=" << cfg.code.psk_d << "," << cfg.code.psk_n
     << "\nrandom=" << cfg.code.random_d << "," << cfg.code.random_seed << "\nalpha=";
  for (double v : cfg.alpha_grid) ss << format_num(v) << ",";
  ss << "\ngamma=";
  for (double v : cfg.gamma_grid) ss << format_num(v) << ",";
  ss << "\ndelta=";
  for (double v : cfg.delta_grid) ss << format_num(v) << ",";
  ss << "\ntrunc_n=" << cfg.trunc_n << "\nalpha_cap=" << format_num(cfg.alpha_cap)
     << "\nmin_captured=" << format_num(cfg.min_captured)
     << "\nsupport_tol=" << format_num(cfg.support_tol) << "\nscan=" << format_num(cfg.scan.tol)
     << "," << format_num(cfg.scan.sigma) << "," << cfg.scan.max_iter
     << "\nrefine=" << format_num(cfg.refine.tol) << "," << format_num(cfg.refine.sigma) << ","
     << cfg.refine.max_iter << "," << cfg.refine_steps << "\nworkers=" << cfg.workers
     << "\nseed=" << cfg.seed << "\nt1=" << format_num(cfg.t1)
     << "\ntphi=" << format_num(cfg.tphi) << "\n";
  return ss.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; i++) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  int count = std::min(workers, n);
  pool.reserve(count);
  for (int t = 0; t < count; t++) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

AlphaSweep sweep_alpha_loss(const ExperimentConfig& cfg, double gamma) {
  return sweep_alpha_core(cfg, gamma, false);
}

AlphaSweep sweep_alpha_dephasing(const ExperimentConfig& cfg, double delta) {
  return sweep_alpha_core(cfg, delta, true);
}

RateSweep sweep_gamma(const ExperimentConfig& cfg) { return sweep_rate_core(cfg, false); }

RateSweep sweep_delta(const ExperimentConfig& cfg) { return sweep_rate_core(cfg, true); }

FitResult fit_power_law(const std::vector<double>& rate, const std::vector<double>& infidelity) {
  if (rate.size() != infidelity.size()) {
    throw std::invalid_argument("fit_power_law: size mismatch");
  }
  std::vector<double> xs, ys, used;
  for (size_t i = 0; i < rate.size(); i++) {
    if (rate[i] > 0.0 && infidelity[i] > 0.0 && std::isfinite(infidelity[i])) {
      xs.push_back(std::log(rate[i]));
      ys.push_back(std::log(infidelity[i]));
      used.push_back(rate[i]);
    }
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("fit_power_law: need at least 3 usable points");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); i++) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) throw std::invalid_argument("fit_power_law: degenerate grid");
  FitResult fit;
  fit.b = (n * sxy - sx * sy) / denom;
  const double loga = (sy - fit.b * sx) / n;
  fit.a = std::exp(loga);
  double ss = 0.0;
  for (size_t i = 0; i < xs.size(); i++) {
    const double r = ys[i] - (loga + fit.b * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.grid = std::move(used);
  return fit;
}

double relative_infidelity(double f8, double f3) {
  if (f8 <= 0.0 || f8 > 1.0 || f3 <= 0.0 || f3 > 1.0) {
    throw std::domain_error("relative_infidelity: fidelities must lie in (0, 1]");
  }
  const double denom = 1.0 - std::pow(f3, std::log(8.0) / std::log(3.0));
  if (denom <= 0.0) {
    throw std::domain_error("relative_infidelity: undefined at f3 = 1");
  }
  return (1.0 - f8) / denom;
}

double qubit_equivalent_fidelity(double f, int d) {
  if (d < 2) throw std::domain_error("qubit_equivalent_fidelity: d must be >= 2");
  if (f < 0.0 || f > 1.0) throw std::domain_error("qubit_equivalent_fidelity: f outside [0, 1]");
  return std::pow(f, 1.0 / std::log2(double(d)));
}

CombinedSurface combined_surface(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.gamma_grid.empty() || cfg.delta_grid.empty()) {
    throw std::invalid_argument("combined surface needs gamma and delta grids");
  }
  CombinedSurface s;
  s.gamma = cfg.gamma_grid;
  s.delta = cfg.delta_grid;
  s.alpha = capped_alpha_grid(cfg);
  const int ng = static_cast<int>(s.gamma.size());
  const int nd = static_cast<int>(s.delta.size());
  const int na = static_cast<int>(s.alpha.size());
  s.loss_f.resize(ng, na);
  s.deph_f.resize(nd, na);

  parallel_for(ng * na, cfg.workers, [&](int idx) {
    const int i = idx / na, j = idx % na;
    s.loss_f(i, j) = loss_point_fidelity(cfg, s.gamma[i], s.alpha[j]);
  });
  parallel_for(nd * na, cfg.workers, [&](int idx) {
    const int k = idx / na, j = idx % na;
    try {
      s.deph_f(k, j) = dephasing_point_fidelity(cfg, s.delta[k], s.alpha[j], cfg.scan);
    } catch (const std::exception&) {
      s.deph_f(k, j) = std::numeric_limits<double>::quiet_NaN();
    }
  });

  s.f.resize(ng, nd);
  s.best_alpha.resize(ng, nd);
  for (int i = 0; i < ng; i++) {
    for (int k = 0; k < nd; k++) {
      double best = -1.0, best_a = 0.0;
      for (int j = 0; j < na; j++) {
        const double v = s.loss_f(i, j) * s.deph_f(k, j);
        if (std::isfinite(v) && v > best) {
          best = v;
          best_a = s.alpha[j];
        }
      }
      if (best < 0.0) throw std::runtime_error("combined surface: no usable alpha column");
      s.f(i, k) = best;
      s.best_alpha(i, k) = best_a;
    }
  }
  return s;
}

double surface_fidelity(const CombinedSurface& s, double gamma, double delta) {
  double best = -1.0;
  for (int j = 0; j < static_cast<int>(s.alpha.size()); j++) {
    if (!s.deph_f.col(j).array().isFinite().all()) continue;
    const double v =
        interp_fidelity(s.gamma, s.loss_f.col(j), gamma) * interp_fidelity(s.delta, s.deph_f.col(j), delta);
    best = std::max(best, v);
  }
  if (best < 0.0) throw std::runtime_error("surface_fidelity: no usable alpha column");
  return best;
}

double cycle_time_for_fidelity(const CombinedSurface& s, double t1, double tphi, double target_f) {
  auto f_at = [&](double t) {
    const NoiseRates r = lifetimes_to_rates(t, t1, tphi);
    return surface_fidelity(s, r.gamma, r.delta);
  };
  double lo = 1e-7, hi = 1e-1;
  if (f_at(lo) < target_f) return 0.0;
  if (f_at(hi) >= target_f) return hi;
  for (int it = 0; it < 100; it++) {
    const double mid = std::sqrt(lo * hi);
    if (f_at(mid) >= target_f) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ostringstream ss;
  for (size_t i = 0; i < table.header.size(); i++) {
    if (i) ss << ',';
    ss << csv_cell(table.header[i]);
  }
  ss << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw std::invalid_argument("write_csv: row width differs from header");
    }
    for (size_t i = 0; i < row.size(); i++) {
      if (i) ss << ',';
      ss << csv_cell(row[i]);
    }
    ss << '\n';
  }
  write_text_file(path, ss.str());
}

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series, bool log_x, bool log_y) {
  const int w = 720, h = 480;
  AxisMap xm, ym;
  xm.log = log_x;
  ym.log = log_y;
  xm.px0 = 70;
  xm.px1 = w - 25;
  ym.px0 = 40;  // top
  ym.px1 = h - 50;
  std::vector<double> all_x, all_y;
  for (const auto& s : series) {
    all_x.insert(all_x.end(), s.x.begin(), s.x.end());
    all_y.insert(all_y.end(), s.y.begin(), s.y.end());
  }
  axis_range(all_x, log_x, xm.lo, xm.hi);
  axis_range(all_y, log_y, ym.lo, ym.hi);

  std::ostringstream ss;
  ss << svg_head(title, w, h);
  svg_axes(ss, xm, ym);
  for (size_t si = 0; si < series.size(); si++) {
    const auto& s = series[si];
    const char* color = kPalette[si % 6];
    std::ostringstream pts;
    for (size_t i = 0; i < s.x.size(); i++) {
      if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
      const double px = xm.at(s.x[i]);
      const double py = ym.px1 - (ym.at(s.y[i]) - ym.px0);
      pts << px << "," << py << " ";
      ss << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"2.5\" fill=\"" << color
         << "\"/>\n";
    }
    ss << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\"/>\n";
    ss << "<text x=\"" << xm.px0 + 10 << "\" y=\"" << 55 + 16 * si << "\" font-size=\"12\" fill=\""
       << color << "\">" << s.name << "</text>\n";
  }
  ss << "</svg>\n";
  write_text_file(path, ss.str());
}

void write_svg_scatter(const std::string& path, const std::string& title,
                       const std::vector<SvgSeries>& series) {
  const int w = 520, h = 520;
  AxisMap xm, ym;
  xm.px0 = 60;
  xm.px1 = w - 20;
  ym.px0 = 40;
  ym.px1 = h - 45;
  std::vector<double> all;
  for (const auto& s : series) {
    all.insert(all.end(), s.x.begin(), s.x.end());
    all.insert(all.end(), s.y.begin(), s.y.end());
  }
  double lo, hi;
  axis_range(all, false, lo, hi);
  const double pad = 0.08 * (hi - lo);
  xm.lo = ym.lo = lo - pad;
  xm.hi = ym.hi = hi + pad;

  std::ostringstream ss;
  ss << svg_head(title, w, h);
  svg_axes(ss, xm, ym);
  for (size_t si = 0; si < series.size(); si++) {
    const auto& s = series[si];
    const char* color = kPalette[si % 6];
    for (size_t i = 0; i < s.x.size(); i++) {
      const double px = xm.at(s.x[i]);
      const double py = ym.px1 - (ym.at(s.y[i]) - ym.px0);
      if (si % 2 == 0) {
        ss << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"4\" fill=\"none\" stroke=\""
           << color << "\"/>\n";
      } else {
        ss << "<path d=\"M" << px - 4 << " " << py << " H" << px + 4 << " M" << px << " "
           << py - 4 << " V" << py + 4 << "\" stroke=\"" << color << "\"/>\n";
      }
    }
    ss << "<text x=\"" << xm.px0 + 10 << "\" y=\"" << 55 + 16 * si << "\" font-size=\"12\" fill=\""
       << color << "\">" << s.name << "</text>\n";
  }
  ss << "</svg>\n";
  write_text_file(path, ss.str());
}

void write_svg_heatmap(const std::string& path, const std::string& title,
                       const std::vector<double>& xs, const std::vector<double>& ys,
                       const Eigen::MatrixXd& values, const SvgSeries& overlay) {
  const int w = 640, h = 520;
  AxisMap xm, ym;
  xm.log = ym.log = true;
  xm.px0 = 70;
  xm.px1 = w - 30;
  ym.px0 = 40;
  ym.px1 = h - 50;
  axis_range(xs, true, xm.lo, xm.hi);
  axis_range(ys, true, ym.lo, ym.hi);
  const double vmin = values.minCoeff(), vmax = values.maxCoeff();

  auto color_of = [&](double v) {
    double t = vmax > vmin ? (v - vmin) / (vmax - vmin) : 0.5;
    // dark violet -> teal -> yellow ramp
    const double stops[3][3] = {{68, 1, 84}, {49, 104, 142}, {253, 231, 37}};
    const double seg = t < 0.5 ? 0 : 1;
    const double u = t < 0.5 ? t * 2.0 : (t - 0.5) * 2.0;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  int(stops[int(seg)][0] + u * (stops[int(seg) + 1][0] - stops[int(seg)][0])),
                  int(stops[int(seg)][1] + u * (stops[int(seg) + 1][1] - stops[int(seg)][1])),
                  int(stops[int(seg)][2] + u * (stops[int(seg) + 1][2] - stops[int(seg)][2])));
    return std::string(buf);
  };
  // cell edges at geometric midpoints of the grid
  auto edges = [](const std::vector<double>& g) {
    std::vector<double> e(g.size() + 1);
    e[0] = g[0] * std::sqrt(g[0] / (g.size() > 1 ? g[1] : g[0] * 4.0));
    for (size_t i = 1; i < g.size(); i++) e[i] = std::sqrt(g[i - 1] * g[i]);
    e[g.size()] = g.back() * std::sqrt(g.back() / g[g.size() > 1 ? g.size() - 2 : 0]);
    return e;
  };
  const auto ex = edges(xs), ey = edges(ys);

  std::ostringstream ss;
  ss << svg_head(title + "  [" + format_num(vmin) + ", " + format_num(vmax) + "]", w, h);
  for (size_t i = 0; i < xs.size(); i++) {
    for (size_t k = 0; k < ys.size(); k++) {
      const double x0 = xm.at(std::max(ex[i], xm.lo)), x1 = xm.at(std::min(ex[i + 1], xm.hi));
      const double ya = ym.at(std::max(ey[k], ym.lo)), yb = ym.at(std::min(ey[k + 1], ym.hi));
      const double y1 = ym.px1 - (ya - ym.px0), y0 = ym.px1 - (yb - ym.px0);
      ss << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0 << "\" height=\""
         << y1 - y0 << "\" fill=\"" << color_of(values(i, k)) << "\"/>\n";
    }
  }
  svg_axes(ss, xm, ym);
  if (!overlay.x.empty()) {
    std::ostringstream pts;
    for (size_t i = 0; i < overlay.x.size(); i++) {
      if (overlay.x[i] < xm.lo || overlay.x[i] > xm.hi || overlay.y[i] < ym.lo ||
          overlay.y[i] > ym.hi) {
        continue;
      }
      pts << xm.at(overlay.x[i]) << "," << ym.px1 - (ym.at(overlay.y[i]) - ym.px0) << " ";
    }
    ss << "<polyline points=\"" << pts.str()
       << "\" fill=\"none\" stroke=\"white\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n"
       << "<text x=\"" << xm.px1 - 10 << "\" y=\"55\" text-anchor=\"end\" font-size=\"12\" "
       << "fill=\"black\">" << overlay.name << "</text>\n";
  }
  ss << "</svg>\n";
  write_text_file(path, ss.str());
}

std::string run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  auto at = [&](const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); };

  nlohmann::json manifest;
  manifest["label"] = cfg.code.label();
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_fingerprint(cfg))));
  manifest["config_fnv64"] = hex;
  manifest["seed"] = cfg.seed;
  std::vector<std::string> files;

  auto emit_rate_sweep = [&](const RateSweep& sweep, const std::string& rate_name,
                             const std::string& base) {
    CsvTable t;
    t.header = {rate_name, "infidelity", "best_alpha", "ok", "error"};
    SvgSeries line{cfg.code.label(), {}, {}};
    std::vector<double> rates, infids;
    for (const auto& p : sweep.points) {
      t.rows.push_back({format_num(p.rate), format_num(p.infidelity), format_num(p.best_alpha),
                        p.ok ? "1" : "0", p.error});
      if (p.ok) {
        rates.push_back(p.rate);
        infids.push_back(p.infidelity);
        if (p.rate > 0.0 && p.infidelity > 0.0) {
          line.x.push_back(p.rate);
          line.y.push_back(p.infidelity);
        }
      }
    }
    write_csv(at(base + ".csv"), t);
    files.push_back(base + ".csv");
    write_svg_lines(at(base + ".svg"), "min infidelity vs " + rate_name, {line}, true, true);
    files.push_back(base + ".svg");
    try {
      const FitResult fit = fit_power_law(rates, infids);
      manifest[base + "_fit"] = {{"a", fit.a}, {"b", fit.b}, {"residual", fit.residual}};
    } catch (const std::exception&) {
      // too few usable points; the CSV still records them
    }
  };

  if (!cfg.gamma_grid.empty()) {
    emit_rate_sweep(sweep_gamma(cfg), "gamma", "loss_sweep");
  }
  if (!cfg.delta_grid.empty()) {
    emit_rate_sweep(sweep_delta(cfg), "delta", "dephasing_sweep");
  }
  if (!cfg.gamma_grid.empty() && !cfg.delta_grid.empty()) {
    const CombinedSurface s = combined_surface(cfg);
    CsvTable t;
    t.header = {"gamma", "delta", "fidelity", "best_alpha"};
    for (size_t i = 0; i < s.gamma.size(); i++) {
      for (size_t k = 0; k < s.delta.size(); k++) {
        t.rows.push_back({format_num(s.gamma[i]), format_num(s.delta[k]), format_num(s.f(i, k)),
                          format_num(s.best_alpha(i, k))});
      }
    }
    write_csv(at("combined_surface.csv"), t);
    files.push_back("combined_surface.csv");

    SvgSeries life{"lifetime line", {}, {}};
    for (double logt = -7.0; logt <= -1.0; logt += 0.1) {
      const NoiseRates r = lifetimes_to_rates(std::pow(10.0, logt), cfg.t1, cfg.tphi);
      life.x.push_back(r.gamma);
      life.y.push_back(r.delta);
    }
    write_svg_heatmap(at("combined_surface.svg"), "F(gamma, delta)", s.gamma, s.delta, s.f, life);
    files.push_back("combined_surface.svg");
    manifest["cycle_time_s_at_f090"] = cycle_time_for_fidelity(s, cfg.t1, cfg.tphi, 0.9);
  }

  nlohmann::json flist = nlohmann::json::array();
  for (const auto& name : files) {
    std::ifstream in(at(name), std::ios::binary);
    std::ostringstream data;
    data << in.rdbuf();
    char fhex[32];
    std::snprintf(fhex, sizeof fhex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data.str())));
    flist.push_back({{"path", name}, {"bytes", data.str().size()}, {"fnv64", fhex}});
  }
  manifest["files"] = flist;
  const std::string mpath = at("manifest.json");
  write_text_file(mpath, manifest.dump(2) + "\n");
  return mpath;
}

}  // namespace q2t
