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

#ifndef QUDIT2T_HARNESS_H
#define QUDIT2T_HARNESS_H

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qudit2t/codes.h"
#include "qudit2t/conic_solver.h"

namespace q2t {

// Which family of codes a sweep runs over.
struct CodeSpec {
  std::string kind = "quoctit";  // quoctit | qutrit | psk | random
  int psk_d = 8;
  int psk_n = 2;
  int random_d = 8;
  std::uint64_t random_seed = 1;

  std::string label() const;
};

Encoding make_code(const CodeSpec& spec, double alpha);

struct ExperimentConfig {
  CodeSpec code;
  std::vector<double> alpha_grid;
  std::vector<double> gamma_grid;
  std::vector<double> delta_grid;
  int trunc_n = 10;
  double alpha_cap = 0.0;  // 0 disables the cap
  double min_captured = 0.95;
  double support_tol = 1e-8;
  SolverSettings scan;    // per-grid-point solves
  SolverSettings refine;  // alternation at the scan argmax
  int refine_steps = 2;   // alternation double-steps; 0 = recovery scan only
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  double t1 = 15.6e-3;    // seconds; parameterizes the lifetime line
  double tphi = 43.2e-3;  // seconds

  void validate() const;  // throws std::invalid_argument with a description
};

// Grids sized for a desk run: alpha 0.5..4.0 step 0.25 (extended to 12.0 for
// PSK codes), gamma 7 log points in 1e-3..3e-1, delta 5 log points in
// 1e-3..1e-1.
ExperimentConfig default_config(const CodeSpec& code = {});

std::vector<double> linear_grid(double lo, double hi, double step);
std::vector<double> log_grid(double lo, double hi, int points);

// Grid syntax used by config values and CLI flags: "none", "lo:step:hi",
// "log:lo:hi:n", or a comma list. Throws std::invalid_argument.
std::vector<double> parse_grid_spec(const std::string& text);

// Flat key = value file with [section] headers and '#' comments.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical text form of a config; its hash names the run in the manifest.
std::string config_fingerprint(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(const std::string& text);

// Runs fn(0..n-1) on a bounded pool; with workers <= 1 it loops inline.
// Callers write results into index-addressed slots, so the outcome does not
// depend on completion order.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// One optimized point of an alpha sweep.
struct SweepPoint {
  double alpha = 0.0;
  double fidelity = 0.0;
  bool ok = false;
  std::string error;
};

struct AlphaSweep {
  std::vector<SweepPoint> points;
  double best_alpha = 0.0;
  double best_fidelity = 0.0;
};

// Best recovery fidelity per alpha for the pure-loss (resp. dephasing)
// channel; reports the argmax over the usable points.
AlphaSweep sweep_alpha_loss(const ExperimentConfig& cfg, double gamma);
AlphaSweep sweep_alpha_dephasing(const ExperimentConfig& cfg, double delta);

// One row of a rate sweep: noise rate, min infidelity, alpha at the min.
struct RatePoint {
  double rate = 0.0;
  double infidelity = 1.0;
  double best_alpha = 0.0;
  bool ok = false;
  std::string error;
};

struct RateSweep {
  std::vector<RatePoint> points;
};

// Per-gamma (resp. per-delta) inner alpha optimization. The loss sweep
// follows the scan argmax with a short recovery/encoding alternation; the
// dephasing sweep re-solves the argmax at the refine tolerance.
RateSweep sweep_gamma(const ExperimentConfig& cfg);
RateSweep sweep_delta(const ExperimentConfig& cfg);

// Least-squares fit of 1 - F = a * rate^b on the log-log scale.
struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;        // rms log-residual
  std::vector<double> grid;     // rates actually used
};

FitResult fit_power_law(const std::vector<double>& rate, const std::vector<double>& infidelity);

// (1 - f8) / (1 - f3^(log_3 8)): infidelity of the d=8 code relative to the
// equivalent stack of d=3 codes. Throws std::domain_error when f3 = 1.
double relative_infidelity(double f8, double f3);
// f^(1 / log2 d): per-qubit fidelity equivalent of a d-level fidelity.
double qubit_equivalent_fidelity(double f, int d);

struct CombinedSurface {
  std::vector<double> gamma, delta, alpha;
  Eigen::MatrixXd loss_f;      // gamma x alpha
  Eigen::MatrixXd deph_f;      // delta x alpha
  Eigen::MatrixXd f;           // gamma x delta, max over alpha of the product
  Eigen::MatrixXd best_alpha;  // gamma x delta
};

// Product model over a common alpha grid: F(gamma, delta) =
// max_alpha F_loss(gamma, alpha) * F_deph(delta, alpha).
CombinedSurface combined_surface(const ExperimentConfig& cfg);

// Evaluates the product model off-grid by interpolating each alpha column
// linearly in (log rate, log infidelity), extrapolating end segments.
double surface_fidelity(const CombinedSurface& s, double gamma, double delta);

// Largest cycle time T (seconds) with F(gamma(T), delta(T)) >= target, for
// the given lifetimes; bisection on the interpolated surface.
double cycle_time_for_fidelity(const CombinedSurface& s, double t1, double tphi, double target_f);

// CSV with a fixed header; all numbers are printed with %.12g.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_num(double v);
void write_csv(const std::string& path, const CsvTable& table);

struct SvgSeries {
  std::string name;
  std::vector<double> x, y;
};

// Minimal plots: data carries the figure, CSV stays authoritative.
void write_svg_lines(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series, bool log_x, bool log_y);
void write_svg_scatter(const std::string& path, const std::string& title,
                       const std::vector<SvgSeries>& series);
void write_svg_heatmap(const std::string& path, const std::string& title,
                       const std::vector<double>& xs, const std::vector<double>& ys,
                       const Eigen::MatrixXd& values, const SvgSeries& overlay);

// Full run: sweeps for whichever grids are present, fit, combined surface
// when both noise grids exist, plots, and a manifest listing every file with
// its FNV-1a hash. Returns the manifest path.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace q2t

#endif
