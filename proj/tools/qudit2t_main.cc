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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qudit2t/channels.h"
#include "qudit2t/codes.h"
#include "qudit2t/harness.h"

namespace {

using namespace q2t;
namespace fs = std::filesystem;

// Raw flag values shared by the sweep-style subcommands. Flags override the
// config file, which overrides the built-in defaults.
struct CommonFlags {
  std::string config;
  std::string code;
  std::string psk;
  std::string alpha;
  std::string gamma;
  std::string delta;
  std::string out;
  std::uint64_t seed = 0;
  int trunc_n = 0;
  double restrict_alpha = 0.0;

  CLI::Option* code_opt = nullptr;
  CLI::Option* psk_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* trunc_opt = nullptr;
  CLI::Option* cap_opt = nullptr;

  void attach(CLI::App* cmd, bool with_grids = true) {
    cmd->add_option("--config", config, "config file (key = value with [sections])");
    code_opt = cmd->add_option("--code", code, "qutrit | quoctit | psk | random");
    psk_opt = cmd->add_option("--psk", psk, "PSK shape 'd,n': d levels, d*n states");
    if (with_grids) {
      alpha_opt = cmd->add_option("--alpha", alpha, "alpha grid (lo:step:hi | log:lo:hi:n | list)");
      gamma_opt = cmd->add_option("--gamma", gamma, "loss grid, same syntax");
      delta_opt = cmd->add_option("--delta", delta, "dephasing grid, same syntax");
    }
    seed_opt = cmd->add_option("--seed", seed, "seed for random codes");
    trunc_opt = cmd->add_option("--trunc-N", trunc_n, "total-photon truncation for dephasing");
    cap_opt = cmd->add_option("--restrict-alpha", restrict_alpha, "drop grid points above this alpha");
    out_opt = cmd->add_option("--out", out, "output directory");
  }

  CodeSpec code_spec() const {
    CodeSpec spec;
    if (code_opt && code_opt->count()) spec.kind = code;
    if (psk_opt && psk_opt->count()) {
      std::stringstream ss(psk);
      char comma = 0;
      if (!(ss >> spec.psk_d >> comma >> spec.psk_n) || comma != ',') {
        throw std::invalid_argument("--psk wants 'd,n'");
      }
      if (!(code_opt && code_opt->count())) spec.kind = "psk";
    }
    if (seed_opt && seed_opt->count()) spec.random_seed = seed;
    return spec;
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg;
    if (!config.empty()) {
      cfg = parse_config_file(config);
      CodeSpec spec = code_spec();
      if ((code_opt && code_opt->count()) || (psk_opt && psk_opt->count())) cfg.code = spec;
      if (seed_opt->count()) cfg.code.random_seed = seed;
    } else {
      cfg = default_config(code_spec());
    }
    if (alpha_opt && alpha_opt->count()) cfg.alpha_grid = parse_grid_spec(alpha);
    if (gamma_opt && gamma_opt->count()) cfg.gamma_grid = parse_grid_spec(gamma);
    if (delta_opt && delta_opt->count()) cfg.delta_grid = parse_grid_spec(delta);
    if (seed_opt->count()) cfg.seed = seed;
    if (trunc_opt->count()) cfg.trunc_n = trunc_n;
    if (cap_opt->count()) cfg.alpha_cap = restrict_alpha;
    if (out_opt->count()) cfg.out_dir = out;
    cfg.validate();
    return cfg;
  }
};

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void emit_rate_csv(const ExperimentConfig& cfg, const RateSweep& sweep,
                   const std::string& rate_name, const std::string& base) {
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
    std::printf("%s=%-12s 1-F=%-14s alpha*=%s%s%s\n", rate_name.c_str(),
                format_num(p.rate).c_str(), format_num(p.infidelity).c_str(),
                format_num(p.best_alpha).c_str(), p.ok ? "" : "  FAILED: ",
                p.ok ? "" : p.error.c_str());
  }
  write_csv(out_path(cfg.out_dir, base + ".csv"), t);
  write_svg_lines(out_path(cfg.out_dir, base + ".svg"),
                  cfg.code.label() + ": min infidelity vs " + rate_name, {line}, true, true);
  try {
    FitResult fit = fit_power_law(rates, infids);
    std::printf("fit: 1-F = %s * %s^%s   (rms log residual %s)\n", format_num(fit.a).c_str(),
                rate_name.c_str(), format_num(fit.b).c_str(), format_num(fit.residual).c_str());
  } catch (const std::exception& e) {
    std::printf("fit skipped: %s\n", e.what());
  }
  std::printf("wrote %s/%s.csv\n", cfg.out_dir.c_str(), base.c_str());
}

int cmd_constellation(double alpha, const std::string& out_dir) {
  StateBasis basis = group2t_constellation(alpha);
  CsvTable t;
  t.header = {"tag", "alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im"};
  SvgSeries mode1{"mode 1", {}, {}}, mode2{"mode 2", {}, {}};
  for (const auto& st : basis.states) {
    t.rows.push_back({st.tag, format_num(st.alpha1.real()), format_num(st.alpha1.imag()),
                      format_num(st.alpha2.real()), format_num(st.alpha2.imag())});
    mode1.x.push_back(st.alpha1.real());
    mode1.y.push_back(st.alpha1.imag());
    mode2.x.push_back(st.alpha2.real());
    mode2.y.push_back(st.alpha2.imag());
  }
  write_csv(out_path(out_dir, "constellation.csv"), t);
  char title[96];
  std::snprintf(title, sizeof title, "2T constellation amplitudes, alpha = %s",
                format_num(alpha).c_str());
  write_svg_scatter(out_path(out_dir, "constellation.svg"), title, {mode1, mode2});
  std::printf("%d states; outer ring |a| = %s, inner ring |a| = %s\n", basis.size(),
              format_num(alpha).c_str(), format_num(alpha / std::sqrt(2.0)).c_str());
  std::printf("wrote %s/constellation.csv and .svg\n", out_dir.c_str());
  return 0;
}

int cmd_gram(const CommonFlags& flags, double alpha) {
  ExperimentConfig cfg = flags.build();
  Encoding enc = make_code(cfg.code, alpha);
  CsvTable t;
  t.header.push_back("state");
  for (const auto& st : enc.basis.states) t.header.push_back(st.tag);
  char cell[64];
  for (int i = 0; i < enc.basis.size(); i++) {
    std::vector<std::string> row{enc.basis.states[i].tag};
    for (int j = 0; j < enc.basis.size(); j++) {
      const auto g = enc.basis.gram(i, j);
      std::snprintf(cell, sizeof cell, "%.12g%+.12gi", g.real(), g.imag());
      row.push_back(cell);
    }
    t.rows.push_back(row);
  }
  write_csv(out_path(cfg.out_dir, "gram.csv"), t);
  std::printf("%s at alpha = %s: %dx%d Gram, %d distinct |entries|\n", enc.label.c_str(),
              format_num(alpha).c_str(), enc.basis.size(), enc.basis.size(), [&] {
                std::vector<double> mags;
                for (int i = 0; i < enc.basis.size(); i++) {
                  for (int j = 0; j < enc.basis.size(); j++) {
                    double m = std::abs(enc.basis.gram(i, j));
                    bool seen = false;
                    for (double x : mags) {
                      if (std::abs(x - m) < 1e-9) seen = true;
                    }
                    if (!seen) mags.push_back(m);
                  }
                }
                return static_cast<int>(mags.size());
              }());
  std::printf("wrote %s/gram.csv\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_encode(const CommonFlags& flags, double alpha) {
  ExperimentConfig cfg = flags.build();
  Encoding enc = make_code(cfg.code, alpha);
  const std::string path = out_path(cfg.out_dir, "encoding.json");
  std::ofstream out(path, std::ios::binary);
  write_encoding_json(enc, out);
  std::printf("%s: d = %d over %d states, alpha = %s\n", enc.label.c_str(), enc.d,
              enc.basis.size(), format_num(alpha).c_str());
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_sweep_alpha(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.build();
  const bool dephasing = flags.delta_opt->count() > 0;
  if (dephasing && flags.gamma_opt->count() > 0) {
    throw std::invalid_argument("sweep-alpha wants --gamma or --delta, not both");
  }
  double rate;
  std::string rate_name;
  if (dephasing) {
    if (cfg.delta_grid.empty()) throw std::invalid_argument("--delta grid is empty");
    rate = cfg.delta_grid.front();
    rate_name = "delta";
  } else {
    rate = cfg.gamma_grid.empty() ? 0.1 : cfg.gamma_grid.front();
    rate_name = "gamma";
  }
  AlphaSweep sweep = dephasing ? sweep_alpha_dephasing(cfg, rate) : sweep_alpha_loss(cfg, rate);
  CsvTable t;
  t.header = {"alpha", "fidelity", "ok", "error"};
  SvgSeries line{cfg.code.label(), {}, {}};
  for (const auto& p : sweep.points) {
    t.rows.push_back({format_num(p.alpha), format_num(p.fidelity), p.ok ? "1" : "0", p.error});
    if (p.ok) {
      line.x.push_back(p.alpha);
      line.y.push_back(p.fidelity);
    }
    std::printf("alpha=%-8s F=%s%s%s\n", format_num(p.alpha).c_str(),
                format_num(p.fidelity).c_str(), p.ok ? "" : "  FAILED: ",
                p.ok ? "" : p.error.c_str());
  }
  write_csv(out_path(cfg.out_dir, "alpha_sweep.csv"), t);
  char title[128];
  std::snprintf(title, sizeof title, "%s: F vs alpha at %s = %s", cfg.code.label().c_str(),
                rate_name.c_str(), format_num(rate).c_str());
  write_svg_lines(out_path(cfg.out_dir, "alpha_sweep.svg"), title, {line}, false, false);
  std::printf("argmax alpha = %s with F = %s\n", format_num(sweep.best_alpha).c_str(),
              format_num(sweep.best_fidelity).c_str());
  std::printf("wrote %s/alpha_sweep.csv\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_fit(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open " + file);
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument(file + " is empty");
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  int xi = 0, yi = 1;
  for (size_t i = 0; i < cols.size(); i++) {
    if (cols[i] == "gamma" || cols[i] == "delta" || cols[i] == "rate") xi = static_cast<int>(i);
    if (cols[i] == "infidelity") yi = static_cast<int>(i);
  }
  std::vector<double> xs, ys;
  std::string linetext;
  while (std::getline(in, linetext)) {
    std::stringstream ss(linetext);
    std::string c;
    std::vector<std::string> row;
    while (std::getline(ss, c, ',')) row.push_back(c);
    if (static_cast<int>(row.size()) <= std::max(xi, yi)) continue;
    try {
      double x = std::stod(row[xi]);
      double y = std::stod(row[yi]);
      xs.push_back(x);
      ys.push_back(y);
    } catch (const std::exception&) {
      // non-numeric row, skip
    }
  }
  FitResult fit = fit_power_law(xs, ys);
  std::printf("1-F = %s * x^%s over %zu points (rms log residual %s)\n", format_num(fit.a).c_str(),
              format_num(fit.b).c_str(), fit.grid.size(), format_num(fit.residual).c_str());
  return 0;
}

int cmd_combined(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.build();
  CombinedSurface s = combined_surface(cfg);
  CsvTable t;
  t.header = {"gamma", "delta", "fidelity", "best_alpha"};
  double amin = 1e300, amax = 0.0;
  for (size_t i = 0; i < s.gamma.size(); i++) {
    for (size_t k = 0; k < s.delta.size(); k++) {
      t.rows.push_back({format_num(s.gamma[i]), format_num(s.delta[k]), format_num(s.f(i, k)),
                        format_num(s.best_alpha(i, k))});
      amin = std::min(amin, s.best_alpha(i, k));
      amax = std::max(amax, s.best_alpha(i, k));
    }
  }
  write_csv(out_path(cfg.out_dir, "combined_surface.csv"), t);
  SvgSeries life{"T1/Tphi line", {}, {}};
  for (double logt = -7.0; logt <= -1.0; logt += 0.1) {
    const NoiseRates r = lifetimes_to_rates(std::pow(10.0, logt), cfg.t1, cfg.tphi);
    life.x.push_back(r.gamma);
    life.y.push_back(r.delta);
  }
  write_svg_heatmap(out_path(cfg.out_dir, "combined_surface.svg"), "F(gamma, delta)", s.gamma,
                    s.delta, s.f, life);
  std::printf("optimal alpha spans [%s, %s] over the grid (%.1f%% variation)\n",
              format_num(amin).c_str(), format_num(amax).c_str(),
              amin > 0.0 ? 100.0 * (amax - amin) / amin : 0.0);
  const double t_cycle = cycle_time_for_fidelity(s, cfg.t1, cfg.tphi, 0.9);
  std::printf("F = 0.9 crossing on the lifetime line: cycle time %s s\n",
              format_num(t_cycle).c_str());
  std::printf("wrote %s/combined_surface.csv and .svg\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_table(const CommonFlags& flags) {
  ExperimentConfig base = flags.build();
  std::vector<CodeSpec> codes;
  codes.push_back({"qutrit"});
  for (int n : {1, 2, 3}) codes.push_back({"psk", 3, n});
  codes.push_back({"quoctit"});
  for (int n : {1, 2, 3}) codes.push_back({"psk", 8, n});

  CsvTable t;
  t.header = {"gamma"};
  std::vector<std::vector<double>> infid(codes.size());
  for (size_t c = 0; c < codes.size(); c++) {
    ExperimentConfig cfg = base;
    cfg.code = codes[c];
    if (flags.alpha_opt->count() == 0 && flags.config.empty()) {
      cfg.alpha_grid = default_config(codes[c]).alpha_grid;
    }
    t.header.push_back(cfg.code.label());
    RateSweep sweep = sweep_gamma(cfg);
    for (const auto& p : sweep.points) {
      infid[c].push_back(p.ok ? p.infidelity : std::numeric_limits<double>::quiet_NaN());
    }
    std::printf("%-12s done\n", cfg.code.label().c_str());
  }
  for (size_t g = 0; g < base.gamma_grid.size(); g++) {
    std::vector<std::string> row{format_num(base.gamma_grid[g])};
    for (size_t c = 0; c < codes.size(); c++) row.push_back(format_num(infid[c][g]));
    t.rows.push_back(row);
  }
  const std::string name =
      base.alpha_cap > 0.0 ? "comparison_capped.csv" : "comparison.csv";
  write_csv(out_path(base.out_dir, name), t);

  std::printf("\nmin infidelity%s\n",
              base.alpha_cap > 0.0
                  ? (" with alpha <= " + format_num(base.alpha_cap)).c_str()
                  : "");
  std::printf("%-10s", "gamma");
  for (size_t c = 0; c < codes.size(); c++) std::printf(" %-11s", t.header[c + 1].c_str());
  std::printf("\n");
  for (size_t g = 0; g < base.gamma_grid.size(); g++) {
    std::printf("%-10.3g", base.gamma_grid[g]);
    for (size_t c = 0; c < codes.size(); c++) std::printf(" %-11.4g", infid[c][g]);
    std::printf("\n");
  }
  std::printf("wrote %s/%s\n", base.out_dir.c_str(), name.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-mode coherent-state qudit codes: sweeps, fits, and comparisons"};
  app.require_subcommand(1);

  double alpha_value = 1.5;
  std::string out_dir = "out";
  std::string fit_file;

  auto* c_const = app.add_subcommand("constellation", "emit the 24-state layout (CSV + SVG)");
  c_const->add_option("--alpha", alpha_value, "coherence parameter");
  c_const->add_option("--out", out_dir, "output directory");

  CommonFlags f_gram;
  auto* c_gram = app.add_subcommand("gram", "emit a code's state Gram matrix");
  f_gram.attach(c_gram, false);
  double gram_alpha = 1.5;
  c_gram->add_option("--alpha", gram_alpha, "coherence parameter");

  CommonFlags f_enc;
  auto* c_enc = app.add_subcommand("encode", "emit a code's logical basis as JSON");
  f_enc.attach(c_enc, false);
  double enc_alpha = 1.5;
  c_enc->add_option("--alpha", enc_alpha, "coherence parameter");

  CommonFlags f_sa;
  auto* c_sa = app.add_subcommand("sweep-alpha", "optimize F over recovery per alpha");
  f_sa.attach(c_sa);

  CommonFlags f_sg;
  auto* c_sg = app.add_subcommand("sweep-gamma", "min infidelity vs loss rate");
  f_sg.attach(c_sg);

  CommonFlags f_sd;
  auto* c_sd = app.add_subcommand("sweep-delta", "min infidelity vs dephasing rate");
  f_sd.attach(c_sd);

  auto* c_fit = app.add_subcommand("fit", "power-law fit of a sweep CSV");
  c_fit->add_option("csv", fit_file, "CSV with rate and infidelity columns")->required();

  CommonFlags f_comb;
  auto* c_comb = app.add_subcommand("combined", "joint loss + dephasing fidelity surface");
  f_comb.attach(c_comb);

  CommonFlags f_table;
  auto* c_table = app.add_subcommand("table", "code comparison table over the gamma grid");
  f_table.attach(c_table);

  std::string run_config;
  auto* c_run = app.add_subcommand("run", "full experiment from a config file");
  c_run->add_option("--config", run_config, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_const->parsed()) return cmd_constellation(alpha_value, out_dir);
    if (c_gram->parsed()) return cmd_gram(f_gram, gram_alpha);
    if (c_enc->parsed()) return cmd_encode(f_enc, enc_alpha);
    if (c_sa->parsed()) return cmd_sweep_alpha(f_sa);
    if (c_sg->parsed()) {
      ExperimentConfig cfg = f_sg.build();
      emit_rate_csv(cfg, sweep_gamma(cfg), "gamma", "loss_sweep");
      return 0;
    }
    if (c_sd->parsed()) {
      ExperimentConfig cfg = f_sd.build();
      emit_rate_csv(cfg, sweep_delta(cfg), "delta", "dephasing_sweep");
      return 0;
    }
    if (c_fit->parsed()) return cmd_fit(fit_file);
    if (c_comb->parsed()) return cmd_combined(f_comb);
    if (c_table->parsed()) return cmd_table(f_table);
    if (c_run->parsed()) {
      std::printf("manifest: %s\n", run_experiment(parse_config_file(run_config)).c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
