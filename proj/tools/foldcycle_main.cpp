// Command-line front end: model files in, CSV or json-lines out.
//
// Exit codes: 0 success, 1 config or model error, 2 inconclusive verdict,
// 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "foldcycle/foldcycle.hpp"

namespace {

using namespace foldcycle;

// Collects rows and renders them as CSV or as one JSON object per line.
class Sink {
 public:
  Sink(std::string path, bool jsonl, std::vector<std::string> header)
      : path_(std::move(path)), jsonl_(jsonl), header_(std::move(header)) {
    if (!jsonl_ && !header_.empty()) {
      for (std::size_t i = 0; i < header_.size(); ++i)
        body_ += (i ? "," : "") + header_[i];
      body_ += '\n';
    }
  }

  // Cells hold preformatted numbers or bare words; empty cells stay empty in
  // CSV and become nulls in json-lines.
  void row(const std::vector<std::string>& cells) {
    if (!jsonl_) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        body_ += (i ? "," : "") + cells[i];
      body_ += '\n';
      return;
    }
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < cells.size() && i < header_.size(); ++i) {
      if (cells[i].empty()) {
        obj[header_[i]] = nullptr;
        continue;
      }
      char* end = nullptr;
      const double num = std::strtod(cells[i].c_str(), &end);
      if (end && *end == '\0') {
        if (cells[i].find_first_of(".eE") == std::string::npos &&
            std::abs(num) < 1e15)
          obj[header_[i]] = static_cast<long long>(num);
        else
          obj[header_[i]] = num;
      } else {
        obj[header_[i]] = cells[i];
      }
    }
    body_ += obj.dump();
    body_ += '\n';
  }

  void raw(const std::string& text) { body_ += text; }

  void flush() const {
    if (path_.empty()) {
      std::fwrite(body_.data(), 1, body_.size(), stdout);
      return;
    }
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path_);
    out.write(body_.data(), static_cast<std::streamsize>(body_.size()));
  }

 private:
  std::string path_;
  bool jsonl_ = false;
  std::vector<std::string> header_;
  std::string body_;
};

struct CommonOpts {
  std::string model_ref;
  std::string out_path;
  std::string format = "csv";
  double rel_tol = -1.0;
  double abs_tol = -1.0;

  ToleranceSet tolerances() const {
    ToleranceSet tol;
    if (rel_tol > 0.0) tol.rel = rel_tol;
    if (abs_tol > 0.0) tol.abs = abs_tol;
    return tol;
  }
  bool jsonl() const { return format == "jsonl"; }
};

void add_common(CLI::App* cmd, CommonOpts* c) {
  cmd->add_option("--model", c->model_ref,
                  "Builtin name (mass_spring, abs) or model file path")
      ->required();
  cmd->add_option("--out", c->out_path, "Output path (default: stdout)");
  cmd->add_option("--format", c->format, "Output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--rel-tol", c->rel_tol, "Integrator relative tolerance");
  cmd->add_option("--abs-tol", c->abs_tol, "Integrator absolute tolerance");
}

std::vector<double> parse_x_values(const std::string& text,
                                   const TheoremVerdict& verdict) {
  if (text == "auto") {
    if (verdict.required_x_sign == 0)
      throw ConfigError("--x auto needs a model with a definite x sign");
    std::vector<double> xs;
    for (int k = 4; k <= 8; ++k)
      xs.push_back(verdict.required_x_sign * std::pow(10.0, -k));
    return xs;
  }
  std::vector<double> xs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == nullptr || *end != '\0')
      throw ConfigError("cannot parse --x entry: '" + item + "'");
    xs.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (xs.empty()) throw ConfigError("--x needs at least one value");
  return xs;
}

WedgeRegion resolve_region(const ModelSpec& model, const FoldCoefficients& c,
                           double m_opt, double delta_opt) {
  WedgeRegion reg;
  if (m_opt > 0.0 && delta_opt > 0.0) {
    reg.m = m_opt;
    reg.delta = delta_opt;
    return reg;
  }
  reg = default_region(c, model.box);
  if (m_opt > 0.0) reg.m = m_opt;
  if (delta_opt > 0.0) reg.delta = delta_opt;
  return reg;
}

const char* bool_word(bool b) { return b ? "true" : "false"; }

int cmd_coeffs(const CommonOpts& common) {
  const ModelSpec model = resolve_model(common.model_ref);
  const FoldAnalysis a = analyze_fold(model);
  Sink sink(common.out_path, common.jsonl(), {"quantity", "value"});
  sink.row({"alpha_L", fmt_g17(a.coeffs.alpha_L)});
  sink.row({"alpha_R", fmt_g17(a.coeffs.alpha_R)});
  sink.row({"beta_L", fmt_g17(a.coeffs.beta_L)});
  sink.row({"beta_R", fmt_g17(a.coeffs.beta_R)});
  sink.row({"alpha", fmt_g17(a.coeffs.alpha)});
  sink.row({"beta", fmt_g17(a.coeffs.beta)});
  sink.row({"fold_fold", bool_word(a.verdict.fold_fold)});
  sink.row({"c2_fy", bool_word(a.verdict.c2_fy)});
  sink.row({"c2_g", bool_word(a.verdict.c2_g)});
  sink.row({"c3", bool_word(a.verdict.c3)});
  sink.row({"c4", bool_word(a.verdict.c4)});
  sink.row({"required_x_sign", std::to_string(a.verdict.required_x_sign)});
  sink.row({"predicted_stability",
            stability_name(a.verdict.predicted_stability)});
  sink.row({"predicted_y_sign", std::to_string(a.verdict.predicted_y_sign)});
  sink.row({"predicted_cuberoot_ratio",
            fmt_g17(a.verdict.predicted_cuberoot_ratio)});
  sink.flush();
  return a.verdict.all_conditions() ? 0 : 2;
}

int cmd_simulate(const CommonOpts& common, double x_param,
                 const std::vector<double>& init, double y0, int switches,
                 double tmax, double dt) {
  const ModelSpec model = resolve_model(common.model_ref);
  Vec2 start{x_param, y0};
  if (!init.empty()) {
    if (init.size() != 2)
      throw ConfigError("--init needs exactly two numbers: x,y");
    start = {init[0], init[1]};
  }
  StopRule stop;
  stop.max_switches = switches;
  if (tmax > 0.0) stop.max_time = tmax;
  const HybridTrajectory traj =
      simulate(model, x_param, start, stop, common.tolerances());
  if (!common.jsonl()) {
    Sink plain(common.out_path, false, {});
    plain.raw(trajectory_csv(traj, dt));
    plain.flush();
    return 0;
  }
  Sink sink(common.out_path, true, {"t", "x", "y", "mode", "event"});
  sample_trajectory(traj, dt, [&](double t, Vec2 s, Mode m, int event) {
    sink.row({fmt_g17(t), fmt_g17(s.x), fmt_g17(s.y),
              std::string(1, mode_char(m)), std::to_string(event)});
  });
  sink.flush();
  return 0;
}

int cmd_poincare(const CommonOpts& common, double x_param, double y,
                 double m_opt, double delta_opt) {
  const ModelSpec model = resolve_model(common.model_ref);
  const ToleranceSet tol = common.tolerances();
  std::optional<WedgeRegion> region;
  try {
    region = resolve_region(model, fold_coefficients(model), m_opt, delta_opt);
  } catch (const Error&) {
    // Degenerate coefficients: the map still runs, only the residual needs
    // the wedge.
  }

  PoincareResult pr;
  try {
    pr = poincare_map(model, x_param, y, tol, true,
                      region ? &*region : nullptr);
  } catch (const DomainViolation&) {
    pr = poincare_map(model, x_param, y, tol, false);
  }
  Sink sink(common.out_path, common.jsonl(),
            {"y_in", "y_out", "intermediate", "period", "delta",
             "delta_over_y2"});
  std::vector<std::string> cells{fmt_g17(pr.y_in), fmt_g17(pr.y_out),
                                 fmt_g17(pr.intermediate),
                                 fmt_g17(pr.period), "", ""};
  if (pr.residual_data) {
    cells[4] = fmt_g17(pr.residual_data->delta_value);
    cells[5] = fmt_g17(pr.residual_data->ratio);
  }
  sink.row(cells);
  sink.flush();
  return 0;
}

int cmd_residuals(const CommonOpts& common) {
  const ModelSpec model = resolve_model(common.model_ref);
  const std::vector<ResidualRow> rows =
      residual_sweep(model, common.tolerances());
  Sink sink(common.out_path, common.jsonl(),
            {"j", "y", "x", "P_y", "delta", "delta_over_y2", "T", "Ttilde"});
  for (const auto& r : rows)
    sink.row({std::to_string(r.j), fmt_g17(r.y), fmt_g17(r.x), fmt_g17(r.Py),
              fmt_g17(r.delta), fmt_g17(r.ratio), fmt_g17(r.T),
              fmt_g17(r.Ttilde)});
  sink.flush();
  return 0;
}

std::vector<std::string> cycle_cells(const CycleSolution& r,
                                     double theory_ratio) {
  return {fmt_g17(r.x_param),       fmt_g17(r.y_fix),
          fmt_g17(r.period),        fmt_g17(r.multiplier),
          cycle_stability_name(r.stability), fmt_g17(r.scaling_ratio),
          fmt_g17(theory_ratio),    fmt_g17(r.fix_residual)};
}

const std::vector<std::string> kCycleHeader{
    "x",         "y_fix",         "period",       "multiplier",
    "stability", "scaling_ratio", "theory_ratio", "fix_residual"};

int cmd_cycle(const CommonOpts& common, double x_param, double m_opt,
              double delta_opt) {
  const ModelSpec model = resolve_model(common.model_ref);
  const FoldAnalysis a = analyze_fold(model);
  const WedgeRegion region =
      resolve_region(model, a.coeffs, m_opt, delta_opt);
  const CycleSolution sol =
      find_cycle(model, x_param, common.tolerances(), &region);
  Sink sink(common.out_path, common.jsonl(), kCycleHeader);
  sink.row(cycle_cells(sol, a.verdict.predicted_cuberoot_ratio));
  sink.flush();
  return 0;
}

int cmd_scan(const CommonOpts& common, const std::string& x_text,
             double m_opt, double delta_opt) {
  const ModelSpec model = resolve_model(common.model_ref);
  const FoldAnalysis a = analyze_fold(model);
  const WedgeRegion region =
      resolve_region(model, a.coeffs, m_opt, delta_opt);
  std::vector<double> xs = parse_x_values(x_text, a.verdict);
  std::sort(xs.begin(), xs.end(), [](double l, double r) {
    return std::abs(l) > std::abs(r);
  });

  const ScanResult scan =
      bifurcation_scan(model, xs, common.tolerances(), &region);
  Sink sink(common.out_path, common.jsonl(), kCycleHeader);
  for (const auto& r : scan.rows) sink.row(cycle_cells(r, scan.theory_ratio));
  sink.flush();

  for (const auto& err : scan.errors)
    std::cerr << "row x = " << fmt_g17(err.x_param) << " failed: "
              << err.message << "\n";
  if (!scan.errors.empty() || scan.rows.empty()) return 3;
  const double rel_err = std::abs(scan.limit_ratio_estimate -
                                  scan.theory_ratio) /
                         std::abs(scan.theory_ratio);
  if (rel_err > 0.1) {
    std::cerr << "scaling-law check failed: limit ratio "
              << fmt_g17(scan.limit_ratio_estimate) << " vs theory "
              << fmt_g17(scan.theory_ratio) << " (relative error "
              << fmt_g17(rel_err) << ")\n";
    return 3;
  }
  return 0;
}

int cmd_oracle(const CommonOpts& common, const std::string& mode_text) {
  const ModelSpec model = resolve_model(common.model_ref);
  const Mode mode = mode_text == "L" ? Mode::L : Mode::R;
  if (mode_text != "L" && mode_text != "R")
    throw ConfigError("--mode must be L or R");
  const DerivativeReport rep = verify_solution_jets(model, mode);
  Sink sink(common.out_path, common.jsonl(),
            {"name", "order", "formula_value", "numeric_value", "abs_error"});
  for (const auto& e : rep.entries)
    sink.row({e.name, std::to_string(e.order), fmt_g17(e.formula_value),
              fmt_g17(e.numeric_value), fmt_g17(e.abs_error)});
  sink.flush();
  return rep.all_within(1e-6, 1e-4) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Relay-switched planar systems near a fold-fold point: coefficients, "
      "return maps, cycles."};
  app.require_subcommand(1);

  CommonOpts common;
  std::string x_text = "auto";
  double x_single = 0.0;
  double y_value = -0.05;
  std::vector<double> init;
  double m_opt = 0.0, delta_opt = 0.0;
  int switches = 64;
  double tmax = 0.0, dt = 0.005;
  std::string mode_text = "R";

  CLI::App* coeffs = app.add_subcommand(
      "coeffs", "Fold coefficients and the theorem verdict");
  add_common(coeffs, &common);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the relay system and export the trajectory");
  add_common(simulate, &common);
  simulate->add_option("--x", x_single, "Half-gap parameter")->required();
  simulate->add_option("--y", y_value, "Start ordinate on the line x = x");
  simulate->add_option("--init", init,
                       "Start point x,y (overrides --y)")
      ->delimiter(',')
      ->expected(2);
  simulate->add_option("--switches", switches, "Switch limit");
  simulate->add_option("--tmax", tmax, "Time limit");
  simulate->add_option("--dt", dt, "Sampling step");

  CLI::App* poincare = app.add_subcommand(
      "poincare", "One application of the return map");
  add_common(poincare, &common);
  poincare->add_option("--x", x_single, "Half-gap parameter")->required();
  poincare->add_option("--y", y_value, "Start ordinate")->required();
  poincare->add_option("--m", m_opt, "Wedge slope");
  poincare->add_option("--delta", delta_opt, "Interval outer radius");

  CLI::App* residuals = app.add_subcommand(
      "residuals", "Quadratic-model residual sweep toward the fold");
  add_common(residuals, &common);

  CLI::App* cycle = app.add_subcommand(
      "cycle", "Locate and classify the limit cycle at one parameter");
  add_common(cycle, &common);
  cycle->add_option("--x", x_single, "Half-gap parameter")->required();
  cycle->add_option("--m", m_opt, "Wedge slope");
  cycle->add_option("--delta", delta_opt, "Interval outer radius");

  CLI::App* scan = app.add_subcommand(
      "scan", "Cycle scan over a parameter list; checks the scaling law");
  add_common(scan, &common);
  scan->add_option("--x", x_text,
                   "Comma-separated parameters, or 'auto' for "
                   "sign*10^-k, k=4..8");
  scan->add_option("--m", m_opt, "Wedge slope");
  scan->add_option("--delta", delta_opt, "Interval outer radius");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Flow-derivative identities measured against closed forms");
  add_common(oracle, &common);
  oracle->add_option("--mode", mode_text, "Mode to verify (L or R)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (coeffs->parsed()) return cmd_coeffs(common);
    if (simulate->parsed())
      return cmd_simulate(common, x_single, init, y_value, switches, tmax,
                          dt);
    if (poincare->parsed())
      return cmd_poincare(common, x_single, y_value, m_opt, delta_opt);
    if (residuals->parsed()) return cmd_residuals(common);
    if (cycle->parsed())
      return cmd_cycle(common, x_single, m_opt, delta_opt);
    if (scan->parsed()) return cmd_scan(common, x_text, m_opt, delta_opt);
    if (oracle->parsed()) return cmd_oracle(common, mode_text);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InconclusiveVerdict& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
