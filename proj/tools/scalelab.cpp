// Command-line front end for the scaling-law toolkit.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scalelab/datapipe.hpp"
#include "scalelab/evaluation.hpp"
#include "scalelab/fitting.hpp"
#include "scalelab/io.hpp"
#include "scalelab/laws.hpp"
#include "scalelab/optimizers.hpp"
#include "scalelab/presets.hpp"
#include "scalelab/surrogate.hpp"
#include "scalelab/types.hpp"

namespace {

using namespace scalelab;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Inputs {
  std::optional<std::vector<RunRecord>> runs;
  std::optional<L0Table> l0;
  std::optional<fitting::FitResult> fit;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Classifies each --input by extension and shape: .jsonl holds run
// records; a .json object with a "family" key is a stored fit result,
// otherwise it is a baseline table.
Inputs load_inputs(const std::vector<std::string>& paths) {
  Inputs in;
  for (const std::string& path : paths) {
    if (ends_with(path, ".jsonl")) {
      if (in.runs) throw InputError("more than one run-record input");
      in.runs = io::read_runs_jsonl(path);
      continue;
    }
    json j = json::parse(io::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw InputError(path + ": not a JSON object");
    if (j.contains("family")) {
      if (in.fit) throw InputError("more than one fit-result input");
      in.fit = fitting::fit_result_from_json(j.dump());
    } else {
      if (in.l0) throw InputError("more than one baseline-table input");
      in.l0 = io::read_l0_json(path);
    }
  }
  return in;
}

laws::LawFamily parse_family(const std::string& tag) {
  auto f = laws::family_from_tag(tag);
  if (!f) throw InputError("unknown family '" + tag + "'");
  return *f;
}

FitDataset validated_dataset(const Inputs& in) {
  if (!in.runs) throw InputError("no run-record input (.jsonl) given");
  const L0Table* l0 = in.l0 ? &*in.l0 : nullptr;
  ValidationResult vr = validate_dataset(*in.runs, l0);
  for (const std::string& w : vr.warnings)
    std::cerr << "warning: " << w << "\n";
  if (!vr.dataset) {
    for (const std::string& e : vr.errors) std::cerr << "error: " << e << "\n";
    throw InputError("dataset failed validation");
  }
  return std::move(*vr.dataset);
}

const L0Table* require_l0_if_needed(laws::LawFamily family, const Inputs& in) {
  bool needed = laws::needs_l0(family) || fitting::response_needs_l0(family);
  if (needed && !in.l0)
    throw InputError("family '" + std::string(laws::family_tag(family)) +
                     "' requires a baseline table input (.json)");
  return in.l0 ? &*in.l0 : nullptr;
}

int cmd_fit(const std::vector<std::string>& inputs, const std::string& output,
            const std::string& family_tag, double huber_delta) {
  Inputs in = load_inputs(inputs);
  laws::LawFamily family = parse_family(family_tag);
  FitDataset ds = validated_dataset(in);
  const L0Table* l0 = require_l0_if_needed(family, in);

  fitting::FitConfig cfg = fitting::default_fit_config();
  if (huber_delta > 0) cfg.huber_delta = huber_delta;

  fitting::FitResult result = fitting::fit(family, ds.records, cfg, l0);
  io::write_file(output, fitting::fit_result_to_json(result));

  auto pred = fitting::predict_batch(family, result.params, ds.records, l0);
  auto obs = fitting::observed_batch(family, ds.records, l0);
  std::cout << "fit " << laws::family_tag(family) << " on " << ds.domain
            << ": objective " << io::fmt_double(result.objective)
            << ", in-sample mre " << io::fmt_double(evaluation::mre(pred, obs))
            << ", " << (result.converged ? "converged" : "not converged")
            << "\n";
  return kExitOk;
}

int cmd_bootstrap(const std::vector<std::string>& inputs,
                  const std::string& output, const std::string& family_tag,
                  double huber_delta, int reps, uint64_t seed) {
  Inputs in = load_inputs(inputs);
  laws::LawFamily family = parse_family(family_tag);
  FitDataset ds = validated_dataset(in);
  const L0Table* l0 = require_l0_if_needed(family, in);

  fitting::FitConfig cfg = fitting::default_fit_config();
  if (huber_delta > 0) cfg.huber_delta = huber_delta;
  evaluation::BootstrapConfig bc;
  bc.repetitions = reps;
  bc.seed = seed;

  evaluation::BootstrapResult br =
      evaluation::bootstrap_mre(family, ds, cfg, bc, l0);

  std::ofstream out(output, std::ios::binary);
  if (!out) throw InputError("cannot write " + output);
  out << "rep,mre\n";
  for (size_t i = 0; i < br.per_rep.size(); ++i)
    out << i << "," << io::fmt_double(br.per_rep[i]) << "\n";

  std::cout << "bootstrap " << laws::family_tag(family) << ": mean mre "
            << io::fmt_double(br.mean_mre) << " over "
            << br.per_rep.size() << " reps";
  if (br.failed_reps > 0) std::cout << " (" << br.failed_reps << " failed)";
  std::cout << "\nnote: " << br.note << "\n";
  return kExitOk;
}

int cmd_extrapolate(const std::vector<std::string>& inputs,
                    const std::string& output, const std::string& family_tag,
                    const std::string& setup_tag, double huber_delta) {
  Inputs in = load_inputs(inputs);
  laws::LawFamily family = parse_family(family_tag);
  FitDataset ds = validated_dataset(in);
  const L0Table* l0 = require_l0_if_needed(family, in);

  evaluation::ExtrapolationSetup setup;
  if (setup_tag == "A")
    setup = evaluation::setup_A();
  else if (setup_tag == "B")
    setup = evaluation::setup_B();
  else
    throw InputError("--setup must be A or B");

  fitting::FitConfig cfg = fitting::default_fit_config();
  if (huber_delta > 0) cfg.huber_delta = huber_delta;

  double v = evaluation::extrapolation_mre(family, ds, setup, cfg, l0);
  std::cout << "extrapolation setup " << setup.name << " "
            << laws::family_tag(family) << ": held-out mre "
            << io::fmt_double(v) << "\n";
  if (!output.empty()) {
    json j;
    j["setup"] = setup.name;
    j["family"] = std::string(laws::family_tag(family));
    j["mre"] = v;
    io::write_file(output, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_predict(const std::vector<std::string>& inputs,
                const std::string& output) {
  Inputs in = load_inputs(inputs);
  if (!in.fit) throw InputError("predict needs a fit-result input (.json)");
  FitDataset ds = validated_dataset(in);
  laws::LawFamily family = in.fit->family;
  const L0Table* l0 = require_l0_if_needed(family, in);

  auto pred = fitting::predict_batch(family, in.fit->params, ds.records, l0);
  auto obs = fitting::observed_batch(family, ds.records, l0);

  std::ofstream out(output, std::ios::binary);
  if (!out) throw InputError("cannot write " + output);
  out << "n_params,dft_tokens,p,observed,predicted\n";
  for (size_t i = 0; i < ds.records.size(); ++i) {
    const RunRecord& r = ds.records[i];
    out << r.n_params << "," << r.dft_tokens << "," << io::fmt_double(r.p)
        << "," << io::fmt_double(obs[i]) << "," << io::fmt_double(pred[i])
        << "\n";
  }
  std::cout << "predicted " << ds.records.size() << " records, mre "
            << io::fmt_double(evaluation::mre(pred, obs)) << "\n";
  return kExitOk;
}

std::string l0_path_for(const std::string& runs_path) {
  std::string base = runs_path;
  if (ends_with(base, ".jsonl")) base.resize(base.size() - 6);
  return base + ".l0.json";
}

int cmd_simulate(const std::string& output, const std::string& grid_preset,
                 const std::string& domain, double noise_sigma,
                 uint64_t seed) {
  FitDataset ds;
  if (grid_preset == "paper125") {
    const presets::DomainPreset* preset = presets::find_domain(domain);
    if (!preset) throw InputError("unknown domain '" + domain + "'");
    ds = surrogate::gen_grid(
        surrogate::make_surrogate_spec(*preset, noise_sigma, seed));
  } else if (grid_preset == "ift") {
    ds = surrogate::gen_ift_grid(noise_sigma, seed);
  } else {
    throw InputError("--grid-preset must be paper125 or ift");
  }
  io::write_runs_jsonl(output, ds.records);
  std::string l0_path = l0_path_for(output);
  io::write_l0_json(l0_path, presets::builtin_l0_table());
  std::cout << "wrote " << ds.records.size() << " records to " << output
            << " and baselines to " << l0_path << "\n";
  return kExitOk;
}

int cmd_ucurve(const std::vector<std::string>& inputs,
               const std::string& output) {
  if (inputs.size() != 1)
    throw InputError("ucurve takes exactly one --input curve CSV");
  LossCurve curve = io::read_curve_csv(inputs[0]);
  evaluation::UcurveBottom bottom =
      evaluation::ucurve_bottom(curve.steps, curve.val_ft);
  json j;
  j["step"] = bottom.step;
  j["loss"] = bottom.loss;
  j["no_overfitting"] = bottom.no_overfitting;
  std::cout << j.dump() << "\n";
  if (!output.empty()) io::write_file(output, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_mix_stats(const std::string& output, double p, uint64_t n,
                  uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("--p must lie in [0, 1]");
  if (n == 0) throw InputError("--n must be positive");

  // Synthetic single-sequence sources; only the choice sequence matters.
  datapipe::DomainStream ft{"ft", {{0}}, std::nullopt,
                            datapipe::CyclePolicy::repeat_epochs};
  datapipe::DomainStream pt{"pt", {{0}}, std::nullopt,
                            datapipe::CyclePolicy::repeat_epochs};
  auto picks = datapipe::sample_mixture(ft, pt, p, seed, n);
  uint64_t pt_count = 0;
  for (const auto& pk : picks) pt_count += pk.source == 1;

  double fraction = static_cast<double>(pt_count) / static_cast<double>(n);
  double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  double lo = p - 3.0 * sigma, hi = p + 3.0 * sigma;
  bool inside = fraction >= lo && fraction <= hi;

  json j;
  j["p"] = p;
  j["n"] = n;
  j["pt_fraction"] = fraction;
  j["band_low"] = lo;
  j["band_high"] = hi;
  j["within_band"] = inside;
  std::cout << j.dump() << "\n";
  if (!output.empty()) datapipe::write_mixture_manifest(output, picks);
  return kExitOk;
}

int cmd_toy_opt(const std::string& output, const std::string& variant_tag,
                double lambda, uint64_t steps, double lr) {
  optimizers::Variant variant;
  if (variant_tag == "adam")
    variant = optimizers::Variant::adam;
  else if (variant_tag == "adamw")
    variant = optimizers::Variant::adamw;
  else if (variant_tag == "anchored_adamw")
    variant = optimizers::Variant::anchored_adamw;
  else
    throw InputError("--variant must be adam, adamw, or anchored_adamw");

  auto traj = optimizers::run_toy_quadratic(variant, lambda, steps, lr);
  optimizers::write_trajectory_csv(output, traj);
  const auto& last = traj.back();
  std::cout << "toy-opt " << variant_tag << " lambda "
            << io::fmt_double(lambda) << ": final (" << io::fmt_double(last.x)
            << ", " << io::fmt_double(last.y) << "), f "
            << io::fmt_double(last.f) << "\n";
  return kExitOk;
}

// One-dimensional slices of the fitted surface, each axis varied over
// its observed values with the other covariates pinned to their median
// observed value.
int cmd_report(const std::vector<std::string>& inputs,
               const std::string& output) {
  Inputs in = load_inputs(inputs);
  if (!in.fit) throw InputError("report needs a fit-result input (.json)");
  FitDataset ds = validated_dataset(in);
  laws::LawFamily family = in.fit->family;
  const L0Table* l0 = require_l0_if_needed(family, in);

  std::set<uint64_t> n_set, d_set;
  std::set<double> p_set;
  for (const RunRecord& r : ds.records) {
    n_set.insert(r.n_params);
    d_set.insert(r.dft_tokens);
    p_set.insert(r.p);
  }
  auto median_of = [](const auto& values) {
    std::vector<typename std::decay_t<decltype(values)>::value_type> v(
        values.begin(), values.end());
    return v[v.size() / 2];
  };
  uint64_t n_mid = median_of(n_set);
  uint64_t d_mid = median_of(d_set);
  double p_mid = median_of(p_set);

  auto observed_at = [&](uint64_t n, uint64_t d, double p)
      -> std::optional<double> {
    for (const RunRecord& r : ds.records)
      if (r.n_params == n && r.dft_tokens == d && r.p == p)
        return fitting::response_value(family, r, l0);
    return std::nullopt;
  };
  auto predicted_at = [&](uint64_t n, uint64_t d, double p) {
    RunRecord probe;
    probe.n_params = n;
    probe.dft_tokens = d;
    probe.p = p;
    std::vector<RunRecord> one{probe};
    return fitting::predict_batch(family, in.fit->params, one, l0)[0];
  };

  std::ofstream out(output, std::ios::binary);
  if (!out) throw InputError("cannot write " + output);
  out << "axis,x,predicted,observed\n";
  auto emit = [&](const char* axis, double x, double pred,
                  std::optional<double> obs) {
    out << axis << "," << io::fmt_double(x) << "," << io::fmt_double(pred)
        << ",";
    if (obs) out << io::fmt_double(*obs);
    out << "\n";
  };
  for (uint64_t n : n_set)
    emit("n_params", static_cast<double>(n), predicted_at(n, d_mid, p_mid),
         observed_at(n, d_mid, p_mid));
  for (uint64_t d : d_set)
    emit("dft_tokens", static_cast<double>(d), predicted_at(n_mid, d, p_mid),
         observed_at(n_mid, d, p_mid));
  for (double p : p_set)
    emit("p", p, predicted_at(n_mid, d_mid, p), observed_at(n_mid, d_mid, p));

  std::cout << "report slices written to " << output << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaling-law laboratory for finetuning and forgetting"};
  app.require_subcommand(1);

  std::vector<std::string> inputs;
  std::string output;
  std::string family_tag = "multiplicative_ft";
  std::string setup_tag = "A";
  std::string grid_preset = "paper125";
  std::string domain = "arxiv";
  std::string variant_tag = "adam";
  double huber_delta = 0;
  double noise_sigma = 0;
  double p_value = 0;
  double lambda = 0;
  double lr = 0.1;
  uint64_t seed = 0;
  uint64_t n_value = 0;
  uint64_t steps = 100;
  int reps = 128;

  auto add_inputs = [&](CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--input", inputs,
                                "input file (.jsonl runs, .json table/fit)");
    if (required) opt->required();
  };
  auto add_output = [&](CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--output", output, "output file");
    if (required) opt->required();
  };

  CLI::App* fit = app.add_subcommand("fit", "fit a law family to run records");
  add_inputs(fit);
  add_output(fit);
  fit->add_option("--family", family_tag, "law family tag");
  fit->add_option("--huber-delta", huber_delta, "residual half-width");

  CLI::App* boot = app.add_subcommand("bootstrap",
                                      "resampled fit stability, CSV rep,mre");
  add_inputs(boot);
  add_output(boot);
  boot->add_option("--family", family_tag, "law family tag");
  boot->add_option("--huber-delta", huber_delta, "residual half-width");
  boot->add_option("--reps", reps, "bootstrap repetitions");
  boot->add_option("--seed", seed, "resampling seed");

  CLI::App* extrap = app.add_subcommand("extrapolate",
                                        "fit small, score held-out large");
  add_inputs(extrap);
  add_output(extrap, false);
  extrap->add_option("--family", family_tag, "law family tag");
  extrap->add_option("--setup", setup_tag, "exclusion setup, A or B");
  extrap->add_option("--huber-delta", huber_delta, "residual half-width");

  CLI::App* predict = app.add_subcommand("predict",
                                         "evaluate a stored fit on records");
  add_inputs(predict);
  add_output(predict);

  CLI::App* simulate = app.add_subcommand("simulate",
                                          "generate a synthetic run grid");
  add_output(simulate);
  simulate->add_option("--grid-preset", grid_preset, "paper125 or ift");
  simulate->add_option("--domain", domain, "domain preset for paper125");
  simulate->add_option("--noise-sigma", noise_sigma, "lognormal noise scale");
  simulate->add_option("--seed", seed, "noise seed");

  CLI::App* ucurve = app.add_subcommand("ucurve",
                                        "locate the bottom of a loss curve");
  add_inputs(ucurve);
  add_output(ucurve, false);

  CLI::App* mix = app.add_subcommand("mix-stats",
                                     "mixture source-choice statistics");
  add_output(mix, false);
  mix->add_option("--p", p_value, "injected-source probability")->required();
  mix->add_option("--n", n_value, "number of picks")->required();
  mix->add_option("--seed", seed, "mixture seed");

  CLI::App* toy = app.add_subcommand("toy-opt",
                                     "optimizer variants on a quadratic");
  add_output(toy);
  toy->add_option("--variant", variant_tag, "adam, adamw, anchored_adamw");
  toy->add_option("--lambda", lambda, "decay strength");
  toy->add_option("--steps", steps, "update count");
  toy->add_option("--lr", lr, "learning rate");

  CLI::App* report = app.add_subcommand("report",
                                        "slice CSV of a stored fit");
  add_inputs(report);
  add_output(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (fit->parsed())
      return cmd_fit(inputs, output, family_tag, huber_delta);
    if (boot->parsed())
      return cmd_bootstrap(inputs, output, family_tag, huber_delta, reps,
                           seed);
    if (extrap->parsed())
      return cmd_extrapolate(inputs, output, family_tag, setup_tag,
                             huber_delta);
    if (predict->parsed()) return cmd_predict(inputs, output);
    if (simulate->parsed())
      return cmd_simulate(output, grid_preset, domain, noise_sigma, seed);
    if (ucurve->parsed()) return cmd_ucurve(inputs, output);
    if (mix->parsed()) return cmd_mix_stats(output, p_value, n_value, seed);
    if (toy->parsed())
      return cmd_toy_opt(output, variant_tag, lambda, steps, lr);
    if (report->parsed()) return cmd_report(inputs, output);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fitting::FitFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
