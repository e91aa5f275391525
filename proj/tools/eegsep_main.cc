// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line front end. Subcommands:
//   synth     render labeled synthetic scenes + train/validation/test manifest
//   train     fit the separator on a scene directory (optionally a depth sweep)
//   eval      score a checkpoint on a manifest split
//   extract   run one mixture + EEG recording through a checkpoint
//   gradcheck finite-difference verification of every differentiable block
//
// Exit codes: 0 success; 1 usage/config/file-format problems; 2 runtime
// failures (including training aborts and failed gradient checks).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/gradcheck_suite.h"
#include "cli/run_config.h"
#include "common/error.h"
#include "common/text.h"
#include "data/eeg_io.h"
#include "data/splits.h"
#include "data/synth.h"
#include "data/wav.h"
#include "train/checkpoint.h"
#include "train/evaluate.h"
#include "train/model.h"
#include "train/trainer.h"

namespace fs = std::filesystem;
using namespace eegsep;

namespace {

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const std::string& out_dir, int64_t n_scenes, uint64_t seed,
              const std::string& config_path,
              const std::vector<std::string>& overrides) {
  if (n_scenes < 1) throw ConfigError("--scenes must be a positive count");
  cli::RunConfig cfg = cli::load_run_config(config_path, overrides);
  data::SceneConfig sc = cfg.data.scene_config();
  sc.validate();

  fs::create_directories(out_dir);
  std::vector<std::string> ids;
  for (int64_t i = 0; i < n_scenes; ++i) {
    std::string id = strprintf("scene_%04lld", static_cast<long long>(i));
    data::Scene scene = data::synth_scene(seed + static_cast<uint64_t>(i), sc);
    data::save_scene(out_dir, id, scene);
    ids.push_back(id);
  }
  data::SplitManifest m =
      data::make_splits(ids, cfg.data.train_frac, cfg.data.validation_frac,
                        cfg.data.test_frac, seed);
  data::write_manifest(out_dir + "/manifest.txt", m);
  std::printf("wrote %lld scenes to %s (train %zu / validation %zu / test %zu)\n",
              static_cast<long long>(n_scenes), out_dir.c_str(), m.train.size(),
              m.validation.size(), m.test.size());
  return 0;
}

// ---------------------------------------------------------------------------
// train

std::string step_trace_text(const train::TrainResult& log) {
  std::string out = "step epoch lr loss\n";
  for (const train::StepLog& s : log.steps) {
    out += strprintf("%lld %lld %s %s\n", static_cast<long long>(s.step),
                     static_cast<long long>(s.epoch), fmt_full(s.lr).c_str(),
                     fmt_full(s.loss).c_str());
  }
  return out;
}

std::string epoch_trace_text(const train::TrainResult& log) {
  std::string out = "epoch lr train_si_sdr val_si_sdr best\n";
  for (const train::EpochLog& e : log.epochs) {
    out += strprintf("%lld %s %s %s %d\n", static_cast<long long>(e.epoch),
                     fmt_full(e.lr).c_str(), fmt_full(e.train_si_sdr).c_str(),
                     fmt_full(e.val_si_sdr).c_str(), e.is_best ? 1 : 0);
  }
  return out;
}

void parse_depth_range(const std::string& text, int64_t* lo, int64_t* hi) {
  size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
    throw ConfigError("--ablate-depth expects LO:HI, got '" + text + "'");
  }
  char* end = nullptr;
  *lo = std::strtoll(text.c_str(), &end, 10);
  if (end != text.c_str() + colon) {
    throw ConfigError("--ablate-depth expects LO:HI, got '" + text + "'");
  }
  *hi = std::strtoll(text.c_str() + colon + 1, &end, 10);
  if (*end != '\0') {
    throw ConfigError("--ablate-depth expects LO:HI, got '" + text + "'");
  }
  if (*lo < 1 || *hi < *lo) {
    throw ConfigError(strprintf("--ablate-depth needs 1 <= LO <= HI, got %lld:%lld",
                                static_cast<long long>(*lo),
                                static_cast<long long>(*hi)));
  }
}

int cmd_train(const std::string& config_path,
              const std::vector<std::string>& overrides,
              const std::string& data_dir, const std::string& run_dir_opt,
              bool force, const std::string& ablate) {
  cli::RunConfig cfg = cli::load_run_config(config_path, overrides);
  if (!data_dir.empty()) cfg.data.dir = data_dir;

  std::vector<std::string> problems = cli::validate_all(cfg);
  if (cfg.data.dir.empty()) {
    problems.push_back("data: a scene directory is required (--data or data.dir)");
  }
  if (!problems.empty()) {
    for (const std::string& p : problems) std::fprintf(stderr, "config: %s\n", p.c_str());
    return 1;
  }

  std::string run_dir =
      run_dir_opt.empty() ? cfg.run_root + "/" + cfg.run_name : run_dir_opt;
  if (fs::exists(run_dir) && !force) {
    throw ConfigError("run directory " + run_dir +
                      " already exists; choose a new --run-dir or pass --force");
  }
  fs::create_directories(run_dir);
  write_text_file(run_dir + "/resolved.cfg", cli::resolved_text(cfg));

  std::vector<data::Scene> train_scenes = cli::load_split(cfg.data.dir, "train", nullptr);
  std::vector<data::Scene> val_scenes =
      cli::load_split(cfg.data.dir, "validation", nullptr);

  if (!ablate.empty()) {
    int64_t lo = 0, hi = 0;
    parse_depth_range(ablate, &lo, &hi);
    std::string table = "depth params train_si_sdr best_val_si_sdr best_epoch status\n";
    bool any_aborted = false;
    for (int64_t r = lo; r <= hi; ++r) {
      train::ModelConfig mc = cfg.model;
      mc.sep.blocks = r;
      train::TrainOutput out = train::train_model(mc, cfg.train, train_scenes, val_scenes);
      const double last_train = out.log.epochs.empty()
                                    ? std::nan("")
                                    : out.log.epochs.back().train_si_sdr;
      table += strprintf("%lld %lld %s %s %lld %s\n", static_cast<long long>(r),
                         static_cast<long long>(out.params.num_trainable()),
                         fmt_full(last_train).c_str(),
                         fmt_full(out.log.best_metric).c_str(),
                         static_cast<long long>(out.log.best_epoch),
                         out.log.aborted ? "aborted" : "ok");
      any_aborted = any_aborted || out.log.aborted;
      if (out.log.aborted) {
        std::fprintf(stderr, "depth %lld: %s\n", static_cast<long long>(r),
                     out.log.abort_reason.c_str());
      }
    }
    write_text_file(run_dir + "/ablation.txt", table);
    std::fputs(table.c_str(), stdout);
    std::printf("wrote %s/ablation.txt\n", run_dir.c_str());
    return any_aborted ? 2 : 0;
  }

  train::TrainOutput out = train::train_model(cfg.model, cfg.train, train_scenes, val_scenes);
  write_text_file(run_dir + "/loss_trace.txt", step_trace_text(out.log));
  write_text_file(run_dir + "/epochs.txt", epoch_trace_text(out.log));
  const int64_t done_epochs = static_cast<int64_t>(out.log.epochs.size());
  train::write_checkpoint(run_dir + "/last.ckpt",
                          train::snapshot(cfg.model, out.params, &out.adam, done_epochs));
  if (out.log.best_epoch > 0) {
    train::write_checkpoint(
        run_dir + "/best.ckpt",
        train::snapshot(cfg.model, out.best_params, nullptr, out.log.best_epoch));
  }
  std::printf("run %s: %zu steps, %lld epochs", run_dir.c_str(),
              out.log.steps.size(), static_cast<long long>(done_epochs));
  if (out.log.best_epoch > 0) {
    std::printf(", best epoch %lld (%.3f dB SI-SDR)",
                static_cast<long long>(out.log.best_epoch), out.log.best_metric);
  }
  std::printf("\n");
  if (out.log.aborted) {
    std::fprintf(stderr, "training aborted: %s\n", out.log.abort_reason.c_str());
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const std::string& ckpt_path, const std::string& data_dir,
             const std::string& split, const std::string& out_path,
             const std::string& config_path,
             const std::vector<std::string>& overrides) {
  train::Checkpoint ckpt = train::read_checkpoint(ckpt_path);
  if (!config_path.empty() || !overrides.empty()) {
    cli::RunConfig given = cli::load_run_config(config_path, overrides);
    if (given.model.hash() != ckpt.config_hash) {
      throw ConfigError(strprintf(
          "model config hash %016llx does not match checkpoint %016llx; refusing",
          static_cast<unsigned long long>(given.model.hash()),
          static_cast<unsigned long long>(ckpt.config_hash)));
    }
  }
  train::ModelConfig mc = train::config_from_checkpoint(ckpt);
  nn::ParamRegistry<double> reg;
  train::apply_checkpoint(ckpt, &reg, nullptr);

  std::vector<std::string> ids;
  std::vector<data::Scene> scenes = cli::load_split(data_dir, split, &ids);
  if (scenes.empty()) throw ConfigError("split '" + split + "' has no scenes");
  train::MetricReport report = train::evaluate_model(mc, reg, scenes, ids);
  std::string text = train::report_text(report);
  std::fputs(text.c_str(), stdout);
  if (!out_path.empty()) write_text_file(out_path, text);
  return 0;
}

// ---------------------------------------------------------------------------
// extract

int cmd_extract(const std::string& ckpt_path, const std::string& mix_path,
                const std::string& eeg_path, const std::string& out_path) {
  train::Checkpoint ckpt = train::read_checkpoint(ckpt_path);
  train::ModelConfig mc = train::config_from_checkpoint(ckpt);
  nn::ParamRegistry<double> reg;
  train::apply_checkpoint(ckpt, &reg, nullptr);

  data::Wav mix = data::read_wav(mix_path);
  if (mix.channels.size() != 1) {
    throw ConfigError("mixture must be mono, got " +
                      std::to_string(mix.channels.size()) + " channels");
  }
  data::EegRecording rec = data::read_eeg(eeg_path);
  if (std::fabs(rec.fs - mc.eeg.fs) > 1e-9) {
    throw ConfigError(strprintf(
        "EEG sample rate %s Hz does not match the model's %s Hz",
        fmt_full(rec.fs).c_str(), fmt_full(mc.eeg.fs).c_str()));
  }
  if (rec.channels() != mc.eeg.electrodes) {
    throw ConfigError(strprintf(
        "EEG has %lld channels but the model expects %lld",
        static_cast<long long>(rec.channels()),
        static_cast<long long>(mc.eeg.electrodes)));
  }

  nn::Workspace<double> ws(&reg);
  nn::Var<double> est =
      train::model_forward(ws, mix.channels[0], rec.to_tensor(), mc, false);
  const nn::Tensor<double>& y = est.value();
  data::Wav out;
  out.sample_rate = mix.sample_rate;
  out.channels = {std::vector<double>(y.data(), y.data() + y.size())};
  data::write_wav(out_path, out, data::WavEncoding::kFloat32);
  std::printf("wrote %s (%lld samples at %g Hz)\n", out_path.c_str(),
              static_cast<long long>(y.size()), mix.sample_rate);
  return 0;
}

// ---------------------------------------------------------------------------
// gradcheck

int cmd_gradcheck(const std::string& corrupt) {
  std::vector<cli::GradCheckRow> rows = cli::run_gradcheck_suite(corrupt);
  std::fputs(cli::gradcheck_table(rows).c_str(), stdout);
  return cli::gradcheck_all_pass(rows) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brain-steered target-speaker extraction toolkit"};
  app.require_subcommand(1);

  std::string config_path, data_dir, run_dir, ablate, split = "test";
  std::string ckpt_path, mix_path, eeg_path, out_path, out_dir, corrupt;
  std::vector<std::string> overrides;
  int64_t n_scenes = 0;
  uint64_t seed = 1;
  bool force = false;

  CLI::App* synth = app.add_subcommand("synth", "render synthetic scenes");
  synth->add_option("--out", out_dir, "output scene directory")->required();
  synth->add_option("--scenes", n_scenes, "number of scenes")->required();
  synth->add_option("--seed", seed, "base seed (scene i uses seed+i)");
  synth->add_option("--config", config_path, "run config file");
  synth->add_option("--override", overrides, "key=value config override");

  CLI::App* train_cmd = app.add_subcommand("train", "fit the separator");
  train_cmd->add_option("--config", config_path, "run config file");
  train_cmd->add_option("--override", overrides, "key=value config override");
  train_cmd->add_option("--data", data_dir, "scene directory (overrides data.dir)");
  train_cmd->add_option("--run-dir", run_dir, "artifact directory (default run.root/run.name)");
  train_cmd->add_flag("--force", force, "reuse an existing run directory");
  train_cmd->add_option("--ablate-depth", ablate,
                        "LO:HI block-depth sweep; writes ablation.txt instead of checkpoints");

  CLI::App* eval_cmd = app.add_subcommand("eval", "score a checkpoint on a split");
  eval_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  eval_cmd->add_option("--data", data_dir, "scene directory")->required();
  eval_cmd->add_option("--split", split, "train | validation | test");
  eval_cmd->add_option("--out", out_path, "also write the report here");
  eval_cmd->add_option("--config", config_path, "config to cross-check against the checkpoint");
  eval_cmd->add_option("--override", overrides, "key=value config override");

  CLI::App* extract = app.add_subcommand("extract", "separate one mixture");
  extract->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  extract->add_option("--mixture", mix_path, "mono mixture WAV")->required();
  extract->add_option("--eeg", eeg_path, "EEG recording")->required();
  extract->add_option("--out", out_path, "output WAV")->required();

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "verify analytic gradients");
  gradcheck->add_option("--corrupt", corrupt,
                        "damage one case's gradient (harness self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(out_dir, n_scenes, seed, config_path, overrides);
    if (train_cmd->parsed())
      return cmd_train(config_path, overrides, data_dir, run_dir, force, ablate);
    if (eval_cmd->parsed())
      return cmd_eval(ckpt_path, data_dir, split, out_path, config_path, overrides);
    if (extract->parsed()) return cmd_extract(ckpt_path, mix_path, eeg_path, out_path);
    if (gradcheck->parsed()) return cmd_gradcheck(corrupt);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
