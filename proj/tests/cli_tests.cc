// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// End-to-end tests of the command-line binary, spawned as a subprocess.
// EEGSEP_BIN is injected by the build and points at the built executable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "data/splits.h"
#include "data/wav.h"

namespace fs = std::filesystem;
using namespace eegsep;

namespace {

struct CmdResult {
  int code = -1;
  std::string out;  // stdout + stderr interleaved
};

CmdResult run_cli(const std::string& args) {
  const std::string cmd = std::string(EEGSEP_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "eegsep_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Small geometry so a full train/eval cycle stays in test-suite time.
std::string tiny_config() {
  static const std::string path = [] {
    fs::path p = scratch_dir() / "tiny.cfg";
    std::ofstream out(p);
    out << "codec.channels 16\ncodec.kernel_len 8\n"
           "eeg.electrodes 4\neeg.fs 128\neeg.scale_filters 2\n"
           "eeg.temporal_features 6\neeg.stride 4\neeg.heads 4\n"
           "eeg.out_channels 8\n"
           "sep.channels 16\nsep.blocks 1\nsep.chunk 4\n"
           "sep.fsmn_taps 3\nsep.fsmn_dilations 1,2\n"
           "train.epochs 1\ntrain.crop_s 1\ntrain.lr 0.001\n"
           "data.fs_audio 2000\ndata.fs_eeg 128\ndata.duration_s 1\n"
           "data.eeg_channels 4\n";
    return p.string();
  }();
  return path;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Scene directory shared by the train / eval / extract tests.
std::string shared_scenes() {
  static const std::string dir = [] {
    fs::path d = scratch_dir() / "scenes";
    CmdResult r = run_cli("synth --out " + d.string() +
                          " --scenes 8 --seed 7 --config " + tiny_config());
    REQUIRE(r.code == 0);
    return d.string();
  }();
  return dir;
}

// Completed run directory shared by the eval / extract tests.
std::string shared_run() {
  static const std::string dir = [] {
    fs::path d = scratch_dir() / "run";
    CmdResult r = run_cli("train --config " + tiny_config() + " --data " +
                          shared_scenes() + " --run-dir " + d.string());
    REQUIRE(r.code == 0);
    return d.string();
  }();
  return dir;
}

}  // namespace

TEST_CASE("synth writes a deterministic dataset with a 12/2/2 manifest") {
  fs::path a = scratch_dir() / "synth_a";
  fs::path b = scratch_dir() / "synth_b";
  CmdResult ra = run_cli("synth --out " + a.string() +
                         " --scenes 16 --seed 3 --config " + tiny_config());
  CHECK(ra.code == 0);
  data::SplitManifest m = data::read_manifest((a / "manifest.txt").string());
  CHECK(m.train.size() == 12);
  CHECK(m.validation.size() == 2);
  CHECK(m.test.size() == 2);
  CHECK(m.total() == 16);

  CmdResult rb = run_cli("synth --out " + b.string() +
                         " --scenes 16 --seed 3 --config " + tiny_config());
  CHECK(rb.code == 0);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    fs::path twin = b / entry.path().filename();
    REQUIRE(fs::exists(twin));
    CHECK(read_file(entry.path()) == read_file(twin));
    ++compared;
  }
  CHECK(compared == 16 * 5 + 1);  // five files per scene plus the manifest
}

TEST_CASE("synth rejects a non-positive scene count") {
  CmdResult r = run_cli("synth --out " + (scratch_dir() / "none").string() +
                        " --scenes 0");
  CHECK(r.code == 1);
  CHECK(r.out.find("positive") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected with file and line") {
  fs::path bad = scratch_dir() / "bad.cfg";
  std::ofstream(bad) << "bogus.key 1\nother.bad x\n";
  CmdResult r = run_cli("train --config " + bad.string() + " --data " +
                        shared_scenes() + " --run-dir " +
                        (scratch_dir() / "never").string());
  CHECK(r.code == 1);
  CHECK(r.out.find("unknown config key: bogus.key") != std::string::npos);
  CHECK(r.out.find("unknown config key: other.bad") != std::string::npos);
  CHECK(r.out.find("bad.cfg:1") != std::string::npos);
  CHECK(r.out.find("bad.cfg:2") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch_dir() / "never"));
}

TEST_CASE("training writes artifacts and refuses to reuse a run directory") {
  std::string run = shared_run();
  for (const char* f : {"resolved.cfg", "loss_trace.txt", "epochs.txt",
                        "last.ckpt", "best.ckpt"}) {
    CHECK(fs::exists(fs::path(run) / f));
  }
  // Resolved config echoes the hyperparameters actually used.
  std::string resolved = read_file(fs::path(run) / "resolved.cfg");
  CHECK(resolved.find("sep.blocks 1\n") != std::string::npos);
  CHECK(resolved.find("train.epochs 1\n") != std::string::npos);
  // Step trace: header plus one line per optimizer step (6 train scenes).
  std::string trace = read_file(fs::path(run) / "loss_trace.txt");
  CHECK(trace.substr(0, 19) == "step epoch lr loss\n");

  CmdResult again = run_cli("train --config " + tiny_config() + " --data " +
                            shared_scenes() + " --run-dir " + run);
  CHECK(again.code == 1);
  CHECK(again.out.find("already exists") != std::string::npos);

  CmdResult forced = run_cli("train --config " + tiny_config() + " --data " +
                             shared_scenes() + " --run-dir " + run + " --force");
  CHECK(forced.code == 0);
}

TEST_CASE("eval scores a checkpoint and refuses a mismatched config") {
  CmdResult r = run_cli("eval --checkpoint " + shared_run() +
                        "/best.ckpt --data " + shared_scenes() +
                        " --split test --out " +
                        (scratch_dir() / "report.txt").string());
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, 16) == "metric-report 1\n");
  CHECK(r.out.find("aggregate model mean") != std::string::npos);
  CHECK(read_file(scratch_dir() / "report.txt") == r.out);

  CmdResult bad = run_cli("eval --checkpoint " + shared_run() +
                          "/best.ckpt --data " + shared_scenes() +
                          " --override sep.blocks=3");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("does not match") != std::string::npos);
}

TEST_CASE("extract produces a mixture-length estimate") {
  fs::path est = scratch_dir() / "est.wav";
  CmdResult r = run_cli("extract --checkpoint " + shared_run() +
                        "/best.ckpt --mixture " + shared_scenes() +
                        "/scene_0007.mix.wav --eeg " + shared_scenes() +
                        "/scene_0007.eeg --out " + est.string());
  CHECK(r.code == 0);
  data::Wav mix = data::read_wav(shared_scenes() + "/scene_0007.mix.wav");
  data::Wav out = data::read_wav(est.string());
  CHECK(out.channels.size() == 1);
  CHECK(out.frames() == mix.frames());
  CHECK(out.sample_rate == mix.sample_rate);
}

TEST_CASE("depth sweep writes one ablation row per block count") {
  fs::path run = scratch_dir() / "run_ablate";
  CmdResult r = run_cli("train --config " + tiny_config() + " --data " +
                        shared_scenes() + " --run-dir " + run.string() +
                        " --ablate-depth 1:2 --override train.max_steps=2");
  CHECK(r.code == 0);
  std::string table = read_file(run / "ablation.txt");
  CHECK(table.find("depth params") == 0);
  CHECK(table.find("\n1 ") != std::string::npos);
  CHECK(table.find("\n2 ") != std::string::npos);
  CHECK_FALSE(fs::exists(run / "last.ckpt"));  // sweep mode: table only

  CmdResult bad = run_cli("train --config " + tiny_config() + " --data " +
                          shared_scenes() + " --run-dir " +
                          (run.string() + "_bad") + " --ablate-depth 3:1");
  CHECK(bad.code == 1);
}

TEST_CASE("gradient verification passes and the corrupted fixture fails") {
  CmdResult ok = run_cli("gradcheck");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("si_sdr_loss") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);

  CmdResult bad = run_cli("gradcheck --corrupt attention_block");
  CHECK(bad.code == 2);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}
