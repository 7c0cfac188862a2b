// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "msblade/filterbank.hpp"
#include "msblade/parallel.hpp"
#include "msblade/png_io.hpp"
#include "msblade/pyramid.hpp"

namespace {

std::string OneLine(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int Fail(const std::string& kind, const std::string& msg, int code) {
  std::cerr << "error kind=" << kind << " message=\"" << OneLine(msg) << "\"\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = msblade::cli;
  CLI::App app{"msblade: learned multiscale image denoising"};
  app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags win");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  cli::SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Write noisy copies of a clean PNG directory");
  s->add_option("--in", synth.in_dir, "Clean PNG directory")->required();
  s->add_option("--out", synth.out_dir, "Output directory")->required();
  s->add_option("--sigma", synth.sigma, "AWGN standard deviation (8-bit units)");
  s->add_option("--seed", synth.seed, "Root seed");

  cli::TrainOptions train;
  auto* t = app.add_subcommand("train", "Train a filterbank from clean PNGs");
  t->add_option("--clean", train.clean_dir, "Clean PNG directory")->required();
  t->add_option("--out", train.out, "Output .msbf path")->required();
  t->add_option("--sigma", train.config.sigma, "Noise level to train for");
  t->add_option("--n-orient", train.config.n_orient);
  t->add_option("--n-strength", train.config.n_strength);
  t->add_option("--n-coherence", train.config.n_coherence);
  t->add_option("--fine-size", train.config.fine_size, "0 = default for sigma");
  t->add_option("--coarse-size", train.config.coarse_size, "0 = default for sigma");
  t->add_option("--depth", train.config.pyramid_depth, "-1 = sigma rule");
  t->add_option("--ridge", train.config.ridge);
  t->add_option("--min-count", train.config.min_count, "0 = 4 x taps");
  t->add_option("--threshold-samples", train.config.threshold_samples);
  t->add_option("--seed", train.config.root_seed);
  bool no_augment = false;
  t->add_flag("--no-augment", no_augment, "Disable D4 augmentation");
  t->add_flag("--fixed-scale", train.fixed_scale, "Train a single-level bank");

  cli::DenoiseOptions den;
  auto* d = app.add_subcommand("denoise", "Denoise one PNG");
  d->add_option("--bank", den.bank)->required();
  d->add_option("--in", den.in)->required();
  d->add_option("--out", den.out)->required();
  d->add_flag("--fixed-scale", den.fixed_scale);

  cli::EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Synthesize, denoise and score a clean PNG directory");
  e->add_option("--bank", ev.bank)->required();
  e->add_option("--clean", ev.clean_dir)->required();
  e->add_option("--sigma", ev.sigma);
  e->add_option("--seed", ev.seed);
  e->add_option("--csv", ev.csv);
  e->add_flag("--fixed-scale", ev.fixed_scale);

  cli::InspectOptions ins;
  auto* i = app.add_subcommand("inspect", "Render filter grids and dump bank metadata");
  i->add_option("--bank", ins.bank)->required();
  i->add_option("--out", ins.out_png)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    return Fail("usage", ex.what(), 2);
  }

  try {
    msblade::SetThreadCount(threads);
    if (*s) cli::CmdSynth(synth, std::cout);
    if (*t) {
      train.config.augment = !no_augment;
      cli::CmdTrain(train, std::cout);
    }
    if (*d) cli::CmdDenoise(den, std::cout);
    if (*e) cli::CmdEval(ev, std::cout);
    if (*i) cli::CmdInspect(ins, std::cout);
  } catch (const cli::UsageError& ex) {
    return Fail("usage", ex.what(), 2);
  } catch (const msblade::FilterbankError& ex) {
    return Fail(msblade::ToString(ex.kind()), ex.what(), 3);
  } catch (const msblade::PngError& ex) {
    return Fail("png", ex.what(), 4);
  } catch (const msblade::BankMismatchError& ex) {
    return Fail("bank_mismatch", ex.what(), 5);
  } catch (const std::exception& ex) {
    return Fail("runtime", ex.what(), 1);
  }
  return 0;
}
