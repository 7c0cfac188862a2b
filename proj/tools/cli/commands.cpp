// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "msblade/color.hpp"
#include "msblade/metrics.hpp"
#include "msblade/noise.hpp"
#include "msblade/png_io.hpp"
#include "msblade/pyramid.hpp"

namespace msblade::cli {
namespace {

namespace fs = std::filesystem;

std::string Fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

double Megapixels(const Image& img) {
  return static_cast<double>(img.width()) * static_cast<double>(img.height()) / 1e6;
}

Image LoadRgb(const fs::path& path) { return ToRgb(LoadPng(path)); }

// Log-scale occupancy bins: 0, 1-9, 10-99, ...
void PrintOccupancyHistogram(const LevelBank& bank, int level, std::ostream& log) {
  std::vector<int> bins;
  for (const std::uint64_t n : bank.sample_counts()) {
    std::size_t b = 0;
    for (std::uint64_t v = n; v > 0; v /= 10) ++b;
    if (bins.size() <= b) bins.resize(b + 1, 0);
    ++bins[b];
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (bins[b] == 0) continue;
    std::uint64_t lo = 0, hi = 0;
    if (b > 0) {
      lo = 1;
      for (std::size_t i = 1; i < b; ++i) lo *= 10;
      hi = lo * 10 - 1;
    }
    log << "event=occupancy level=" << level << " samples=" << lo << "-" << hi
        << " buckets=" << bins[b] << "\n";
  }
}

}  // namespace

std::vector<fs::path> ListPngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

std::uint64_t ImageSeed(std::uint64_t root_seed, const std::string& file_name) {
  return MixSeed(root_seed, HashName(file_name));
}

DirectoryCorpus::DirectoryCorpus(const fs::path& dir, double sigma, std::uint64_t root_seed)
    : files_(ListPngs(dir)), sigma_(sigma), root_seed_(root_seed) {
  if (files_.empty()) throw std::runtime_error("no PNG files in " + dir.string());
}

TrainingPair DirectoryCorpus::Load(std::size_t index) const {
  const fs::path& p = files_.at(index);
  TrainingPair pair;
  pair.name = p.filename().string();
  pair.clean = LoadRgb(p);
  pair.noisy = AddAwgn(pair.clean, {NoiseKind::kAwgn, sigma_, ImageSeed(root_seed_, pair.name)});
  return pair;
}

void CmdSynth(const SynthOptions& opts, std::ostream& log) {
  const auto files = ListPngs(opts.in_dir);
  if (files.empty()) throw std::runtime_error("no PNG files in " + opts.in_dir.string());
  fs::create_directories(opts.out_dir);
  std::ofstream manifest(opts.out_dir / "manifest.tsv");
  if (!manifest) throw std::runtime_error("cannot write " + (opts.out_dir / "manifest.tsv").string());
  manifest << "clean\tnoisy\tsigma\tseed\n";
  for (const auto& p : files) {
    const std::string name = p.filename().string();
    const std::uint64_t seed = ImageSeed(opts.seed, name);
    const Image noisy = AddAwgn(LoadRgb(p), {NoiseKind::kAwgn, opts.sigma, seed});
    const fs::path out = opts.out_dir / name;
    SavePng(noisy, out);
    manifest << fs::absolute(p).string() << "\t" << fs::absolute(out).string() << "\t" << opts.sigma
             << "\t" << seed << "\n";
  }
  log << "event=synth images=" << files.size() << " sigma=" << opts.sigma << " seed=" << opts.seed
      << "\n";
}

Filterbank CmdTrain(const TrainOptions& opts, std::ostream& log) {
  const DirectoryCorpus corpus(opts.clean_dir, opts.config.sigma, opts.config.root_seed);
  const auto progress = [&log](const std::string& line) { log << line << "\n" << std::flush; };
  Filterbank fb = opts.fixed_scale ? TrainFixedScale(corpus, opts.config, progress)
                                   : TrainMultiscale(corpus, opts.config, progress);
  for (std::size_t l = 0; l < fb.levels.size(); ++l) {
    const LevelBank& bank = fb.levels[l];
    const std::uint64_t min_count =
        opts.config.min_count > 0 ? opts.config.min_count
                                  : 4u * static_cast<std::uint64_t>(bank.footprint().taps());
    const OccupancyReport r = DescribeOccupancy(bank, static_cast<int>(l), min_count);
    PrintOccupancyHistogram(bank, static_cast<int>(l), log);
    log << "event=level_summary level=" << r.level << " buckets=" << r.buckets
        << " empty=" << r.empty_buckets << " fallback=" << r.fallback_buckets
        << " min_count=" << r.min_count << " samples=" << r.total_samples << "\n";
  }
  SaveFilterbank(fb, opts.out);
  log << "event=saved path=" << opts.out.string() << " levels=" << fb.levels.size()
      << " depth=" << fb.pyramid_depth << "\n";
  return fb;
}

Image Denoise(const Filterbank& fb, const Image& img, bool fixed_scale) {
  if (fixed_scale) {
    if (!fb.fixed_scale()) {
      throw UsageError("--fixed-scale needs a fixed-scale bank; this bank is multiscale with depth " +
                       std::to_string(fb.pyramid_depth));
    }
    return ApplyFixed(fb.levels.front(), img);
  }
  return ApplyMultiscale(fb, img);
}

void CmdDenoise(const DenoiseOptions& opts, std::ostream& log) {
  const Filterbank fb = LoadFilterbank(opts.bank);
  if (opts.fixed_scale && !fb.fixed_scale()) {
    throw UsageError("--fixed-scale needs a fixed-scale bank; this bank is multiscale with depth " +
                     std::to_string(fb.pyramid_depth));
  }
  const Image in = LoadRgb(opts.in);
  const auto t0 = std::chrono::steady_clock::now();
  const Image out = Denoise(fb, in, opts.fixed_scale);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  SavePng(out, opts.out);
  const double mp = Megapixels(in);
  log << "event=denoised path=" << opts.out.string() << " seconds=" << Fixed(secs, 6)
      << " megapixels=" << Fixed(mp, 6) << " mp_per_s=" << Fixed(secs > 0 ? mp / secs : 0.0, 3)
      << "\n";
}

void Summarize(EvalReport& report) {
  report.mean_noisy_psnr = 0.0;
  report.mean_denoised_psnr = 0.0;
  report.total_seconds = 0.0;
  report.total_megapixels = 0.0;
  for (const EvalRow& r : report.rows) {
    report.mean_noisy_psnr += r.noisy_psnr;
    report.mean_denoised_psnr += r.denoised_psnr;
    report.total_seconds += r.seconds;
    report.total_megapixels += r.megapixels;
  }
  if (!report.rows.empty()) {
    const double n = static_cast<double>(report.rows.size());
    report.mean_noisy_psnr /= n;
    report.mean_denoised_psnr /= n;
  }
  report.megapixels_per_second =
      report.total_seconds > 0 ? report.total_megapixels / report.total_seconds : 0.0;
}

EvalReport CmdEval(const EvalOptions& opts, std::ostream& log) {
  const Filterbank fb = LoadFilterbank(opts.bank);
  if (opts.fixed_scale && !fb.fixed_scale()) {
    throw UsageError("--fixed-scale needs a fixed-scale bank; this bank is multiscale with depth " +
                     std::to_string(fb.pyramid_depth));
  }
  const DirectoryCorpus corpus(opts.clean_dir, opts.sigma, opts.seed);
  EvalReport report;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const TrainingPair pair = corpus.Load(i);
    const auto t0 = std::chrono::steady_clock::now();
    const Image out = Denoise(fb, pair.noisy, opts.fixed_scale);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EvalRow row;
    row.name = pair.name;
    row.noisy_psnr = Psnr(pair.clean, pair.noisy);
    row.denoised_psnr = Psnr(pair.clean, out);
    row.seconds = secs;
    row.megapixels = Megapixels(pair.clean);
    report.rows.push_back(row);
  }
  Summarize(report);
  if (!opts.csv.empty()) {
    std::ofstream f(opts.csv);
    if (!f) throw std::runtime_error("cannot write " + opts.csv.string());
    WriteEvalCsv(report, f);
  }
  PrintEvalTable(report, log);
  return report;
}

void WriteEvalCsv(const EvalReport& report, std::ostream& out) {
  out << "name,noisy_psnr,denoised_psnr,seconds,megapixels\n";
  for (const EvalRow& r : report.rows) {
    out << r.name << "," << Fixed(r.noisy_psnr, 10) << "," << Fixed(r.denoised_psnr, 10) << ","
        << Fixed(r.seconds, 6) << "," << Fixed(r.megapixels, 6) << "\n";
  }
  out << "__aggregate__," << Fixed(report.mean_noisy_psnr, 10) << ","
      << Fixed(report.mean_denoised_psnr, 10) << "," << Fixed(report.total_seconds, 6) << ","
      << Fixed(report.total_megapixels, 6) << "\n";
}

void PrintEvalTable(const EvalReport& report, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof(line), "%-32s %10s %10s %9s %8s\n", "image", "noisy_dB", "denoised_dB",
                "seconds", "MP");
  out << line;
  for (const EvalRow& r : report.rows) {
    std::snprintf(line, sizeof(line), "%-32s %10.3f %10.3f %9.4f %8.3f\n", r.name.c_str(),
                  r.noisy_psnr, r.denoised_psnr, r.seconds, r.megapixels);
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-32s %10.3f %10.3f %9.4f %8.3f\n", "mean/total",
                report.mean_noisy_psnr, report.mean_denoised_psnr, report.total_seconds,
                report.total_megapixels);
  out << line;
  out << "throughput_mp_per_s=" << Fixed(report.megapixels_per_second, 3) << "\n";
}

std::vector<fs::path> CmdInspect(const InspectOptions& opts, std::ostream& log) {
  const Filterbank fb = LoadFilterbank(opts.bank);
  static constexpr const char* kChannelNames[kBankChannels] = {"Y", "Cb", "Cr"};
  const fs::path stem = opts.out_png.parent_path() / opts.out_png.stem();
  if (!opts.out_png.parent_path().empty()) fs::create_directories(opts.out_png.parent_path());
  std::vector<fs::path> written;
  std::ostringstream dump;
  dump << "version=" << fb.version << "\nnoise_sigma=" << fb.noise_sigma
       << "\npyramid_depth=" << fb.pyramid_depth << "\nlevels=" << fb.levels.size()
       << "\nmetadata=" << fb.metadata << "\n";
  for (std::size_t l = 0; l < fb.levels.size(); ++l) {
    const LevelBank& bank = fb.levels[l];
    const QuantizerSpec& q = bank.quantizer();
    dump << "level " << l << ": fine=" << bank.footprint().fine_size
         << " coarse=" << bank.footprint().coarse_size << " orient=" << q.n_orient
         << " strength=" << q.n_strength() << " coherence=" << q.n_coherence()
         << " buckets=" << bank.bucket_count() << "\n  strength_thresholds:";
    for (const double t : q.strength_thresholds) dump << " " << t;
    dump << "\n  coherence_thresholds:";
    for (const double t : q.coherence_thresholds) dump << " " << t;
    dump << "\n  layout: " << DescribeRenderLayout(bank) << "\n";
    for (int c = 0; c < kBankChannels; ++c) {
      fs::path p = stem;
      p += "_L" + std::to_string(l) + "_" + kChannelNames[c] + ".png";
      SavePng(RenderBank(bank, c), p);
      written.push_back(p);
    }
  }
  fs::path txt = stem;
  txt += ".txt";
  std::ofstream f(txt);
  if (!f) throw std::runtime_error("cannot write " + txt.string());
  f << dump.str();
  log << dump.str();
  for (const auto& p : written) log << "event=rendered path=" << p.string() << "\n";
  return written;
}

}  // namespace msblade::cli
