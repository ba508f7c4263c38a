// Copyright 2026 The tonecc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: synthetic data generation, upper-bound
// evaluation, eigen-curve basis building, style fitting and application,
// and the HTTP service.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tonecc.hpp"
#include "tonecc/service.hpp"

namespace fs = std::filesystem;
using namespace tonecc;

namespace {

struct GlobalFlags {
  bool json = false;
  bool no_meta = false;
  std::uint64_t seed = 0;
};

struct DatasetFlags {
  std::string dataset;
  std::string input_dir;
  std::string gt_dir;

  void add(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "Manifest (JSON lines) or directory with input/ and gt/");
    cmd->add_option("--input-dir", input_dir, "Directory of input images");
    cmd->add_option("--gt-dir", gt_dir, "Directory of ground-truth images (same file names)");
  }

  PairedDataset load() const {
    if (!dataset.empty()) return load_dataset(dataset);
    if (!input_dir.empty() && !gt_dir.empty()) return load_dataset(input_dir, gt_dir);
    throw Error(ErrorCode::kInvalidArgument, "give --dataset or both --input-dir and --gt-dir");
  }
};

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::string ext_for(const std::string& format) { return format == "png" ? ".png" : ".ppm"; }

std::string numbered(std::size_t i, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf + ext;
}

StyleSet load_styles(const std::string& basis_path, const std::string& styles_path) {
  return load_style_set(styles_path, load_basis(basis_path));
}

void print_prediction_json(const ToneCurve& tf, const ColorMatrix& ccm) {
  print_json({{"tf", to_json(tf)}, {"ccm", to_json(ccm)}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-step global image enhancement: optimal tone curves, color matrices, "
               "eigen-curve bases and style profiles"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  app.add_flag("--json", global.json, "Emit machine-readable JSON");
  app.add_flag("--no-meta", global.no_meta, "Omit timings so repeated runs are byte-identical");
  app.add_option("--seed", global.seed, "Seed for synthetic generation");

  // gen-synth -------------------------------------------------------------
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic paired dataset for one style");
  std::string gen_out;
  std::size_t gen_count = 100, gen_width = 128, gen_height = 128;
  std::optional<std::uint64_t> gen_style_seed;
  std::string gen_format = "ppm";
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--count", gen_count, "Number of pairs")->check(CLI::PositiveNumber);
  gen->add_option("--width", gen_width)->check(CLI::PositiveNumber);
  gen->add_option("--height", gen_height)->check(CLI::PositiveNumber);
  gen->add_option("--style-seed", gen_style_seed,
                  "Seed of the generating (tone curve, matrix); defaults to --seed");
  gen->add_option("--format", gen_format)->check(CLI::IsMember({"ppm", "png"}));

  // upper-bound -------------------------------------------------------------
  auto* ub = app.add_subcommand("upper-bound", "Optimal tone curve and color matrix for one pair");
  std::string ub_input, ub_gt, ub_dump_tf, ub_dump_ccm, ub_output;
  ub->add_option("--input", ub_input)->required();
  ub->add_option("--gt", ub_gt)->required();
  ub->add_option("--dump-tf", ub_dump_tf, "Write the curve as 256 reals");
  ub->add_option("--dump-ccm", ub_dump_ccm, "Write the matrix as 9 row-major reals");
  ub->add_option("--output", ub_output, "Write the upper-bound image");

  // eval-upper --------------------------------------------------------------
  auto* eu = app.add_subcommand("eval-upper", "Upper-bound PSNR over a dataset");
  DatasetFlags eu_data;
  unsigned threads = 0;
  eu_data.add(eu);
  eu->add_option("--threads", threads, "Worker threads (0 = hardware)");

  // build-basis ---------------------------------------------------------------
  auto* bb = app.add_subcommand("build-basis", "Eigen tone-curve basis from a dataset's optimal curves");
  DatasetFlags bb_data;
  std::size_t bb_m = kDefaultBasisRank;
  std::string bb_out;
  bb_data.add(bb);
  bb->add_option("--m", bb_m, "Basis rank")->check(CLI::PositiveNumber);
  bb->add_option("--out", bb_out, "Basis JSON path")->required();

  // fit-style -----------------------------------------------------------------
  auto* fs_cmd = app.add_subcommand("fit-style", "Fit a style profile and store it in a style set");
  DatasetFlags fs_data;
  std::string fs_basis, fs_styles, fs_name;
  double fs_ridge = kDefaultRidge;
  fs_data.add(fs_cmd);
  fs_cmd->add_option("--basis", fs_basis)->required();
  fs_cmd->add_option("--styles", fs_styles, "Style set JSON (created or updated)")->required();
  fs_cmd->add_option("--name", fs_name, "Profile name")->required();
  fs_cmd->add_option("--ridge", fs_ridge, "Ridge strength")->check(CLI::NonNegativeNumber);
  bool fs_identity = false;
  fs_cmd->add_flag("--identity", fs_identity,
                   "Store a profile that predicts the identity curve and matrix (no dataset)");

  // eval-style ----------------------------------------------------------------
  auto* es = app.add_subcommand("eval-style", "PSNR of a style profile over a dataset");
  DatasetFlags es_data;
  std::string es_basis, es_styles, es_style;
  es_data.add(es);
  es->add_option("--basis", es_basis)->required();
  es->add_option("--styles", es_styles)->required();
  es->add_option("--style", es_style)->required();
  es->add_option("--threads", threads);

  // enhance -------------------------------------------------------------------
  auto* en = app.add_subcommand("enhance", "Enhance an image with a style or an explicit curve/matrix");
  std::string en_input, en_output, en_basis, en_styles, en_style, en_tf, en_ccm;
  en->add_option("--input", en_input)->required();
  en->add_option("--output", en_output)->required();
  en->add_option("--basis", en_basis);
  en->add_option("--styles", en_styles);
  en->add_option("--style", en_style);
  en->add_option("--tf", en_tf, "Tone curve text file (256 reals)");
  en->add_option("--ccm", en_ccm, "Color matrix text file (9 reals)");

  // interp --------------------------------------------------------------------
  auto* in = app.add_subcommand("interp", "Enhance with a blend of two styles");
  std::string in_input, in_output, in_basis, in_styles, in_a, in_b;
  double in_t = 0.5;
  in->add_option("--input", in_input)->required();
  in->add_option("--output", in_output)->required();
  in->add_option("--basis", in_basis)->required();
  in->add_option("--styles", in_styles)->required();
  in->add_option("--a", in_a)->required();
  in->add_option("--b", in_b)->required();
  in->add_option("--t", in_t)->check(CLI::Range(0.0, 1.0));

  // chain ---------------------------------------------------------------------
  auto* ch = app.add_subcommand("chain", "Apply several styles in series");
  std::string ch_input, ch_output, ch_basis, ch_styles;
  std::vector<std::string> ch_list;
  ch->add_option("--input", ch_input)->required();
  ch->add_option("--output", ch_output)->required();
  ch->add_option("--basis", ch_basis)->required();
  ch->add_option("--styles", ch_styles)->required();
  ch->add_option("--style", ch_list, "Style name; repeat in application order")->required();

  // serve ---------------------------------------------------------------------
  auto* sv = app.add_subcommand("serve", "Run the JSON/HTTP service");
  std::string sv_basis, sv_styles, sv_bind = "127.0.0.1:8080";
  sv->add_option("--basis", sv_basis)->required();
  sv->add_option("--styles", sv_styles)->required();
  sv->add_option("--bind", sv_bind, "host:port");

  CLI11_PARSE(app, argc, argv);
  const bool meta = !global.no_meta;

  try {
    if (gen->parsed()) {
      synth::Rng style_rng(gen_style_seed.value_or(global.seed));
      const auto style = synth::random_style(style_rng);
      synth::Rng rng(global.seed);
      synth::ImageOptions opt;
      opt.width = gen_width;
      opt.height = gen_height;
      const fs::path root(gen_out);
      fs::create_directories(root / "input");
      fs::create_directories(root / "gt");
      std::string manifest;
      for (std::size_t i = 0; i < gen_count; ++i) {
        const auto img = synth::random_image(rng, opt);
        const auto gt = enhance(img, style.tf, style.ccm);
        const auto name = numbered(i, ext_for(gen_format));
        write_image(img, root / "input" / name);
        write_image(gt, root / "gt" / name);
        manifest += Json{{"input", "input/" + name}, {"gt", "gt/" + name}}.dump() + "\n";
      }
      write_text(root / "manifest.jsonl", manifest);
      write_text(root / "style.json",
                 Json{{"tf", to_json(style.tf)}, {"ccm", to_json(style.ccm)}}.dump(2) + "\n");
      if (global.json) {
        print_json({{"out", gen_out}, {"pairs", gen_count}});
      } else {
        std::cout << "wrote " << gen_count << " pairs to " << gen_out << '\n';
      }
    } else if (ub->parsed()) {
      const auto input = read_image(ub_input);
      const auto gt = read_image(ub_gt);
      const auto r = upper_bound(input, gt);
      if (!ub_dump_tf.empty()) write_text(ub_dump_tf, to_text(r.tf));
      if (!ub_dump_ccm.empty()) write_text(ub_dump_ccm, to_text(r.ccm));
      if (!ub_output.empty()) write_image(r.output, ub_output);
      if (global.json) {
        print_json(to_json(r, meta));
      } else {
        std::cout << "psnr in  " << format_psnr(r.psnr_in) << " dB\n"
                  << "psnr mid " << format_psnr(r.psnr_mid) << " dB\n"
                  << "psnr out " << format_psnr(r.psnr_out) << " dB\n"
                  << "ccm\n" << to_text(r.ccm);
        if (meta) std::cout << "time " << r.millis << " ms\n";
      }
    } else if (eu->parsed()) {
      const auto rep = eval_upper_bound(eu_data.load(), threads);
      if (global.json) print_json(to_json(rep, meta));
      else std::cout << to_table(rep);
    } else if (bb->parsed()) {
      const auto ds = bb_data.load();
      std::vector<ToneCurve> curves(ds.pairs.size());
      parallel_for(ds.pairs.size(), [&](std::size_t i) {
        curves[i] = optimal_tone_curve(
            bin_stats(read_image(ds.pairs[i].input), read_image(ds.pairs[i].gt)));
      });
      const CurveCorpus corpus(std::move(curves));
      const auto basis = build_basis(corpus, bb_m);
      write_text(bb_out, to_json(basis).dump() + "\n");
      const auto errors = rank_error_curve(corpus, bb_m);
      if (global.json) {
        Json rmse = Json::array();
        for (const auto& e : errors) rmse.push_back({{"m", e.m}, {"mean_rmse", e.mean_rmse}});
        print_json({{"m", bb_m}, {"curves", corpus.size()}, {"sigma", basis.sigma},
                    {"rank_error", rmse}, {"basis_id", fingerprint_hex(basis.fingerprint())}});
      } else {
        std::cout << "basis of rank " << bb_m << " from " << corpus.size() << " curves -> "
                  << bb_out << '\n';
        for (const auto& e : errors) {
          std::printf("  M=%-3zu sigma=%-12.6g mean rmse=%.6g\n", e.m, basis.sigma[e.m - 1],
                      e.mean_rmse);
        }
      }
    } else if (fs_cmd->parsed()) {
      const auto basis = load_basis(fs_basis);
      StyleProfile profile;
      if (fs_identity) {
        profile = identity_style(fs_name, basis);
      } else {
        const auto ds = fs_data.load();
        std::vector<FeatureVector> feats(ds.pairs.size());
        std::vector<StyleTargets> targets(ds.pairs.size());
        parallel_for(ds.pairs.size(), [&](std::size_t i) {
          const auto input = read_image(ds.pairs[i].input);
          const auto gt = read_image(ds.pairs[i].gt);
          feats[i] = features(input);
          targets[i] = style_targets(input, gt, *basis);
        });
        profile = fit_style_from_targets(fs_name, basis, feats, targets, fs_ridge);
      }
      StyleSet set = fs::exists(fs_styles) ? load_style_set(fs_styles, basis) : StyleSet(basis);
      const auto meta_info = profile.meta;
      set.add(std::move(profile));
      write_text(fs_styles, to_json(set).dump() + "\n");
      if (global.json) {
        print_json({{"name", fs_name}, {"pairs", meta_info.pairs}, {"ridge", meta_info.ridge},
                    {"fit_rmse", meta_info.fit_rmse}});
      } else {
        std::cout << "fitted '" << fs_name << "' on " << meta_info.pairs
                  << " pairs (fit rmse " << meta_info.fit_rmse << ") -> " << fs_styles << '\n';
      }
    } else if (es->parsed()) {
      const auto set = load_styles(es_basis, es_styles);
      const auto rep = eval_style(es_data.load(), set.at(es_style), threads);
      if (global.json) print_json(to_json(rep, meta));
      else std::cout << to_table(rep);
    } else if (en->parsed()) {
      const auto img = read_image(en_input);
      ToneCurve tf;
      ColorMatrix ccm;
      if (!en_style.empty()) {
        if (en_basis.empty() || en_styles.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "--style needs --basis and --styles");
        }
        const auto set = load_styles(en_basis, en_styles);
        const auto p = predict(set.at(en_style), img);
        tf = p.tf;
        ccm = p.ccm;
      } else {
        tf = en_tf.empty() ? ToneCurve::identity() : tone_curve_from_text(read_text(en_tf));
        ccm = en_ccm.empty() ? ColorMatrix::identity()
                             : color_matrix_from_text(read_text(en_ccm));
      }
      const auto out = enhance(img, tf, ccm);
      write_image(out, en_output);
      if (global.json) print_prediction_json(monotonize(tf), ccm);
    } else if (in->parsed()) {
      const auto set = load_styles(in_basis, in_styles);
      const auto mixed = interpolate_styles(set.at(in_a), set.at(in_b), in_t);
      const auto img = read_image(in_input);
      const auto p = predict(mixed, img);
      write_image(enhance(img, p.tf, p.ccm), in_output);
      if (global.json) print_prediction_json(p.tf, p.ccm);
    } else if (ch->parsed()) {
      const auto set = load_styles(ch_basis, ch_styles);
      std::vector<StyleProfile> chain;
      for (const auto& name : ch_list) chain.push_back(set.at(name));
      write_image(chain_styles(read_image(ch_input), chain), ch_output);
    } else if (sv->parsed()) {
      const auto colon = sv_bind.rfind(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::kInvalidArgument, "--bind expects host:port");
      }
      const std::string host = sv_bind.substr(0, colon);
      const int port = std::stoi(sv_bind.substr(colon + 1));
      const StyleService service(load_styles(sv_basis, sv_styles));
      httplib::Server server;
      service.install(server);
      std::cerr << "serving " << service.styles().size() << " styles on " << host << ':'
                << port << '\n';
      if (!server.listen(host, port)) {
        throw Error(ErrorCode::kIoFailure, "cannot bind " + sv_bind);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
