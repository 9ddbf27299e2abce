#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "pathgan/checkpoint.hpp"
#include "pathgan/mapgen.hpp"
#include "pathgan/metrics.hpp"
#include "pathgan/png_io.hpp"
#include "pathgan/postproc.hpp"
#include "pathgan/trainer.hpp"

namespace fs = std::filesystem;
using namespace pathgan;

namespace {

GrayImage upscale(const GrayImage& img, int k) {
  GrayImage out(img.width * k, img.height * k);
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      out.at(r, c) = img.at(r / k, c / k);
    }
  }
  return out;
}

// Simple key=value configuration file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

// Start/goal are the PATH pixels of an input image: exactly two (or one for
// the degenerate start == goal case); start is the one closer to the left.
std::pair<Cell, Cell> endpoints_from_input(const ClassRaster& input) {
  std::vector<Cell> cells;
  for (int r = 0; r < input.height; ++r) {
    for (int c = 0; c < input.width; ++c) {
      if (input.at(r, c) == CellClass::Path) cells.push_back({r, c});
    }
  }
  if (cells.empty()) {
    throw std::runtime_error("input image has no start/goal (PATH) pixels");
  }
  if (cells.size() == 1) return {cells[0], cells[0]};
  if (cells.size() > 2) {
    throw std::runtime_error(
        "input image has more than two PATH pixels; expected start and goal "
        "only");
  }
  Cell a = cells[0], b = cells[1];
  if (b.col < a.col || (b.col == a.col && b < a)) std::swap(a, b);
  return {a, b};
}

GrayImage read_palette_png(const std::string& path) {
  const GrayImage img = png_io::read_gray8(path);
  if (const auto bad = first_off_palette(img)) {
    throw std::runtime_error(path + ": off-palette pixel value " +
                             std::to_string(int(bad->value)) + " at row " +
                             std::to_string(bad->row) + ", col " +
                             std::to_string(bad->col));
  }
  return img;
}

int run_gen_data(const std::string& family, int size, int height, long long count,
                 double density, std::vector<double> density_range,
                 unsigned long long seed, std::vector<double> splits,
                 const std::string& out, bool density_set,
                 bool density_range_set) {
  MapGenConfig cfg;
  cfg.family = family_from_string(family);
  cfg.width = size;
  cfg.height = height > 0 ? height : size;
  cfg.count = count;
  cfg.seed = seed;
  if (cfg.family == ObstacleFamily::Rect) {
    if (density_range_set) {
      throw std::invalid_argument(
          "--density-range conflicts with --family rect (use --density)");
    }
    if (density_set) cfg.target_density = density;
  } else {
    if (density_set) {
      throw std::invalid_argument(
          "--density conflicts with --family random (use --density-range)");
    }
    if (density_range_set) {
      cfg.density_range = {density_range.at(0), density_range.at(1)};
    }
  }
  if (!splits.empty()) {
    cfg.splits = {splits.at(0), splits.at(1), splits.at(2)};
  }
  const DatasetManifest manifest = build_dataset(cfg, out);

  const auto counts = split_counts(cfg.count, cfg.splits);
  std::cout << "dataset: " << out << "\n"
            << "  family " << to_string(cfg.family) << ", " << cfg.width
            << "x" << cfg.height << ", " << manifest.instances.size()
            << " instances\n"
            << "  splits: train " << counts[0] << ", test " << counts[1]
            << ", validation " << counts[2] << "\n";
  return 0;
}

TrainConfig build_train_config(const std::string& data,
                               const std::string& out,
                               const std::string& ablation,
                               const std::string& config_path,
                               const std::map<std::string, long long>& ints,
                               const std::map<std::string, double>& reals,
                               const std::string& resume) {
  TrainConfig cfg;
  cfg.data_dir = data;
  cfg.out_dir = out;
  cfg.hyper = preset_from_name(ablation);
  cfg.resume = resume;

  if (!config_path.empty()) {
    for (const auto& [key, value] : read_config_file(config_path)) {
      if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "batch") cfg.batch_size = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "max_steps") cfg.max_steps = std::stoll(value);
      else if (key == "n_critic") cfg.n_critic = std::stoi(value);
      else if (key == "checkpoint_every") cfg.checkpoint_every = std::stoll(value);
      else if (key == "device") cfg.device = value;
      else if (key == "lr") cfg.hyper.optim.lr = std::stod(value);
      else if (key == "lambda_ce") cfg.hyper.loss.lambda_ce = std::stod(value);
      else if (key == "lambda_gp") cfg.hyper.loss.lambda_gp = std::stod(value);
      else if (key == "features") cfg.hyper.generator.base_features =
          cfg.hyper.discriminator.base_features = std::stoi(value);
      else if (key == "depth") cfg.hyper.generator.depth =
          cfg.hyper.discriminator.levels = std::stoi(value);
      else throw std::invalid_argument("unknown config key: " + key);
    }
  }

  // Flags given on the command line win over the config file.
  auto geti = [&](const char* k) { return ints.count(k) ? &ints.at(k) : nullptr; };
  auto getr = [&](const char* k) { return reals.count(k) ? &reals.at(k) : nullptr; };
  if (const auto* v = geti("epochs")) cfg.epochs = static_cast<int>(*v);
  if (const auto* v = geti("batch")) cfg.batch_size = static_cast<int>(*v);
  if (const auto* v = geti("seed")) cfg.seed = static_cast<std::uint64_t>(*v);
  if (const auto* v = geti("max-steps")) cfg.max_steps = *v;
  if (const auto* v = geti("n-critic")) cfg.n_critic = static_cast<int>(*v);
  if (const auto* v = geti("checkpoint-every")) cfg.checkpoint_every = *v;
  if (const auto* v = geti("features")) {
    cfg.hyper.generator.base_features = static_cast<int>(*v);
    cfg.hyper.discriminator.base_features = static_cast<int>(*v);
  }
  if (const auto* v = getr("lr")) cfg.hyper.optim.lr = *v;
  if (const auto* v = getr("lambda-ce")) cfg.hyper.loss.lambda_ce = *v;
  if (const auto* v = getr("lambda-gp")) cfg.hyper.loss.lambda_gp = *v;
  return cfg;
}

int run_eval(const std::string& checkpoint_path, const std::string& data,
             const std::string& split, std::string out_dir, bool oracle,
             bool save_images) {
  const DatasetManifest manifest = load_manifest(data);
  if (out_dir.empty()) out_dir = data + "/report_" + split;
  fs::create_directories(out_dir);

  EvalOptions options;
  options.split = split;
  options.oracle = oracle;
  options.save_images = save_images;
  options.image_dir = out_dir;

  InferFn hook;
  Checkpoint ck;
  if (!oracle) {
    if (checkpoint_path.empty()) {
      throw std::invalid_argument("--checkpoint required unless --oracle");
    }
    ck = load_checkpoint(checkpoint_path);
    hook = [&ck](const nn::Tensor& inputs) {
      return infer_batch(ck.bundle, inputs);
    };
  }

  const EvalReport report = evaluate_dataset(manifest, data, options, hook);
  {
    std::ofstream json_out(out_dir + "/report.json", std::ios::binary);
    json_out << report.to_json();
    std::ofstream csv_out(out_dir + "/report.csv", std::ios::binary);
    csv_out << report.to_csv();
  }
  std::cout << report.summary_text();
  std::cout << "report: " << out_dir << "/report.json\n";
  return 0;
}

int run_infer(const std::string& checkpoint_path, const std::string& input,
              const std::string& out) {
  const GrayImage img = read_palette_png(input);
  const ClassRaster input_raster = decode_classes(img);
  const auto [start, goal] = endpoints_from_input(input_raster);
  const Grid grid = grid_from_raster(input_raster, start, goal);

  Checkpoint ck = load_checkpoint(checkpoint_path);
  const ClassLogits logits = infer(ck.bundle, input_raster);
  const ClassRaster generated = logits_to_raster(logits);
  const ClassRaster post =
      fill_gaps(transfer_obstacles(grid, generated), start, goal);

  fs::path out_path(out);
  fs::path generated_path = out_path;
  generated_path.replace_filename(out_path.stem().string() + "_generated" +
                                  out_path.extension().string());
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  png_io::write_gray8(generated_path.string(), render_raster(generated));
  png_io::write_gray8(out_path.string(), render_raster(post));

  const bool ok = success(post, grid, start, goal);
  std::cout << "generated: " << generated_path.string() << "\n"
            << "post-processed: " << out_path.string() << "\n"
            << "success: " << (ok ? "true" : "false") << "\n";
  return 0;
}

int run_render(const std::string& data, const std::string& instance, int scale,
               const std::string& checkpoint_path, std::string out_dir) {
  const DatasetManifest manifest = load_manifest(data);
  const InstanceRecord* rec = nullptr;
  for (const auto& r : manifest.instances) {
    if (r.id == instance) {
      rec = &r;
      break;
    }
  }
  if (!rec) throw std::runtime_error("instance id not found: " + instance);
  if (out_dir.empty()) out_dir = data + "/render";
  fs::create_directories(out_dir);

  const GrayImage input_img = png_io::read_gray8(data + "/" + rec->input_file);
  const GrayImage gt_img = png_io::read_gray8(data + "/" + rec->gt_file);
  auto emit = [&](const std::string& tag, const GrayImage& img) {
    const std::string path = out_dir + "/" + rec->id + "_" + tag + "_x" +
                             std::to_string(scale) + ".png";
    png_io::write_gray8(path, upscale(img, scale));
    std::cout << path << "\n";
  };
  emit("input", input_img);
  emit("gt", gt_img);

  if (!checkpoint_path.empty()) {
    Checkpoint ck = load_checkpoint(checkpoint_path);
    const ClassRaster input_raster = decode_classes(input_img);
    const Grid grid = grid_from_raster(input_raster, rec->start, rec->goal);
    const ClassRaster generated =
        logits_to_raster(infer(ck.bundle, input_raster));
    const ClassRaster post = fill_gaps(transfer_obstacles(grid, generated),
                                       rec->start, rec->goal);
    emit("generated", render_raster(generated));
    emit("post", render_raster(post));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid path finding as conditional image generation"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate an obstacle dataset");
  std::string family = "rect";
  int size = 64, height = 0;
  long long count = 0;
  double density = 0.20;
  std::vector<double> density_range;
  std::vector<double> splits;
  unsigned long long seed = 0;
  std::string out;
  gen->add_option("--family", family, "rect | random")->capture_default_str();
  gen->add_option("--size", size, "grid width (and height unless --height)")
      ->capture_default_str();
  gen->add_option("--height", height, "grid height override");
  gen->add_option("--count", count, "number of instances")->required();
  auto* density_opt = gen->add_option("--density", density,
                                      "target obstacle density (rect)");
  auto* range_opt =
      gen->add_option("--density-range", density_range,
                      "obstacle density interval (random)")
          ->expected(2);
  gen->add_option("--seed", seed, "master seed")->capture_default_str();
  gen->add_option("--splits", splits, "train/test/validation fractions")
      ->expected(3);
  gen->add_option("--out", out, "output directory")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train a model on a dataset");
  std::string tr_data, tr_out, tr_ablation = "ganfinder", tr_config, tr_resume;
  std::map<std::string, long long> tr_ints;
  std::map<std::string, double> tr_reals;
  tr->add_option("--data", tr_data, "dataset directory")->required();
  tr->add_option("--out", tr_out, "output directory")->required();
  tr->add_option("--ablation", tr_ablation, "ganfinder | pix2pix-baseline")
      ->capture_default_str();
  tr->add_option("--config", tr_config, "key=value config file");
  tr->add_option("--resume", tr_resume, "checkpoint to continue from");
  for (const char* key : {"epochs", "batch", "seed", "max-steps", "n-critic",
                          "checkpoint-every", "features"}) {
    tr->add_option_function<long long>(
        std::string("--") + key,
        [&tr_ints, key](const long long& v) { tr_ints[key] = v; });
  }
  for (const char* key : {"lr", "lambda-ce", "lambda-gp"}) {
    tr->add_option_function<double>(
        std::string("--") + key,
        [&tr_reals, key](const double& v) { tr_reals[key] = v; });
  }

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  std::string ev_ckpt, ev_data, ev_split = "test", ev_out;
  bool ev_oracle = false, ev_save_images = false;
  ev->add_option("--checkpoint", ev_ckpt, "model checkpoint");
  ev->add_option("--data", ev_data, "dataset directory")->required();
  ev->add_option("--split", ev_split, "train | test | validation")
      ->capture_default_str();
  ev->add_option("--out", ev_out, "report directory");
  ev->add_flag("--oracle", ev_oracle,
               "score ground-truth rasters instead of model output");
  ev->add_flag("--save-images", ev_save_images,
               "persist generated/post-processed rasters");

  // infer
  auto* in = app.add_subcommand("infer", "Run one instance end to end");
  std::string in_ckpt, in_input, in_out;
  in->add_option("--checkpoint", in_ckpt, "model checkpoint")->required();
  in->add_option("--input", in_input, "input PNG")->required();
  in->add_option("--out", in_out, "post-processed output PNG")->required();

  // render
  auto* rd = app.add_subcommand("render", "Upscaled panels for an instance");
  std::string rd_data, rd_instance, rd_ckpt, rd_out;
  int rd_scale = 8;
  rd->add_option("--data", rd_data, "dataset directory")->required();
  rd->add_option("--instance", rd_instance, "instance id")->required();
  rd->add_option("--scale", rd_scale, "integer upscale factor")
      ->capture_default_str();
  rd->add_option("--checkpoint", rd_ckpt,
                 "also render generated/post-processed panels");
  rd->add_option("--out", rd_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) {
      return run_gen_data(family, size, height, count, density, density_range,
                          seed, splits, out, density_opt->count() > 0,
                          range_opt->count() > 0);
    }
    if (tr->parsed()) {
      const TrainConfig cfg = build_train_config(
          tr_data, tr_out, tr_ablation, tr_config, tr_ints, tr_reals,
          tr_resume);
      const TrainResult result = train(cfg);
      std::cout << "steps: " << result.log.rows.size() << "\n"
                << "final checkpoint: " << result.final_checkpoint << "\n"
                << "train log: " << cfg.out_dir << "/train.csv\n";
      return 0;
    }
    if (ev->parsed()) {
      return run_eval(ev_ckpt, ev_data, ev_split, ev_out, ev_oracle,
                      ev_save_images);
    }
    if (in->parsed()) return run_infer(in_ckpt, in_input, in_out);
    if (rd->parsed()) {
      return run_render(rd_data, rd_instance, rd_scale, rd_ckpt, rd_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
