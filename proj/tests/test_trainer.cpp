#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pathgan/metrics.hpp"
#include "pathgan/nn/losses.hpp"
#include "pathgan/postproc.hpp"
#include "pathgan/trainer.hpp"

using namespace pathgan;
namespace fs = std::filesystem;

namespace {

fs::path make_dataset(const std::string& name, std::int64_t count, int size,
                      std::uint64_t seed) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  MapGenConfig cfg;
  cfg.width = cfg.height = size;
  cfg.family = ObstacleFamily::Rect;
  cfg.target_density = 0.2;
  cfg.count = count;
  cfg.seed = seed;
  build_dataset(cfg, dir.string());
  return dir;
}

TrainConfig small_config(const std::string& data_dir,
                         const std::string& out_dir) {
  TrainConfig cfg;
  cfg.data_dir = data_dir;
  cfg.out_dir = out_dir;
  cfg.hyper = ganfinder_preset();
  cfg.hyper.generator.base_features = 8;
  cfg.hyper.discriminator.base_features = 8;
  cfg.epochs = 1;
  cfg.batch_size = 4;
  cfg.seed = 11;
  return cfg;
}

bool rows_equal_ignoring_time(const std::vector<TrainStepRow>& a,
                              const std::vector<TrainStepRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    TrainStepRow x = a[i], y = b[i];
    x.seconds = y.seconds = 0.0;
    if (!(x == y)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("trainer");

TEST_CASE("one epoch logs ceil(n/batch) steps") {
  const fs::path data = make_dataset("pathgan_trainer_count", 12, 16, 501);
  // 12 instances -> 9 train; batch 4 -> 3 steps.
  const fs::path out = fs::temp_directory_path() / "pathgan_trainer_count_out";
  fs::remove_all(out);
  TrainConfig cfg = small_config(data.string(), out.string());
  const TrainResult result = train(cfg);
  CHECK(result.log.rows.size() == 3);
  CHECK(result.log.rows.back().epoch == 0);

  // train.csv parses back into the same rows.
  std::ifstream csv(out / "train.csv", std::ios::binary);
  std::stringstream ss;
  ss << csv.rdbuf();
  const TrainLog parsed = TrainLog::from_csv(ss.str());
  CHECK(rows_equal_ignoring_time(parsed.rows, result.log.rows));

  fs::remove_all(data);
  fs::remove_all(out);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const fs::path data = make_dataset("pathgan_trainer_det", 10, 16, 502);
  const fs::path out_a = fs::temp_directory_path() / "pathgan_det_a";
  const fs::path out_b = fs::temp_directory_path() / "pathgan_det_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);

  TrainConfig cfg_a = small_config(data.string(), out_a.string());
  cfg_a.max_steps = 4;
  cfg_a.epochs = 3;
  TrainConfig cfg_b = cfg_a;
  cfg_b.out_dir = out_b.string();

  TrainResult a = train(cfg_a);
  TrainResult b = train(cfg_b);
  CHECK(rows_equal_ignoring_time(a.log.rows, b.log.rows));

  auto pa = a.bundle.generator.params();
  auto pb = b.bundle.generator.params();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->value == pb[i]->value);
  }

  fs::remove_all(data);
  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("gradients and parameters stay finite after a step") {
  const fs::path data = make_dataset("pathgan_trainer_fin", 6, 16, 503);
  const fs::path out = fs::temp_directory_path() / "pathgan_fin_out";
  fs::remove_all(out);
  for (const char* ablation : {"ganfinder", "pix2pix-baseline"}) {
    TrainConfig cfg = small_config(data.string(), out.string());
    cfg.hyper = preset_from_name(ablation);
    cfg.hyper.generator.base_features = 8;
    cfg.hyper.discriminator.base_features = 8;
    cfg.max_steps = 1;
    TrainResult result = train(cfg);
    for (nn::Param* p : result.bundle.generator.params()) {
      CHECK(nn::all_finite(p->value));
      CHECK(nn::all_finite(p->grad));
    }
    for (nn::Param* p : result.bundle.critic.params()) {
      CHECK(nn::all_finite(p->value));
      CHECK(nn::all_finite(p->grad));
    }
    CHECK(std::isfinite(result.log.rows[0].g_total));
    CHECK(std::isfinite(result.log.rows[0].d_loss));
  }
  fs::remove_all(data);
  fs::remove_all(out);
}

TEST_CASE("a resumed run replays the uninterrupted one exactly") {
  const fs::path data = make_dataset("pathgan_trainer_resume", 10, 16, 504);
  const fs::path out_full = fs::temp_directory_path() / "pathgan_resume_full";
  const fs::path out_head = fs::temp_directory_path() / "pathgan_resume_head";
  const fs::path out_tail = fs::temp_directory_path() / "pathgan_resume_tail";
  fs::remove_all(out_full);
  fs::remove_all(out_head);
  fs::remove_all(out_tail);

  TrainConfig cfg = small_config(data.string(), out_full.string());
  cfg.epochs = 4;
  cfg.max_steps = 6;
  TrainResult full = train(cfg);

  TrainConfig head = cfg;
  head.out_dir = out_head.string();
  head.max_steps = 3;
  const TrainResult head_result = train(head);

  TrainConfig tail = cfg;
  tail.out_dir = out_tail.string();
  tail.max_steps = 6;
  tail.resume = head_result.final_checkpoint;
  TrainResult tail_result = train(tail);

  REQUIRE(tail_result.log.rows.size() == 3);
  std::vector<TrainStepRow> stitched = head_result.log.rows;
  stitched.insert(stitched.end(), tail_result.log.rows.begin(),
                  tail_result.log.rows.end());
  CHECK(rows_equal_ignoring_time(stitched, full.log.rows));

  auto pa = full.bundle.generator.params();
  auto pb = tail_result.bundle.generator.params();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->value == pb[i]->value);
  }
  auto da = full.bundle.critic.params();
  auto db = tail_result.bundle.critic.params();
  for (std::size_t i = 0; i < da.size(); ++i) {
    CHECK(da[i]->value == db[i]->value);
  }

  fs::remove_all(data);
  fs::remove_all(out_full);
  fs::remove_all(out_head);
  fs::remove_all(out_tail);
}

TEST_CASE("non-finite losses abort with a diagnostic checkpoint") {
  const fs::path data = make_dataset("pathgan_trainer_nan", 6, 16, 505);
  const fs::path out = fs::temp_directory_path() / "pathgan_nan_out";
  const fs::path poisoned_dir = fs::temp_directory_path() / "pathgan_nan_ckpt";
  fs::remove_all(out);
  fs::remove_all(poisoned_dir);
  fs::create_directories(poisoned_dir);

  TrainConfig cfg = small_config(data.string(), out.string());
  cfg.max_steps = 2;

  // Craft a resumable checkpoint with a poisoned weight.
  ModelBundle bundle = make_bundle(cfg.hyper, 16, 16, cfg.seed);
  bundle.generator.params()[0]->value.data[0] =
      std::numeric_limits<float>::quiet_NaN();
  TrainerState state;
  state.step = 0;
  state.master_seed = cfg.seed;
  for (nn::Param* p : bundle.generator.params()) {
    state.g_m.push_back(nn::Tensor::zeros_like(p->value));
    state.g_v.push_back(nn::Tensor::zeros_like(p->value));
  }
  for (nn::Param* p : bundle.critic.params()) {
    state.d_m.push_back(nn::Tensor::zeros_like(p->value));
    state.d_v.push_back(nn::Tensor::zeros_like(p->value));
  }
  const std::string poisoned = (poisoned_dir / "poisoned.ckpt").string();
  save_checkpoint(poisoned, bundle, &state);

  cfg.resume = poisoned;
  CHECK_THROWS_AS(train(cfg), TrainAbort);
  CHECK(fs::exists(out / "diagnostic_nonfinite.ckpt"));

  fs::remove_all(data);
  fs::remove_all(out);
  fs::remove_all(poisoned_dir);
}

TEST_CASE("training overfits a single instance to success") {
  const fs::path data = make_dataset("pathgan_trainer_overfit", 1, 16, 506);
  const fs::path out = fs::temp_directory_path() / "pathgan_overfit_out";
  fs::remove_all(out);

  TrainConfig cfg = small_config(data.string(), out.string());
  cfg.hyper.generator.base_features = 16;
  cfg.hyper.discriminator.base_features = 16;
  cfg.hyper.optim.lr = 1e-3;  // memorization gate, not a training preset
  cfg.batch_size = 1;
  cfg.epochs = 400;
  cfg.max_steps = 400;
  const TrainResult result = train(cfg);

  const DatasetManifest manifest = load_manifest(data.string());
  const auto instances = load_split(manifest, data.string(), "train");
  REQUIRE(instances.size() == 1);
  const LoadedInstance& inst = instances[0];

  const ClassLogits logits = infer(result.bundle, inst.input);
  const ClassRaster generated = logits_to_raster(logits);
  const ClassRaster post =
      fill_gaps(transfer_obstacles(inst.grid, generated), inst.record.start,
                inst.record.goal);
  CHECK(success(post, inst.grid, inst.record.start, inst.record.goal));

  // Supervised loss collapsed while overfitting.
  CHECK(result.log.rows.back().g_sup < result.log.rows.front().g_sup);

  fs::remove_all(data);
  fs::remove_all(out);
}

TEST_SUITE_END();
