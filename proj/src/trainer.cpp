#include "pathgan/trainer.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pathgan/nn/adam.hpp"
#include "pathgan/nn/kernels.hpp"
#include "pathgan/nn/losses.hpp"
#include "pathgan/rng.hpp"

namespace pathgan {

namespace {

constexpr std::uint64_t kShuffleSalt = 0x73687566666cULL;
constexpr std::uint64_t kEpsSalt = 0x657073696c6eULL;

std::vector<std::int64_t> epoch_order(std::uint64_t seed, int epoch,
                                      std::int64_t n) {
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix64(seed, kShuffleSalt, static_cast<std::uint64_t>(epoch)));
  // Fisher-Yates with the deterministic generator.
  for (std::int64_t i = n - 1; i > 0; --i) {
    const std::int64_t j = static_cast<std::int64_t>(
        rng.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[i], order[j]);
  }
  return order;
}

struct Batch {
  nn::Tensor inputs;                        // (N,3,H,W) one-hot
  std::vector<const ClassRaster*> targets;  // gt rasters
  nn::Tensor real_mask;                     // (N,1,H,W) binary gt path
};

Batch make_batch(const std::vector<LoadedInstance>& data,
                 const std::vector<std::int64_t>& order, std::int64_t begin,
                 std::int64_t end) {
  Batch b;
  std::vector<const ClassRaster*> inputs;
  for (std::int64_t i = begin; i < end; ++i) {
    const LoadedInstance& inst = data[order[i]];
    inputs.push_back(&inst.input);
    b.targets.push_back(&inst.gt);
  }
  b.inputs = to_model_input_batch(inputs);

  const int n = static_cast<int>(b.targets.size());
  const int h = b.inputs.h(), w = b.inputs.w();
  b.real_mask = nn::Tensor(n, 1, h, w);
  for (int s = 0; s < n; ++s) {
    const ClassRaster& gt = *b.targets[s];
    float* dst = b.real_mask.sample_ptr(s);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(h) * w; ++i) {
      dst[i] = gt.labels[i] == CellClass::Path ? 1.0f : 0.0f;
    }
  }
  return b;
}

// Critic input for the conditional (full image) ablation: the one-hot input
// image stacked with the generated class probabilities (real side: the
// one-hot ground truth).
nn::Tensor conditional_input(const nn::Tensor& inputs,
                             const nn::Tensor& class_maps) {
  return nn::concat_channels(inputs, class_maps);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (n_critic < 1) throw std::invalid_argument("n_critic must be >= 1");
  if (device != "cpu" && !device.empty()) {
    throw std::invalid_argument("unsupported device hint: " + device);
  }
  hyper.loss.validate();
}

std::string TrainLog::to_csv() const {
  std::ostringstream out;
  out << "step,epoch,g_total,g_sup,g_adv,d_loss,gp,seconds\n";
  for (const auto& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f\n",
                  static_cast<long long>(r.step), r.epoch, r.g_total, r.g_sup,
                  r.g_adv, r.d_loss, r.gp, r.seconds);
    out << buf;
  }
  return out.str();
}

TrainLog TrainLog::from_csv(const std::string& text) {
  TrainLog log;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrainStepRow r;
    long long step = 0;
    if (std::sscanf(line.c_str(), "%lld,%d,%lf,%lf,%lf,%lf,%lf,%lf", &step,
                    &r.epoch, &r.g_total, &r.g_sup, &r.g_adv, &r.d_loss,
                    &r.gp, &r.seconds) != 8) {
      throw std::runtime_error("train log: malformed row: " + line);
    }
    r.step = step;
    log.rows.push_back(r);
  }
  return log;
}

TrainResult train(const TrainConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);

  const DatasetManifest manifest = load_manifest(cfg.data_dir);
  const auto data = load_split(manifest, cfg.data_dir, "train");
  if (data.empty()) throw std::invalid_argument("train split is empty");
  const int height = data[0].input.height;
  const int width = data[0].input.width;

  const std::int64_t n_train = static_cast<std::int64_t>(data.size());
  const std::int64_t steps_per_epoch =
      (n_train + cfg.batch_size - 1) / cfg.batch_size;
  std::int64_t total_steps = steps_per_epoch * cfg.epochs;
  if (cfg.max_steps > 0) total_steps = std::min(total_steps, cfg.max_steps);

  ModelBundle bundle;
  nn::Adam adam_g, adam_d;
  std::int64_t start_step = 0;
  if (!cfg.resume.empty()) {
    Checkpoint ck = load_checkpoint(cfg.resume);
    if (!ck.trainer) {
      throw std::runtime_error("resume checkpoint has no trainer state");
    }
    // The checkpoint stores resolved depth/levels; resolve the config's
    // values against the checkpoint dims before comparing.
    ModelHyper expected = cfg.hyper;
    expected.generator.depth = resolve_depth(
        expected.generator.depth, ck.bundle.height, ck.bundle.width);
    if (expected.discriminator.levels < 0) {
      expected.discriminator.levels =
          resolve_depth(0, ck.bundle.height, ck.bundle.width);
    }
    if (!(ck.bundle.hyper == expected)) {
      throw std::runtime_error(
          "resume checkpoint hyperparameters differ from config");
    }
    bundle = std::move(ck.bundle);
    start_step = ck.trainer->step;
    adam_g = nn::Adam(cfg.hyper.optim, bundle.generator.params());
    adam_d = nn::Adam(cfg.hyper.optim, bundle.critic.params());
    adam_g.moments_m() = std::move(ck.trainer->g_m);
    adam_g.moments_v() = std::move(ck.trainer->g_v);
    adam_d.moments_m() = std::move(ck.trainer->d_m);
    adam_d.moments_v() = std::move(ck.trainer->d_v);
    adam_g.set_t(ck.trainer->adam_g_t);
    adam_d.set_t(ck.trainer->adam_d_t);
  } else {
    bundle = make_bundle(cfg.hyper, height, width, cfg.seed);
    adam_g = nn::Adam(cfg.hyper.optim, bundle.generator.params());
    adam_d = nn::Adam(cfg.hyper.optim, bundle.critic.params());
  }
  const LossConfig& loss_cfg = bundle.hyper.loss;
  const bool conditional = bundle.hyper.discriminator.conditional_full_image;
  auto g_params = bundle.generator.params();
  auto d_params = bundle.critic.params();

  std::ofstream csv(cfg.out_dir + "/train.csv",
                    start_step == 0 ? std::ios::trunc : std::ios::app);
  if (!csv) throw std::runtime_error(cfg.out_dir + ": cannot write train.csv");
  if (start_step == 0) {
    csv << "step,epoch,g_total,g_sup,g_adv,d_loss,gp,seconds\n";
  }

  auto write_state = [&](const std::string& path, std::int64_t step) {
    TrainerState state;
    state.step = step;
    state.adam_g_t = adam_g.t();
    state.adam_d_t = adam_d.t();
    state.master_seed = cfg.seed;
    state.g_m = adam_g.moments_m();
    state.g_v = adam_g.moments_v();
    state.d_m = adam_d.moments_m();
    state.d_v = adam_d.moments_v();
    save_checkpoint(path, bundle, &state);
  };

  TrainLog log;
  std::vector<std::int64_t> order;
  int order_epoch = -1;

  for (std::int64_t step = start_step; step < total_steps; ++step) {
    const double t0 = omp_get_wtime();
    const int epoch = static_cast<int>(step / steps_per_epoch);
    const std::int64_t slot = step % steps_per_epoch;
    if (epoch != order_epoch) {
      order = epoch_order(cfg.seed, epoch, n_train);
      order_epoch = epoch;
    }
    const std::int64_t begin = slot * cfg.batch_size;
    const std::int64_t end = std::min(n_train, begin + cfg.batch_size);
    Batch batch = make_batch(data, order, begin, end);
    const int bsz = batch.inputs.n();

    // One generator forward serves both phases; generator parameters only
    // change after the critic update.
    nn::UNetCache g_cache;
    const nn::Tensor logits = bundle.generator.forward(batch.inputs, &g_cache);

    nn::Tensor fake_d_in, real_d_in;
    if (conditional) {
      fake_d_in = conditional_input(batch.inputs, nn::softmax_probs(logits));
      std::vector<const ClassRaster*> gt = batch.targets;
      real_d_in = conditional_input(batch.inputs, to_model_input_batch(gt));
    } else {
      fake_d_in = path_probability(logits);
      real_d_in = batch.real_mask;
    }

    // Critic update(s).
    double d_loss = 0.0, gp_value = 0.0;
    for (int c = 0; c < cfg.n_critic; ++c) {
      adam_d.zero_grad(d_params);
      nn::CriticCache real_cache, fake_cache;
      const auto real_scores = bundle.critic.forward(real_d_in, &real_cache);
      const auto fake_scores = bundle.critic.forward(fake_d_in, &fake_cache);
      std::vector<float> dreal, dfake;
      if (loss_cfg.adv == AdvMode::WganGp) {
        d_loss = nn::wgan_critic_loss(real_scores, fake_scores, dreal, dfake);
        bundle.critic.backward_scores(real_cache, dreal);
        bundle.critic.backward_scores(fake_cache, dfake);

        Rng eps_rng(mix64(cfg.seed, kEpsSalt,
                          static_cast<std::uint64_t>(step) * 16 + c));
        nn::Tensor x_hat = nn::Tensor::zeros_like(real_d_in);
        for (int s = 0; s < bsz; ++s) {
          const float eps = static_cast<float>(eps_rng.next_double());
          const float* rp = real_d_in.sample_ptr(s);
          const float* fp = fake_d_in.sample_ptr(s);
          float* xp = x_hat.sample_ptr(s);
          const std::int64_t m = x_hat.sample_size();
          for (std::int64_t k = 0; k < m; ++k) {
            xp[k] = eps * rp[k] + (1.0f - eps) * fp[k];
          }
        }
        gp_value = bundle.critic.gradient_penalty_backward(
            x_hat, static_cast<float>(loss_cfg.lambda_gp));
        d_loss += loss_cfg.lambda_gp * gp_value;
      } else {
        d_loss =
            nn::vanilla_critic_loss(real_scores, fake_scores, dreal, dfake);
        bundle.critic.backward_scores(real_cache, dreal);
        bundle.critic.backward_scores(fake_cache, dfake);
        gp_value = 0.0;
      }
      adam_d.step(d_params);
    }

    // Generator update.
    adam_g.zero_grad(g_params);
    const nn::LossGrad sup =
        loss_cfg.sup == SupMode::CrossEntropy
            ? nn::cross_entropy_loss(logits, batch.targets)
            : nn::l1_intensity_loss(logits, batch.targets);

    const auto fake_scores = bundle.critic.forward(fake_d_in, nullptr);
    std::vector<float> dscore;
    const double g_adv =
        loss_cfg.adv == AdvMode::WganGp
            ? nn::wgan_generator_loss(fake_scores, dscore)
            : nn::vanilla_generator_loss(fake_scores, dscore);
    const nn::Tensor d_fake_in_grad =
        bundle.critic.input_gradient(fake_d_in, dscore);

    nn::Tensor dlogits_adv;
    if (conditional) {
      nn::Tensor d_inputs, d_probs;
      nn::split_channels(d_fake_in_grad, batch.inputs.c(), d_inputs, d_probs);
      dlogits_adv = nn::softmax_backward(logits, d_probs);
    } else {
      dlogits_adv = nn::path_probability_backward(logits, d_fake_in_grad);
    }

    nn::Tensor dlogits = std::move(dlogits_adv);
    nn::kernels::axpy(dlogits.size(),
                      static_cast<float>(loss_cfg.lambda_ce),
                      sup.dlogits.ptr(), dlogits.ptr());
    bundle.generator.backward(dlogits, g_cache);
    adam_g.step(g_params);

    const double g_total = loss_cfg.lambda_ce * sup.value + g_adv;

    if (!std::isfinite(g_total) || !std::isfinite(d_loss)) {
      write_state(cfg.out_dir + "/diagnostic_nonfinite.ckpt", step);
      throw TrainAbort("non-finite loss at step " + std::to_string(step) +
                       "; diagnostic checkpoint written");
    }

    TrainStepRow row;
    row.step = step;
    row.epoch = epoch;
    row.g_total = g_total;
    row.g_sup = sup.value;
    row.g_adv = g_adv;
    row.d_loss = d_loss;
    row.gp = gp_value;
    row.seconds = omp_get_wtime() - t0;
    log.rows.push_back(row);
    {
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f\n",
                    static_cast<long long>(row.step), row.epoch, row.g_total,
                    row.g_sup, row.g_adv, row.d_loss, row.gp, row.seconds);
      csv << buf;
      csv.flush();
    }

    if (cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0 &&
        step + 1 < total_steps) {
      write_state(cfg.out_dir + "/ckpt_step" + std::to_string(step + 1) +
                      ".ckpt",
                  step + 1);
    }
  }

  const std::string final_path = cfg.out_dir + "/final.ckpt";
  write_state(final_path, total_steps);

  return TrainResult{std::move(bundle), std::move(log), final_path};
}

ClassLogits infer(const ModelBundle& bundle, const ClassRaster& input) {
  return infer_batch(bundle, to_model_input(input));
}

ClassLogits infer_batch(const ModelBundle& bundle, const nn::Tensor& inputs) {
  if (inputs.h() != bundle.height || inputs.w() != bundle.width) {
    throw std::invalid_argument(
        "infer: input dims do not match the checkpoint (" +
        std::to_string(bundle.width) + "x" + std::to_string(bundle.height) +
        ")");
  }
  return bundle.generator.forward(inputs, nullptr);
}

}  // namespace pathgan
