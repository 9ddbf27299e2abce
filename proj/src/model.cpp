#include "pathgan/model.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace pathgan {

int GeneratorSpec::features_at(int level) const {
  return std::min(max_features, base_features << (level - 1));
}

int DiscriminatorSpec::features_at(int level) const {
  return std::min(max_features, base_features << (level - 1));
}

std::string to_string(AdvMode m) {
  return m == AdvMode::WganGp ? "wgan-gp" : "vanilla";
}

std::string to_string(SupMode m) {
  return m == SupMode::CrossEntropy ? "cross-entropy" : "l1";
}

AdvMode adv_mode_from_string(const std::string& s) {
  if (s == "wgan-gp") return AdvMode::WganGp;
  if (s == "vanilla") return AdvMode::Vanilla;
  throw std::invalid_argument("unknown adversarial mode: " + s);
}

SupMode sup_mode_from_string(const std::string& s) {
  if (s == "cross-entropy") return SupMode::CrossEntropy;
  if (s == "l1") return SupMode::L1;
  throw std::invalid_argument("unknown supervised mode: " + s);
}

void LossConfig::validate() const {
  if (lambda_ce < 0.0 || lambda_gp < 0.0) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
}

std::string ModelHyper::to_json() const {
  json j;
  j["generator"] = {{"in_channels", generator.in_channels},
                    {"out_channels", generator.out_channels},
                    {"depth", generator.depth},
                    {"base_features", generator.base_features},
                    {"max_features", generator.max_features},
                    {"norm", generator.norm},
                    {"activation", generator.activation}};
  j["discriminator"] = {
      {"conditional_full_image", discriminator.conditional_full_image},
      {"levels", discriminator.levels},
      {"base_features", discriminator.base_features},
      {"max_features", discriminator.max_features}};
  j["loss"] = {{"lambda_ce", loss.lambda_ce},
               {"lambda_gp", loss.lambda_gp},
               {"adv", to_string(loss.adv)},
               {"sup", to_string(loss.sup)}};
  j["optim"] = {{"lr", optim.lr},
                {"beta1", optim.beta1},
                {"beta2", optim.beta2},
                {"eps", optim.eps}};
  return j.dump();
}

ModelHyper ModelHyper::from_json(const std::string& text) {
  const json j = json::parse(text);
  ModelHyper h;
  const auto& g = j.at("generator");
  h.generator.in_channels = g.at("in_channels").get<int>();
  h.generator.out_channels = g.at("out_channels").get<int>();
  h.generator.depth = g.at("depth").get<int>();
  h.generator.base_features = g.at("base_features").get<int>();
  h.generator.max_features = g.at("max_features").get<int>();
  h.generator.norm = g.at("norm").get<std::string>();
  h.generator.activation = g.at("activation").get<std::string>();
  const auto& d = j.at("discriminator");
  h.discriminator.conditional_full_image =
      d.at("conditional_full_image").get<bool>();
  h.discriminator.levels = d.at("levels").get<int>();
  h.discriminator.base_features = d.at("base_features").get<int>();
  h.discriminator.max_features = d.at("max_features").get<int>();
  const auto& l = j.at("loss");
  h.loss.lambda_ce = l.at("lambda_ce").get<double>();
  h.loss.lambda_gp = l.at("lambda_gp").get<double>();
  h.loss.adv = adv_mode_from_string(l.at("adv").get<std::string>());
  h.loss.sup = sup_mode_from_string(l.at("sup").get<std::string>());
  const auto& o = j.at("optim");
  h.optim.lr = o.at("lr").get<double>();
  h.optim.beta1 = o.at("beta1").get<double>();
  h.optim.beta2 = o.at("beta2").get<double>();
  h.optim.eps = o.at("eps").get<double>();
  return h;
}

ModelHyper ganfinder_preset() {
  ModelHyper h;
  h.loss.sup = SupMode::CrossEntropy;
  h.loss.adv = AdvMode::WganGp;
  h.discriminator.conditional_full_image = false;
  return h;
}

ModelHyper pix2pix_baseline_preset() {
  ModelHyper h;
  h.loss.sup = SupMode::L1;
  h.loss.adv = AdvMode::Vanilla;
  h.loss.lambda_gp = 0.0;
  h.discriminator.conditional_full_image = true;
  return h;
}

ModelHyper preset_from_name(const std::string& name) {
  if (name == "ganfinder") return ganfinder_preset();
  if (name == "pix2pix-baseline") return pix2pix_baseline_preset();
  throw std::invalid_argument("unknown ablation preset: " + name);
}

int resolve_depth(int requested, int height, int width) {
  if (requested > 0) return requested;
  const int side = std::min(height, width);
  int depth = 0;
  int size = side;
  while (size > 2) {
    size /= 2;
    ++depth;
  }
  if (depth < 2) {
    throw std::invalid_argument("input too small: need depth >= 2");
  }
  return depth;
}

}  // namespace pathgan
