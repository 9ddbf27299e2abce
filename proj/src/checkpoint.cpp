#include "pathgan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pathgan/rng.hpp"

using nlohmann::json;

namespace pathgan {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* data, std::size_t bytes) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
}

json tensor_entry(const std::string& name, const nn::Tensor& t) {
  return json{{"name", name},
              {"shape", {t.shape[0], t.shape[1], t.shape[2], t.shape[3]}}};
}

void write_tensor(std::ofstream& out, const nn::Tensor& t) {
  write_raw(out, t.data.data(), t.data.size() * sizeof(float));
}

nn::Tensor read_tensor(std::ifstream& in, const json& entry) {
  const auto& s = entry.at("shape");
  nn::Tensor t(s[0].get<int>(), s[1].get<int>(), s[2].get<int>(),
               s[3].get<int>());
  read_raw(in, t.data.data(), t.data.size() * sizeof(float));
  return t;
}

}  // namespace

ModelBundle make_bundle(ModelHyper hyper, int height, int width,
                        std::uint64_t seed) {
  hyper.loss.validate();
  hyper.generator.depth = resolve_depth(hyper.generator.depth, height, width);
  hyper.discriminator.levels =
      hyper.discriminator.levels >= 0
          ? hyper.discriminator.levels
          : resolve_depth(0, height, width);

  ModelBundle bundle;
  bundle.hyper = hyper;
  bundle.height = height;
  bundle.width = width;
  Rng g_rng(mix64(seed, 0x67656eULL));
  Rng d_rng(mix64(seed, 0x64697363ULL));
  bundle.generator = nn::UNetGenerator(hyper.generator, g_rng);
  bundle.critic = nn::Critic(hyper.discriminator, height, width, d_rng);
  return bundle;
}

void save_checkpoint(const std::string& path, ModelBundle& bundle,
                     const TrainerState* trainer) {
  json header;
  header["hyper"] = json::parse(bundle.hyper.to_json());
  header["height"] = bundle.height;
  header["width"] = bundle.width;

  json tensors = json::array();
  for (nn::Param* p : bundle.generator.params()) {
    tensors.push_back(tensor_entry(p->name, p->value));
  }
  for (nn::Param* p : bundle.critic.params()) {
    tensors.push_back(tensor_entry(p->name, p->value));
  }
  if (trainer) {
    json t;
    t["step"] = trainer->step;
    t["adam_g_t"] = trainer->adam_g_t;
    t["adam_d_t"] = trainer->adam_d_t;
    t["master_seed"] = trainer->master_seed;
    header["trainer"] = t;
    auto add_moments = [&](const std::vector<nn::Tensor>& ts,
                           const std::string& prefix) {
      for (std::size_t i = 0; i < ts.size(); ++i) {
        tensors.push_back(
            tensor_entry(prefix + std::to_string(i), ts[i]));
      }
    };
    add_moments(trainer->g_m, "adam.g.m.");
    add_moments(trainer->g_v, "adam.g.v.");
    add_moments(trainer->d_m, "adam.d.m.");
    add_moments(trainer->d_v, "adam.d.v.");
  } else {
    header["trainer"] = nullptr;
  }
  header["tensors"] = tensors;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write checkpoint");
  const std::string head = header.dump();
  const std::uint64_t head_len = head.size();
  write_raw(out, kMagic, 4);
  write_raw(out, &kVersion, sizeof(kVersion));
  write_raw(out, &head_len, sizeof(head_len));
  write_raw(out, head.data(), head.size());

  for (nn::Param* p : bundle.generator.params()) write_tensor(out, p->value);
  for (nn::Param* p : bundle.critic.params()) write_tensor(out, p->value);
  if (trainer) {
    for (const auto& t : trainer->g_m) write_tensor(out, t);
    for (const auto& t : trainer->g_v) write_tensor(out, t);
    for (const auto& t : trainer->d_m) write_tensor(out, t);
    for (const auto& t : trainer->d_v) write_tensor(out, t);
  }
  if (!out) throw std::runtime_error(path + ": checkpoint write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open checkpoint");

  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t head_len = 0;
  read_raw(in, magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(path + ": not a checkpoint file");
  }
  read_raw(in, &version, sizeof(version));
  if (version != kVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version");
  }
  read_raw(in, &head_len, sizeof(head_len));
  std::string head(head_len, '\0');
  read_raw(in, head.data(), head_len);
  const json header = json::parse(head);

  Checkpoint ck;
  const ModelHyper hyper = ModelHyper::from_json(header.at("hyper").dump());
  const int height = header.at("height").get<int>();
  const int width = header.at("width").get<int>();
  // Weight layout comes from the spec; the payload overwrites the seed-0
  // initialization entirely.
  ck.bundle = make_bundle(hyper, height, width, 0);

  const json& tensors = header.at("tensors");
  std::size_t cursor = 0;
  auto next_entry = [&](const std::string& expected_name) -> const json& {
    if (cursor >= tensors.size()) {
      throw std::runtime_error(path + ": tensor directory exhausted");
    }
    const json& e = tensors[cursor++];
    if (e.at("name").get<std::string>() != expected_name) {
      throw std::runtime_error(path + ": unexpected tensor " +
                               e.at("name").get<std::string>() +
                               " (wanted " + expected_name + ")");
    }
    return e;
  };

  for (nn::Param* p : ck.bundle.generator.params()) {
    p->value = read_tensor(in, next_entry(p->name));
  }
  for (nn::Param* p : ck.bundle.critic.params()) {
    p->value = read_tensor(in, next_entry(p->name));
  }

  if (!header.at("trainer").is_null()) {
    TrainerState state;
    const json& t = header.at("trainer");
    state.step = t.at("step").get<std::int64_t>();
    state.adam_g_t = t.at("adam_g_t").get<std::int64_t>();
    state.adam_d_t = t.at("adam_d_t").get<std::int64_t>();
    state.master_seed = t.at("master_seed").get<std::uint64_t>();
    auto read_moments = [&](std::vector<nn::Tensor>& ts,
                            const std::string& prefix, std::size_t count) {
      for (std::size_t i = 0; i < count; ++i) {
        ts.push_back(
            read_tensor(in, next_entry(prefix + std::to_string(i))));
      }
    };
    const std::size_t g_count = ck.bundle.generator.params().size();
    const std::size_t d_count = ck.bundle.critic.params().size();
    read_moments(state.g_m, "adam.g.m.", g_count);
    read_moments(state.g_v, "adam.g.v.", g_count);
    read_moments(state.d_m, "adam.d.m.", d_count);
    read_moments(state.d_v, "adam.d.v.", d_count);
    ck.trainer = std::move(state);
  }
  return ck;
}

}  // namespace pathgan
