#include "tcf/net/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tcf/util/hash.hpp"

namespace tcf::net {
namespace fs = std::filesystem;
namespace {

static_assert(std::endian::native == std::endian::little, "params.bin assumes a little-endian host");

std::string blob_of(const ad::ParameterSet& ps) {
  std::string out;
  out.reserve(ps.scalar_count() * sizeof(double));
  for (const auto& p : ps)
    out.append(reinterpret_cast<const char*>(p.value.data()), p.value.size() * sizeof(double));
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("checkpoint: write failed for " + path.string());
}

std::string fingerprint_of(const std::string& cfg_hash, const std::string& blob) {
  return hex64(fnv1a64(blob, fnv1a64(cfg_hash)));
}

}  // namespace

std::string config_hash(const ModelConfig& model, const nlohmann::json& train_config) {
  nlohmann::json j = {{"model", to_json(model)}, {"train", train_config}};
  return hex64(fnv1a64(j.dump()));
}

std::string model_fingerprint(const Network& net, const CheckpointInfo& info) {
  return fingerprint_of(config_hash(info.model, info.train_config), blob_of(net.params()));
}

void save_checkpoint(const std::string& dir, const Network& net, const CheckpointInfo& info) {
  if (!(net.config() == info.model))
    throw CheckpointError("checkpoint: network config differs from the recorded config");
  fs::create_directories(dir);
  const std::string blob = blob_of(net.params());
  const std::string cfg_hash = config_hash(info.model, info.train_config);

  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : net.params())
    params.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  nlohmann::json manifest = {
      {"schema_version", 1},
      {"checkpoint_version", kCheckpointVersion},
      {"model_config", to_json(info.model)},
      {"train_config", info.train_config},
      {"config_hash", cfg_hash},
      {"dataset_fingerprint", info.dataset_fingerprint},
      {"parameters", params},
      {"blob_bytes", blob.size()},
      {"model_fingerprint", fingerprint_of(cfg_hash, blob)},
  };
  write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
  write_file(fs::path(dir) / "params.bin", blob);
  data::save_norm_stats(info.stats, (fs::path(dir) / "norm_stats.json").string());
}

Checkpoint load_checkpoint(const std::string& dir) {
  const fs::path root(dir);
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(root / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed manifest: ") + e.what());
  }
  try {
    const int version = m.at("checkpoint_version").get<int>();
    if (version != kCheckpointVersion)
      throw CheckpointError("checkpoint: version " + std::to_string(version) +
                            " is not supported (expected " + std::to_string(kCheckpointVersion) +
                            ")");
    Checkpoint ck;
    ck.info.model = model_config_from_json(m.at("model_config"));
    ck.info.train_config = m.at("train_config");
    ck.info.dataset_fingerprint = m.at("dataset_fingerprint").get<std::string>();
    ck.config_hash = config_hash(ck.info.model, ck.info.train_config);
    if (ck.config_hash != m.at("config_hash").get<std::string>())
      throw CheckpointError("checkpoint: config hash mismatch");

    ck.network = std::make_unique<Network>(ck.info.model, 0);
    auto& ps = ck.network->params();
    const auto& listed = m.at("parameters");
    if (listed.size() != ps.size())
      throw CheckpointError("checkpoint: manifest lists " + std::to_string(listed.size()) +
                            " parameters, model has " + std::to_string(ps.size()));
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto& e = listed[i];
      if (e.at("name").get<std::string>() != ps[i].name ||
          e.at("rows").get<std::size_t>() != ps[i].value.rows() ||
          e.at("cols").get<std::size_t>() != ps[i].value.cols())
        throw CheckpointError("checkpoint: parameter " + std::to_string(i) + " (" +
                              e.at("name").get<std::string>() + ") does not match the model");
    }
    const std::string blob = read_file(root / "params.bin");
    if (blob.size() != ps.scalar_count() * sizeof(double) ||
        blob.size() != m.at("blob_bytes").get<std::size_t>())
      throw CheckpointError("checkpoint: params.bin holds " + std::to_string(blob.size()) +
                            " bytes, manifest expects " +
                            std::to_string(m.at("blob_bytes").get<std::size_t>()));
    std::size_t off = 0;
    for (auto& p : ps) {
      const std::size_t n = p.value.size() * sizeof(double);
      std::memcpy(p.value.data(), blob.data() + off, n);
      off += n;
      if (!p.value.all_finite())
        throw CheckpointError("checkpoint: parameter " + p.name + " is not finite");
    }
    ck.model_fingerprint = fingerprint_of(ck.config_hash, blob);
    if (ck.model_fingerprint != m.at("model_fingerprint").get<std::string>())
      throw CheckpointError("checkpoint: parameter blob does not match the manifest fingerprint");
    ck.info.stats = data::load_norm_stats((root / "norm_stats.json").string());
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed manifest: ") + e.what());
  }
}

}  // namespace tcf::net
