#include "missdiff/checkpoint.hpp"

#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "missdiff/csv.hpp"

namespace missdiff {

namespace {

using nlohmann::json;

json schema_to_json(const Schema& schema) {
  json out = json::array();
  for (const ColumnSpec& c : schema.columns) {
    json col;
    col["name"] = c.name;
    col["kind"] = c.kind == ColumnKind::continuous ? "continuous" : "categorical";
    col["fitted"] = c.fitted;
    if (c.kind == ColumnKind::continuous) {
      col["min"] = c.min;
      col["max"] = c.max;
    } else {
      col["categories"] = c.categories;
    }
    out.push_back(std::move(col));
  }
  return out;
}

Schema schema_from_json(const json& j) {
  Schema schema;
  for (const auto& col : j) {
    ColumnSpec spec;
    spec.name = col.at("name").get<std::string>();
    spec.kind = col.at("kind").get<std::string>() == "continuous" ? ColumnKind::continuous
                                                                  : ColumnKind::categorical;
    spec.fitted = col.at("fitted").get<bool>();
    if (spec.kind == ColumnKind::continuous) {
      spec.min = col.at("min").get<double>();
      spec.max = col.at("max").get<double>();
    } else {
      spec.categories = col.at("categories").get<std::vector<std::string>>();
    }
    schema.columns.push_back(std::move(spec));
  }
  return schema;
}

void append_le_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint64_t read_le_u64(const std::string& bytes, size_t offset) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes[offset + static_cast<size_t>(i)]))
         << (8 * i);
  return v;
}

void append_le_f32(std::string& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

float read_le_f32(const std::string& bytes, size_t offset) {
  uint32_t bits = 0;
  for (int i = 0; i < 4; ++i)
    bits |= static_cast<uint32_t>(static_cast<uint8_t>(bytes[offset + static_cast<size_t>(i)]))
            << (8 * i);
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  const auto tensors = checkpoint.params.tensors();
  const auto names = checkpoint.params.tensor_names();

  json meta;
  meta["config"] = {
      {"T", checkpoint.config.T},
      {"beta_min", checkpoint.config.beta_min},
      {"beta_max", checkpoint.config.beta_max},
      {"epochs", checkpoint.config.epochs},
      {"batch", checkpoint.config.batch},
      {"base_lr", checkpoint.config.base_lr},
      {"mode", train_mode_to_string(checkpoint.config.mode)},
      {"seed", checkpoint.config.seed},
      {"channels", checkpoint.config.channels},
      {"embed_dim", checkpoint.config.embed_dim},
      {"num_blocks", checkpoint.config.num_blocks},
  };
  meta["schema"] = schema_to_json(checkpoint.schema);
  meta["schedule"] = {{"T", checkpoint.config.T},
                      {"beta_min", checkpoint.config.beta_min},
                      {"beta_max", checkpoint.config.beta_max}};
  meta["network"] = {{"input_dim", checkpoint.params.config.input_dim},
                     {"channels", checkpoint.params.config.channels},
                     {"embed_dim", checkpoint.params.config.embed_dim},
                     {"num_blocks", checkpoint.params.config.num_blocks}};
  meta["loss_trace"] = checkpoint.loss_trace;
  meta["missing_rates"] = {{"per_column", checkpoint.column_missing_rates},
                           {"max", checkpoint.max_missing_rate}};

  json tensor_table = json::array();
  uint64_t offset = 0;
  for (size_t i = 0; i < tensors.size(); ++i) {
    tensor_table.push_back({{"name", names[i]},
                            {"shape", tensors[i]->shape},
                            {"offset", offset}});
    offset += static_cast<uint64_t>(tensors[i]->numel()) * 4;
  }
  meta["tensors"] = std::move(tensor_table);

  const std::string meta_str = meta.dump();
  std::string out = "MDIF";
  out.push_back(static_cast<char>(kCheckpointVersion));
  append_le_u64(out, meta_str.size());
  out += meta_str;
  for (const Tensor* t : tensors)
    for (float v : t->data) append_le_f32(out, v);
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 13 || bytes.compare(0, 4, "MDIF") != 0)
    throw std::runtime_error("checkpoint: bad magic");
  const uint8_t version = static_cast<uint8_t>(bytes[4]);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(version));
  const uint64_t meta_len = read_le_u64(bytes, 5);
  if (bytes.size() < 13 + meta_len) throw std::runtime_error("checkpoint: truncated metadata");
  const json meta = json::parse(bytes.substr(13, meta_len));
  const size_t payload_start = 13 + meta_len;

  Checkpoint ckpt;
  const json& cfg = meta.at("config");
  ckpt.config.T = cfg.at("T").get<int>();
  ckpt.config.beta_min = cfg.at("beta_min").get<double>();
  ckpt.config.beta_max = cfg.at("beta_max").get<double>();
  ckpt.config.epochs = cfg.at("epochs").get<int>();
  ckpt.config.batch = cfg.at("batch").get<int>();
  ckpt.config.base_lr = cfg.at("base_lr").get<double>();
  ckpt.config.mode = train_mode_from_string(cfg.at("mode").get<std::string>());
  ckpt.config.seed = cfg.at("seed").get<uint64_t>();
  ckpt.config.channels = cfg.at("channels").get<int>();
  ckpt.config.embed_dim = cfg.at("embed_dim").get<int>();
  ckpt.config.num_blocks = cfg.at("num_blocks").get<int>();

  ckpt.schema = schema_from_json(meta.at("schema"));
  ckpt.loss_trace = meta.at("loss_trace").get<std::vector<float>>();
  ckpt.column_missing_rates =
      meta.at("missing_rates").at("per_column").get<std::vector<double>>();
  ckpt.max_missing_rate = meta.at("missing_rates").at("max").get<double>();

  NetworkConfig net_config;
  const json& net = meta.at("network");
  net_config.input_dim = net.at("input_dim").get<int>();
  net_config.channels = net.at("channels").get<int>();
  net_config.embed_dim = net.at("embed_dim").get<int>();
  net_config.num_blocks = net.at("num_blocks").get<int>();

  // Allocate via a throwaway init, then overwrite from the payload.
  Rng scratch(0);
  ckpt.params = init_params(net_config, scratch);
  auto tensors = ckpt.params.tensors();
  const auto expected_names = ckpt.params.tensor_names();
  const json& table = meta.at("tensors");
  if (table.size() != tensors.size())
    throw std::runtime_error("checkpoint: tensor table size mismatch");
  for (size_t i = 0; i < tensors.size(); ++i) {
    const json& entry = table[i];
    if (entry.at("name").get<std::string>() != expected_names[i])
      throw std::runtime_error("checkpoint: unexpected tensor name");
    const auto shape = entry.at("shape").get<std::vector<int64_t>>();
    if (shape != tensors[i]->shape)
      throw std::runtime_error("checkpoint: tensor shape mismatch");
    const uint64_t offset = entry.at("offset").get<uint64_t>();
    const size_t need = payload_start + offset + tensors[i]->data.size() * 4;
    if (bytes.size() < need) throw std::runtime_error("checkpoint: truncated payload");
    for (size_t k = 0; k < tensors[i]->data.size(); ++k)
      tensors[i]->data[k] = read_le_f32(bytes, payload_start + offset + 4 * k);
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  write_text_file(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(read_text_file(path));
}

}  // namespace missdiff
