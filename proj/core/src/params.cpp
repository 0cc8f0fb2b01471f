#include "newsseg/params.hpp"

#include <cstdio>
#include <cstring>

#include <nlohmann/json.hpp>

#include "newsseg/error.hpp"
#include "newsseg/models.hpp"

namespace newsseg {

namespace {

constexpr char kMagic[4] = {'N', 'S', 'G', '1'};
constexpr int kFormatVersion = 1;

uint32_t crc_table_entry(uint32_t i) {
  uint32_t c = i;
  for (int k = 0; k < 8; ++k) {
    c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
  }
  return c;
}

const uint32_t* crc_table() {
  static uint32_t table[256];
  static bool built = false;
  if (!built) {
    for (uint32_t i = 0; i < 256; ++i) table[i] = crc_table_entry(i);
    built = true;
  }
  return table;
}

}  // namespace

uint32_t crc32(const uint8_t* data, size_t length, uint32_t seed) {
  const uint32_t* table = crc_table();
  uint32_t c = seed ^ 0xFFFFFFFFu;
  for (size_t i = 0; i < length; ++i) {
    c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

void ParameterStore::add(const std::string& name, TensorF tensor) {
  auto [it, inserted] = tensors_.emplace(name, std::move(tensor));
  if (!inserted) {
    throw ShapeError("duplicate parameter name: " + name);
  }
}

bool ParameterStore::contains(const std::string& name) const {
  return tensors_.count(name) > 0;
}

const TensorF& ParameterStore::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw ShapeError("no parameter named " + name);
  }
  return it->second;
}

int64_t ParameterStore::total_parameters() const {
  int64_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.numel();
  return n;
}

ParameterStore snapshot_parameters(Model& model) {
  ParameterStore store;
  model.visit_params([&](const std::string& name, TensorF* p, TensorF*) {
    store.add(name, *p);
  });
  return store;
}

void load_into_model(const ParameterStore& store, Model& model) {
  size_t applied = 0;
  model.visit_params([&](const std::string& name, TensorF* p, TensorF*) {
    const TensorF& src = store.get(name);
    if (src.shape != p->shape) {
      throw ShapeError("parameter " + name + " shape mismatch");
    }
    *p = src;
    ++applied;
  });
  if (applied != store.size()) {
    throw ShapeError("weight store has " + std::to_string(store.size()) +
                     " tensors but the model consumed " +
                     std::to_string(applied));
  }
}

void save_parameters(const ParameterStore& store, const std::string& path,
                     const std::string& config_fingerprint) {
  nlohmann::json header;
  header["format_version"] = kFormatVersion;
  header["config"] = config_fingerprint;
  header["tensors"] = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : store) {
    header["tensors"].push_back({{"name", name},
                                 {"dtype", "f32"},
                                 {"shape", t.shape},
                                 {"offset", offset},
                                 {"bytes", t.data.size() * sizeof(float)}});
    offset += t.data.size() * sizeof(float);
  }
  std::string header_text = header.dump();

  std::vector<uint8_t> bytes;
  bytes.reserve(8 + header_text.size() + offset + 4);
  bytes.insert(bytes.end(), kMagic, kMagic + 4);
  uint32_t hlen = static_cast<uint32_t>(header_text.size());
  for (int i = 0; i < 4; ++i) {
    bytes.push_back(static_cast<uint8_t>((hlen >> (8 * i)) & 0xFFu));
  }
  bytes.insert(bytes.end(), header_text.begin(), header_text.end());
  for (const auto& [name, t] : store) {
    const uint8_t* raw = reinterpret_cast<const uint8_t*>(t.data.data());
    bytes.insert(bytes.end(), raw, raw + t.data.size() * sizeof(float));
  }
  uint32_t checksum = crc32(bytes.data(), bytes.size());
  for (int i = 0; i < 4; ++i) {
    bytes.push_back(static_cast<uint8_t>((checksum >> (8 * i)) & 0xFFu));
  }

  FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw IoError("cannot write weight file: " + path);
  size_t written = std::fwrite(bytes.data(), 1, bytes.size(), fp);
  std::fclose(fp);
  if (written != bytes.size()) throw IoError("short write to " + path);
}

WeightFile load_weight_file(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp == nullptr) throw IoError("cannot open weight file: " + path);
  std::fseek(fp, 0, SEEK_END);
  long size = std::ftell(fp);
  std::fseek(fp, 0, SEEK_SET);
  std::vector<uint8_t> bytes(static_cast<size_t>(std::max(0L, size)));
  size_t got = std::fread(bytes.data(), 1, bytes.size(), fp);
  std::fclose(fp);
  bytes.resize(got);

  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CorruptFileError("not a newsseg weight file: " + path);
  }
  uint32_t stored_crc = 0;
  for (int i = 0; i < 4; ++i) {
    stored_crc |= static_cast<uint32_t>(bytes[bytes.size() - 4 +
                                              static_cast<size_t>(i)])
                  << (8 * i);
  }
  if (crc32(bytes.data(), bytes.size() - 4) != stored_crc) {
    throw CorruptFileError("checksum mismatch in " + path);
  }
  uint32_t hlen = 0;
  for (int i = 0; i < 4; ++i) {
    hlen |= static_cast<uint32_t>(bytes[4 + static_cast<size_t>(i)])
            << (8 * i);
  }
  if (8 + static_cast<size_t>(hlen) + 4 > bytes.size()) {
    throw CorruptFileError("truncated header in " + path);
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 8,
                                   bytes.begin() + 8 + hlen);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError("bad weight header in " + path + ": " + e.what());
  }
  int version = header.at("format_version").get<int>();
  if (version != kFormatVersion) {
    throw VersionMismatchError("weight file format version " +
                               std::to_string(version) + " (expected " +
                               std::to_string(kFormatVersion) + ")");
  }

  WeightFile out;
  out.config_fingerprint = header.at("config").get<std::string>();
  const size_t payload_start = 8 + hlen;
  const size_t payload_len = bytes.size() - 4 - payload_start;
  for (const auto& entry : header.at("tensors")) {
    std::string name = entry.at("name").get<std::string>();
    if (entry.at("dtype").get<std::string>() != "f32") {
      throw CorruptFileError("unsupported dtype for tensor " + name);
    }
    std::vector<int64_t> shape = entry.at("shape").get<std::vector<int64_t>>();
    uint64_t off = entry.at("offset").get<uint64_t>();
    uint64_t nbytes = entry.at("bytes").get<uint64_t>();
    if (off + nbytes > payload_len) {
      throw CorruptFileError("tensor " + name + " payload out of range");
    }
    TensorF t;
    t.shape = shape;
    if (TensorF::numel_of(shape) * sizeof(float) != nbytes) {
      throw CorruptFileError("tensor " + name + " byte count disagrees "
                             "with its shape");
    }
    t.data.resize(nbytes / sizeof(float));
    std::memcpy(t.data.data(), bytes.data() + payload_start + off, nbytes);
    out.store.add(name, std::move(t));
  }
  return out;
}

ParameterStore load_parameters(const std::string& path,
                               const std::string& expected_fingerprint) {
  WeightFile file = load_weight_file(path);
  if (file.config_fingerprint != expected_fingerprint) {
    throw ConfigMismatchError(
        "weight file " + path +
        " was trained with a different model configuration");
  }
  return std::move(file.store);
}

}  // namespace newsseg
