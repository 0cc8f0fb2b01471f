#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "newsseg/tensor.hpp"

namespace newsseg {

class Model;

/// Named float32 tensors; names unique, shapes immutable after add().
class ParameterStore {
 public:
  void add(const std::string& name, TensorF tensor);
  bool contains(const std::string& name) const;
  const TensorF& get(const std::string& name) const;
  size_t size() const { return tensors_.size(); }
  int64_t total_parameters() const;

  auto begin() const { return tensors_.begin(); }
  auto end() const { return tensors_.end(); }

  bool operator==(const ParameterStore&) const = default;

 private:
  std::map<std::string, TensorF> tensors_;
};

/// Copies a model's parameters out into an owning store.
ParameterStore snapshot_parameters(Model& model);

/// Copies stored tensors into the model. Throws ShapeError on missing
/// names or shape disagreements.
void load_into_model(const ParameterStore& store, Model& model);

/// Weight file: magic "NSG1", u32 header length, JSON header (format
/// version, config fingerprint, tensor directory with offsets), raw
/// little-endian f32 payloads, CRC32 over everything before it.
void save_parameters(const ParameterStore& store, const std::string& path,
                     const std::string& config_fingerprint);

struct WeightFile {
  std::string config_fingerprint;
  ParameterStore store;
};

/// Verifies magic, version, and checksum. Throws CorruptFileError or
/// VersionMismatchError.
WeightFile load_weight_file(const std::string& path);

/// load_weight_file plus a fingerprint check (ConfigMismatchError).
ParameterStore load_parameters(const std::string& path,
                               const std::string& expected_fingerprint);

uint32_t crc32(const uint8_t* data, size_t length, uint32_t seed = 0);

}  // namespace newsseg
