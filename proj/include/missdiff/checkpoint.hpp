#pragma once

#include <string>

#include "missdiff/diffusion.hpp"

namespace missdiff {

// Binary checkpoint container:
//   magic "MDIF" | format version (1 byte) | metadata length (8-byte LE)
//   | UTF-8 JSON metadata | concatenated little-endian float32 tensors.
// The metadata carries the config, fitted schema, schedule parameters, the
// tensor name/shape/offset table (offsets in bytes from the payload start),
// the loss trace and the training-mask missing rates. Unknown versions are
// rejected.
inline constexpr uint8_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace missdiff
