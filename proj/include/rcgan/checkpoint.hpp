#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rcgan/loss_types.hpp"
#include "rcgan/tensor.hpp"

namespace rcgan {

// One named tensor inside a checkpoint, e.g. "g_n.enc1.w".
struct TensorRecord {
  std::string name;
  Tensor value;
};

// Full training state: enough to resume bit-exactly. Stored as a binary
// container (exact doubles) plus a JSON sidecar with the human-readable
// metadata and the effective config echo.
struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::string config_text;  // canonical serialized config
  std::int64_t epoch = 0;
  std::int64_t global_step = 0;
  std::string rng_state;
  std::vector<TensorRecord> tensors;   // network parameters, canonical order
  std::vector<double> opt_state;       // generator-side then discriminator Adam moments
  std::uint64_t gen_steps = 0;         // Adam step counters
  std::uint64_t dis_steps = 0;
  std::vector<LossBreakdown> loss_tail;  // most recent logged steps

  std::uint64_t params_checksum() const;
};

// Writes <path> and the sidecar <path with .json extension>.
void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rcgan
