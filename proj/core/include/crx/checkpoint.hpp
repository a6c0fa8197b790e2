#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crx/nn.hpp"

namespace crx::nn {

/// Versioned binary container; layout documented in docs/checkpoint_format.md.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::vector<std::pair<std::string, DenseNetwork>> networks;
  std::vector<std::pair<std::string, AdamState>> optimizers;
  std::string rng_state;  // textual std::mt19937_64 state
  std::string metadata;   // free-form JSON

  const DenseNetwork& network(const std::string& name) const;
  const AdamState& optimizer(const std::string& name) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
/// Throws IoError on a bad magic, unsupported version or truncated stream.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string rng_to_string(const Rng& rng);
Rng rng_from_string(const std::string& state);

}  // namespace crx::nn
