#pragma once

#include "relight/adam.hpp"
#include "relight/net.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace relight::nn {

/// On-disk model format: a text manifest (format version, architecture
/// descriptor, sorted config echo, optimizer flag, tensor table with
/// name/shape/byte-offset) followed by a little-endian 32-bit float payload
/// in manifest order. Round-trips byte-exactly.
struct CheckpointData {
    int version = 1;
    std::string arch; // NetSpec descriptor line
    std::vector<std::pair<std::string, std::string>> config; // sorted by key
    std::int64_t opt_steps = -1; // -1 = no optimizer state stored
    std::vector<std::pair<std::string, Tensor>> tensors;
};

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data);
CheckpointData read_checkpoint(const std::filesystem::path& path);

/// Packs parameters (plus optimizer moments when given) for writing. Config
/// entries are sorted by key; parameter values are snapped to f32 so the
/// in-memory model equals what a reader will see.
CheckpointData
to_checkpoint(NetworkParams& params, const std::map<std::string, std::string>& config_echo,
              const Adam* opt = nullptr);

NetworkParams params_from_checkpoint(const CheckpointData& data);

/// Rebuilds optimizer moments stored by to_checkpoint; returns nullopt when
/// the checkpoint carries no optimizer state.
std::optional<Adam> adam_from_checkpoint(const CheckpointData& data, const NetworkParams& params,
                                         AdamConfig cfg);

} // namespace relight::nn
