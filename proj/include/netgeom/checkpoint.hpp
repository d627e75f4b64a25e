#pragma once

#include <cstdint>
#include <string>

#include "netgeom/network.hpp"

namespace netgeom {

// File layout (schema_version 1): one JSON document with the layer specs,
// init provenance (seed, scheme), the epoch the weights were taken at, the
// current per-layer nu values, and one entry per parameter block carrying
// name, group, shape and base64-coded little-endian f64 payloads. Weights
// round trip bit exactly.
struct LoadedCheckpoint {
  Network net;
  std::uint64_t seed = 0;
  InitScheme scheme = InitScheme::He;
  int epoch = 0;
};

void save_checkpoint(const std::string& path, const Network& net,
                     std::uint64_t seed, InitScheme scheme, int epoch);

// Throws DataError for unreadable/corrupt files and ConfigError for
// well-formed files with invalid content (unknown schema, bad specs).
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace netgeom
