#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "bowae/model.hpp"

namespace bowae {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary checkpoint; the byte layout is documented in docs/checkpoint_format.md.
/// Parameters round-trip bit-exactly. Trees are stored as (V, seed) and
/// rebuilt on load.
void write_checkpoint(std::ostream& out, const BilingualModel& model);
BilingualModel read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const BilingualModel& model);
BilingualModel load_checkpoint(const std::filesystem::path& path);

}  // namespace bowae
