#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace isf {

/// IEEE-polynomial CRC-32 (the zlib/PNG variant).
std::uint32_t crc32_ieee(std::span<const std::byte> data);

/// Incremental form; seed with 0.
std::uint32_t crc32_ieee_update(std::uint32_t crc, std::span<const std::byte> data);

} // namespace isf
