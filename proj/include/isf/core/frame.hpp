#pragma once

// Binary frame layout shared by serialization and staging (little-endian):
//
//   magic "ISF1" | version u16 = 1 | payload_kind u16 | step_index u64 |
//   sim_time f64 | E u32 | P u32 | components u32 | reserved u32 = 0 |
//   payload_len u64 | payload bytes | crc32 u32
//
// The trailing CRC-32 (IEEE polynomial) covers header + payload, excluding
// the CRC field itself. payload_kind 0 carries the raw field values as f64;
// payload_kind 1 carries a compressed block (see tasks/lossy.hpp).

#include <cstdint>
#include <span>

#include "isf/core/bytes.hpp"
#include "isf/core/types.hpp"

namespace isf {

inline constexpr std::uint8_t kFrameMagic[4] = {0x49, 0x53, 0x46, 0x31}; // "ISF1"
inline constexpr std::uint16_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 48;
inline constexpr std::size_t kFrameTrailerSize = 4;

enum class PayloadKind : std::uint16_t {
    FieldSnapshot = 0,
    CompressedBlock = 1,
};

struct FrameHeader {
    PayloadKind kind = PayloadKind::FieldSnapshot;
    std::uint64_t step_index = 0;
    double sim_time = 0.0;
    std::uint32_t elements_per_axis = 0;
    std::uint32_t points_per_element_axis = 0;
    std::uint32_t components = 0;
    std::uint64_t payload_len = 0;
};

/// Assembles a complete frame (header + payload + CRC).
Bytes build_frame(const FrameHeader& header, std::span<const std::byte> payload);

/// Parses header fields without consuming the payload; validates magic and version.
FrameHeader parse_frame_header(std::span<const std::byte> header_bytes);

/// Validates a complete frame (length + CRC) and returns header plus payload view.
struct ParsedFrame {
    FrameHeader header;
    std::span<const std::byte> payload;
};
ParsedFrame parse_frame(std::span<const std::byte> frame);

/// Owned, validated frame (staging readers hand these out).
struct ParsedOwnedFrame {
    FrameHeader header;
    Bytes bytes; // the complete frame
    std::span<const std::byte> payload() const {
        return std::span<const std::byte>(bytes).subspan(kFrameHeaderSize, header.payload_len);
    }
};

/// Step payload framing (payload_kind = 0).
Bytes serialize_payload(const StepPayload& p);
StepPayload deserialize_payload(std::span<const std::byte> bytes);

} // namespace isf
