#include "isf/core/frame.hpp"

#include <cstring>

#include "isf/core/crc32.hpp"

namespace isf {

Bytes build_frame(const FrameHeader& header, std::span<const std::byte> payload) {
    Bytes out;
    out.reserve(kFrameHeaderSize + payload.size() + kFrameTrailerSize);
    for (auto m : kFrameMagic) out.push_back(std::byte(m));
    put_u16(out, kFrameVersion);
    put_u16(out, static_cast<std::uint16_t>(header.kind));
    put_u64(out, header.step_index);
    put_f64(out, header.sim_time);
    put_u32(out, header.elements_per_axis);
    put_u32(out, header.points_per_element_axis);
    put_u32(out, header.components);
    put_u32(out, 0); // reserved
    put_u64(out, payload.size());
    out.insert(out.end(), payload.begin(), payload.end());
    put_u32(out, crc32_ieee({out.data(), out.size()}));
    return out;
}

FrameHeader parse_frame_header(std::span<const std::byte> header_bytes) {
    if (header_bytes.size() < kFrameHeaderSize)
        throw Error(ErrorCode::LengthMismatch,
                    "frame header needs " + std::to_string(kFrameHeaderSize) + " bytes, got " +
                        std::to_string(header_bytes.size()));
    ByteReader r(header_bytes);
    auto magic = r.take(4);
    for (int i = 0; i < 4; ++i)
        if (std::to_integer<std::uint8_t>(magic[i]) != kFrameMagic[i])
            throw Error(ErrorCode::BadMagic, "magic mismatch at byte " + std::to_string(i));
    FrameHeader h;
    auto version = r.u16();
    if (version != kFrameVersion)
        throw Error(ErrorCode::UnsupportedVersion,
                    "frame version " + std::to_string(version) + ", expected " +
                        std::to_string(kFrameVersion));
    auto kind = r.u16();
    if (kind > 1)
        throw Error(ErrorCode::UnsupportedVersion, "unknown payload_kind " + std::to_string(kind));
    h.kind = static_cast<PayloadKind>(kind);
    h.step_index = r.u64();
    h.sim_time = r.f64();
    h.elements_per_axis = r.u32();
    h.points_per_element_axis = r.u32();
    h.components = r.u32();
    r.u32(); // reserved
    h.payload_len = r.u64();
    return h;
}

ParsedFrame parse_frame(std::span<const std::byte> frame) {
    auto header = parse_frame_header(frame);
    const std::size_t expected = kFrameHeaderSize + header.payload_len + kFrameTrailerSize;
    if (frame.size() != expected)
        throw Error(ErrorCode::LengthMismatch,
                    "frame is " + std::to_string(frame.size()) + " bytes, payload_len implies " +
                        std::to_string(expected));
    const std::size_t body = kFrameHeaderSize + header.payload_len;
    ByteReader tail(frame.subspan(body));
    const std::uint32_t stored = tail.u32();
    const std::uint32_t actual = crc32_ieee(frame.first(body));
    if (stored != actual)
        throw Error(ErrorCode::ChecksumMismatch, "frame crc32 mismatch");
    return ParsedFrame{header, frame.subspan(kFrameHeaderSize, header.payload_len)};
}

Bytes serialize_payload(const StepPayload& p) {
    try {
        p.field.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::SerializationFailed, e.what());
    }
    FrameHeader h;
    h.kind = PayloadKind::FieldSnapshot;
    h.step_index = p.step_index;
    h.sim_time = p.sim_time;
    h.elements_per_axis = p.field.elements_per_axis;
    h.points_per_element_axis = p.field.points_per_element_axis;
    h.components = p.field.components;
    return build_frame(h, as_bytes_span(p.field.values));
}

StepPayload deserialize_payload(std::span<const std::byte> bytes) {
    auto [header, payload] = parse_frame(bytes);
    if (header.kind != PayloadKind::FieldSnapshot)
        throw Error(ErrorCode::UnsupportedVersion, "expected payload_kind 0 (field snapshot)");
    Field f;
    f.elements_per_axis = header.elements_per_axis;
    f.points_per_element_axis = header.points_per_element_axis;
    f.components = header.components;
    const std::uint64_t expected_values = f.value_count();
    if (payload.size() != expected_values * sizeof(double))
        throw Error(ErrorCode::LengthMismatch,
                    "payload is " + std::to_string(payload.size()) + " bytes, shape implies " +
                        std::to_string(expected_values * sizeof(double)));
    f.values.resize(expected_values);
    std::memcpy(f.values.data(), payload.data(), payload.size());
    f.validate();

    StepPayload p;
    p.step_index = header.step_index;
    p.sim_time = header.sim_time;
    p.field = std::move(f);
    p.checksum = crc32_ieee(payload);
    return p;
}

} // namespace isf
