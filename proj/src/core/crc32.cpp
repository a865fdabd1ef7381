#include "isf/core/crc32.hpp"

#include <zlib.h>

namespace isf {

std::uint32_t crc32_ieee_update(std::uint32_t crc, std::span<const std::byte> data) {
    uLong c = crc;
    std::size_t off = 0;
    while (off < data.size()) {
        auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - off, 1u << 30));
        c = ::crc32(c, reinterpret_cast<const Bytef*>(data.data() + off), chunk);
        off += chunk;
    }
    return static_cast<std::uint32_t>(c);
}

std::uint32_t crc32_ieee(std::span<const std::byte> data) {
    return crc32_ieee_update(0, data);
}

} // namespace isf
