#pragma once

// Little-endian primitive encoding used by every wire format in the project.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "isf/core/errors.hpp"

namespace isf {

using Bytes = std::vector<std::byte>;

inline void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(std::byte(v & 0xff));
    out.push_back(std::byte((v >> 8) & 0xff));
}

inline void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::byte((v >> (8 * i)) & 0xff));
}

inline void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::byte((v >> (8 * i)) & 0xff));
}

inline void put_f64(Bytes& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

/// Sequential reader over a byte span; throws LengthMismatch on underrun.
class ByteReader {
  public:
    explicit ByteReader(std::span<const std::byte> data) : data_(data) {}

    std::uint16_t u16() { return static_cast<std::uint16_t>(raw(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
    std::uint64_t u64() { return raw(8); }
    double f64() { return std::bit_cast<double>(raw(8)); }

    std::span<const std::byte> take(std::size_t n) {
        require(n);
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }

  private:
    std::uint64_t raw(std::size_t n) {
        require(n);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(data_[pos_ + i])) << (8 * i);
        pos_ += n;
        return v;
    }

    void require(std::size_t n) const {
        if (pos_ + n > data_.size())
            throw Error(ErrorCode::LengthMismatch, "buffer underrun at offset " + std::to_string(pos_));
    }

    std::span<const std::byte> data_;
    std::size_t pos_ = 0;
};

inline std::span<const std::byte> as_bytes_span(const std::vector<double>& v) {
    return {reinterpret_cast<const std::byte*>(v.data()), v.size() * sizeof(double)};
}

} // namespace isf
