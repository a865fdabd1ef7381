#pragma once

// Writer/reader data staging between producer and in-situ tasks.
//
// Both backends move complete core frames, one frame per step, in write
// order. A write returns only once the payload is fully copied out of the
// caller's buffer, so the caller may mutate its field immediately afterwards.
// With `capacity` frames in flight the writer blocks until the reader
// consumes one (backpressure). The LocalSocket backend runs the same
// protocol between OS processes over a unix stream socket, with one ack
// byte per consumed frame flowing back as credit.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "isf/core/bytes.hpp"
#include "isf/core/frame.hpp"
#include "isf/core/types.hpp"

namespace isf::staging {

enum class Backend { InProcess, LocalSocket };

inline constexpr std::uint16_t kProtocolVersion = 1;

struct Options {
    std::size_t capacity = 1;      // queued steps before the writer blocks
    std::string endpoint;          // LocalSocket path; autogenerated when empty
    double watchdog_s = 30.0;      // blocked-writer diagnostic period
    std::uint16_t protocol_version = kProtocolVersion; // test hook
};

struct WriterStats {
    std::uint64_t steps_written = 0;
    std::uint64_t bytes_written = 0;
    double blocked_s = 0.0;        // cumulative backpressure wait
    std::uint64_t watchdog_trips = 0;
};

struct ReaderStats {
    std::uint64_t steps_read = 0;
    std::uint64_t bytes_read = 0;
};

class StageWriter {
  public:
    StageWriter() = default;
    StageWriter(StageWriter&&) noexcept = default;
    StageWriter& operator=(StageWriter&&) noexcept = default;
    ~StageWriter();

    /// Serializes and delivers one step; returns the handoff duration in
    /// seconds (blocking + copy). Throws ReaderGone / SerializationFailed.
    double write_step(const StepPayload& payload);

    /// Delivers a pre-built frame (used for compressed blocks in hybrid mode).
    double write_frame(Bytes frame);

    /// Clean end-of-stream; idempotent. The reader drains, then sees EndOfStream.
    void close();

    const WriterStats& stats() const;

    /// Fault injection: flip one payload byte of the next frame.
    void corrupt_next_frame();

    struct Impl;
    explicit StageWriter(std::unique_ptr<Impl> impl);

  private:
    std::unique_ptr<Impl> impl_;
};

class StageReader {
  public:
    StageReader() = default;
    StageReader(StageReader&&) noexcept = default;
    StageReader& operator=(StageReader&&) noexcept = default;
    ~StageReader();

    /// Blocking; next payload in write order, or nullopt after writer close +
    /// drain. Throws ChecksumMismatch on corrupted frames, WriterGone on
    /// abnormal writer termination.
    std::optional<StepPayload> read_step();

    /// Raw variant: the next complete validated frame.
    std::optional<ParsedOwnedFrame> read_frame();

    const ReaderStats& stats() const;

    struct Impl;
    explicit StageReader(std::unique_ptr<Impl> impl);

  private:
    std::unique_ptr<Impl> impl_;
};

/// A connected pair in one process. For LocalSocket the pair still runs the
/// full wire protocol through the kernel.
std::pair<StageWriter, StageReader> open_pair(Backend backend, const Options& options = {});

/// Cross-process LocalSocket endpoints. The reader side binds and accepts;
/// the writer side retries the connect until the listener appears (default
/// 5 s), so start order does not matter.
StageReader listen_reader(const std::string& endpoint, const Options& options = {});
StageWriter connect_writer(const std::string& endpoint, const Options& options = {});

} // namespace isf::staging
