#include "isf/staging/staging.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "isf/core/log.hpp"

namespace isf::staging {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_options(const Options& options) {
    if (options.capacity == 0)
        throw Error(ErrorCode::InvalidCapacity, "staging capacity must be >= 1");
}

void flip_payload_byte(Bytes& frame) {
    // Flip a byte inside the payload so the frame CRC no longer matches.
    std::size_t pos = frame.size() > kFrameHeaderSize + kFrameTrailerSize
                          ? kFrameHeaderSize + (frame.size() - kFrameHeaderSize - kFrameTrailerSize) / 2
                          : frame.size() / 2;
    frame[pos] ^= std::byte{0x01};
}

// ---------------------------------------------------------------------------
// InProcess backend: bounded frame queue.

struct Channel {
    std::mutex mu;
    std::condition_variable writable;
    std::condition_variable readable;
    std::deque<Bytes> queue;
    std::size_t capacity = 1;
    double watchdog_s = 30.0;
    bool writer_closed = false; // clean close()
    bool writer_alive = true;   // false without close => abnormal
    bool reader_alive = true;
};

} // namespace

// ---------------------------------------------------------------------------
// Writer/reader impl interface.

struct StageWriter::Impl {
    WriterStats stats;
    bool corrupt_next = false;

    virtual ~Impl() = default;
    virtual void deliver(Bytes frame, double& blocked_s) = 0;
    virtual void close() = 0;
};

struct StageReader::Impl {
    ReaderStats stats;

    virtual ~Impl() = default;
    // nullopt = clean end of stream.
    virtual std::optional<Bytes> next_frame() = 0;
};

namespace {

struct InProcessWriter final : StageWriter::Impl {
    std::shared_ptr<Channel> ch;

    explicit InProcessWriter(std::shared_ptr<Channel> c) : ch(std::move(c)) {}

    void deliver(Bytes frame, double& blocked_s) override {
        std::unique_lock lock(ch->mu);
        const auto wait_start = Clock::now();
        bool waited = false;
        while (ch->reader_alive && ch->queue.size() >= ch->capacity) {
            waited = true;
            auto status = ch->writable.wait_for(
                lock, std::chrono::duration<double>(ch->watchdog_s));
            if (status == std::cv_status::timeout &&
                ch->reader_alive && ch->queue.size() >= ch->capacity) {
                ++stats.watchdog_trips;
                log::warn("stage writer blocked for " +
                          std::to_string(seconds_since(wait_start)) + " s (backpressure)");
            }
        }
        if (waited) blocked_s = seconds_since(wait_start);
        if (!ch->reader_alive)
            throw Error(ErrorCode::ReaderGone, "reader side of the staging pair is gone");
        ch->queue.push_back(std::move(frame));
        ch->readable.notify_one();
    }

    void close() override {
        std::lock_guard lock(ch->mu);
        ch->writer_closed = true;
        ch->readable.notify_all();
    }

    ~InProcessWriter() override {
        std::lock_guard lock(ch->mu);
        ch->writer_alive = false;
        ch->readable.notify_all();
    }
};

struct InProcessReader final : StageReader::Impl {
    std::shared_ptr<Channel> ch;

    explicit InProcessReader(std::shared_ptr<Channel> c) : ch(std::move(c)) {}

    std::optional<Bytes> next_frame() override {
        std::unique_lock lock(ch->mu);
        ch->readable.wait(lock, [&] {
            return !ch->queue.empty() || ch->writer_closed || !ch->writer_alive;
        });
        if (!ch->queue.empty()) {
            Bytes frame = std::move(ch->queue.front());
            ch->queue.pop_front();
            ch->writable.notify_one();
            return frame;
        }
        if (ch->writer_closed) return std::nullopt; // drained + clean close
        throw Error(ErrorCode::WriterGone, "writer terminated without closing the stream");
    }

    ~InProcessReader() override {
        std::lock_guard lock(ch->mu);
        ch->reader_alive = false;
        ch->writable.notify_all();
    }
};

// ---------------------------------------------------------------------------
// LocalSocket backend: unix stream socket, frames forward, ack bytes back.

constexpr char kHelloMagic[4] = {'I', 'S', 'F', 'S'};
constexpr char kEosMagic[4] = {'I', 'S', 'F', 'E'};

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd(f) {}
    Fd(Fd&& other) noexcept : fd(other.fd) { other.fd = -1; }
    Fd& operator=(Fd&& other) noexcept {
        if (this != &other) {
            reset();
            fd = other.fd;
            other.fd = -1;
        }
        return *this;
    }
    ~Fd() { reset(); }
    void reset() {
        if (fd >= 0) ::close(fd);
        fd = -1;
    }
    explicit operator bool() const { return fd >= 0; }
};

sockaddr_un make_addr(const std::string& endpoint) {
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (endpoint.size() >= sizeof(addr.sun_path))
        throw Error(ErrorCode::ConnectFailed, "endpoint path too long: " + endpoint);
    std::strncpy(addr.sun_path, endpoint.c_str(), sizeof(addr.sun_path) - 1);
    return addr;
}

void send_all(int fd, const void* data, std::size_t len, ErrorCode gone_code) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    while (len > 0) {
        ssize_t n = ::send(fd, p, len, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == EPIPE || errno == ECONNRESET)
                throw Error(gone_code, "peer closed the staging socket");
            throw Error(ErrorCode::StagingError, std::string("send: ") + std::strerror(errno));
        }
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

// Returns bytes read; short count means EOF hit.
std::size_t recv_upto_eof(int fd, void* data, std::size_t len) {
    auto* p = static_cast<std::uint8_t*>(data);
    std::size_t got = 0;
    while (got < len) {
        ssize_t n = ::recv(fd, p + got, len - got, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == ECONNRESET) return got;
            throw Error(ErrorCode::StagingError, std::string("recv: ") + std::strerror(errno));
        }
        if (n == 0) return got;
        got += static_cast<std::size_t>(n);
    }
    return got;
}

struct Hello {
    char magic[4];
    std::uint16_t version;
    std::uint16_t pad;
    std::uint32_t capacity;
};

struct SocketWriter final : StageWriter::Impl {
    Fd fd;
    std::size_t capacity;
    double watchdog_s;
    std::size_t in_flight = 0;

    SocketWriter(Fd f, const Options& options)
        : fd(std::move(f)), capacity(options.capacity), watchdog_s(options.watchdog_s) {}

    // Consume whatever acks are already buffered; never blocks.
    void drain_acks() {
        while (true) {
            std::uint8_t acks[256];
            ssize_t n = ::recv(fd.fd, acks, sizeof(acks), MSG_DONTWAIT);
            if (n > 0) {
                in_flight -= std::min<std::size_t>(in_flight, static_cast<std::size_t>(n));
                continue;
            }
            if (n == 0) throw Error(ErrorCode::ReaderGone, "reader closed the staging socket");
            if (errno == EAGAIN || errno == EWOULDBLOCK) return;
            if (errno == EINTR) continue;
            if (errno == ECONNRESET)
                throw Error(ErrorCode::ReaderGone, "reader connection reset");
            throw Error(ErrorCode::StagingError, std::string("recv acks: ") + std::strerror(errno));
        }
    }

    void wait_for_credit(double& blocked_s) {
        if (in_flight < capacity) return;
        const auto wait_start = Clock::now();
        while (in_flight >= capacity) {
            pollfd pfd{fd.fd, POLLIN, 0};
            int r = ::poll(&pfd, 1, static_cast<int>(watchdog_s * 1000));
            if (r < 0) {
                if (errno == EINTR) continue;
                throw Error(ErrorCode::StagingError, std::string("poll: ") + std::strerror(errno));
            }
            if (r == 0) {
                ++stats.watchdog_trips;
                log::warn("stage writer blocked for " +
                          std::to_string(seconds_since(wait_start)) + " s (backpressure)");
                continue;
            }
            drain_acks();
        }
        blocked_s += seconds_since(wait_start);
    }

    void deliver(Bytes frame, double& blocked_s) override {
        drain_acks();
        wait_for_credit(blocked_s);
        send_all(fd.fd, frame.data(), frame.size(), ErrorCode::ReaderGone);
        ++in_flight;
    }

    void close() override {
        if (!fd) return;
        try {
            send_all(fd.fd, kEosMagic, sizeof(kEosMagic), ErrorCode::ReaderGone);
        } catch (const Error&) {
            // reader already gone; close is best-effort
        }
        ::shutdown(fd.fd, SHUT_WR);
    }
};

struct SocketReader final : StageReader::Impl {
    Fd fd;

    explicit SocketReader(Fd f) : fd(std::move(f)) {}

    std::optional<Bytes> next_frame() override {
        std::uint8_t head[4];
        std::size_t got = recv_upto_eof(fd.fd, head, sizeof(head));
        if (got == 0)
            throw Error(ErrorCode::WriterGone, "writer terminated without end-of-stream marker");
        if (got < sizeof(head))
            throw Error(ErrorCode::WriterGone, "stream ended mid-marker");
        if (std::memcmp(head, kEosMagic, 4) == 0) return std::nullopt;

        Bytes frame(kFrameHeaderSize);
        std::memcpy(frame.data(), head, sizeof(head));
        if (recv_upto_eof(fd.fd, frame.data() + 4, kFrameHeaderSize - 4) != kFrameHeaderSize - 4)
            throw Error(ErrorCode::WriterGone, "stream ended mid-header");
        auto header = parse_frame_header(frame); // validates magic/version
        const std::size_t rest = header.payload_len + kFrameTrailerSize;
        frame.resize(kFrameHeaderSize + rest);
        if (recv_upto_eof(fd.fd, frame.data() + kFrameHeaderSize, rest) != rest)
            throw Error(ErrorCode::WriterGone, "stream ended mid-frame");

        std::uint8_t ack = 1;
        try {
            send_all(fd.fd, &ack, 1, ErrorCode::StagingError);
        } catch (const Error&) {
            // writer may have closed already; the frame is still valid
        }
        return frame;
    }
};

Fd listen_socket(const std::string& endpoint) {
    Fd fd(::socket(AF_UNIX, SOCK_STREAM, 0));
    if (!fd) throw Error(ErrorCode::ConnectFailed, std::string("socket: ") + std::strerror(errno));
    auto addr = make_addr(endpoint);
    ::unlink(endpoint.c_str());
    if (::bind(fd.fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw Error(ErrorCode::ConnectFailed,
                    "bind " + endpoint + ": " + std::strerror(errno));
    if (::listen(fd.fd, 1) != 0)
        throw Error(ErrorCode::ConnectFailed, std::string("listen: ") + std::strerror(errno));
    return fd;
}

Fd connect_socket(const std::string& endpoint, double timeout_s) {
    const auto deadline = Clock::now() + std::chrono::duration<double>(timeout_s);
    while (true) {
        Fd fd(::socket(AF_UNIX, SOCK_STREAM, 0));
        if (!fd) throw Error(ErrorCode::ConnectFailed, std::string("socket: ") + std::strerror(errno));
        auto addr = make_addr(endpoint);
        if (::connect(fd.fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) return fd;
        if (Clock::now() >= deadline)
            throw Error(ErrorCode::ConnectFailed,
                        "connect " + endpoint + ": " + std::strerror(errno));
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
}

void writer_handshake(int fd, const Options& options) {
    Hello hello{};
    std::memcpy(hello.magic, kHelloMagic, 4);
    hello.version = options.protocol_version;
    hello.capacity = static_cast<std::uint32_t>(options.capacity);
    send_all(fd, &hello, sizeof(hello), ErrorCode::ConnectFailed);
    Hello reply{};
    if (recv_upto_eof(fd, &reply, sizeof(reply)) != sizeof(reply))
        throw Error(ErrorCode::ConnectFailed, "handshake reply truncated");
    if (std::memcmp(reply.magic, kHelloMagic, 4) != 0)
        throw Error(ErrorCode::ConnectFailed, "bad handshake reply magic");
    if (reply.version != options.protocol_version)
        throw Error(ErrorCode::VersionMismatch,
                    "reader protocol v" + std::to_string(reply.version) + ", writer v" +
                        std::to_string(options.protocol_version));
}

// Returns the capacity announced by the writer.
std::size_t reader_handshake(int fd, const Options& options) {
    Hello hello{};
    if (recv_upto_eof(fd, &hello, sizeof(hello)) != sizeof(hello))
        throw Error(ErrorCode::ConnectFailed, "handshake hello truncated");
    if (std::memcmp(hello.magic, kHelloMagic, 4) != 0)
        throw Error(ErrorCode::ConnectFailed, "bad handshake magic");
    Hello reply = hello;
    std::memcpy(reply.magic, kHelloMagic, 4);
    reply.version = options.protocol_version;
    send_all(fd, &reply, sizeof(reply), ErrorCode::ConnectFailed);
    if (hello.version != options.protocol_version)
        throw Error(ErrorCode::VersionMismatch,
                    "writer protocol v" + std::to_string(hello.version) + ", reader v" +
                        std::to_string(options.protocol_version));
    return hello.capacity;
}

std::string default_endpoint() {
    static std::atomic<unsigned> counter{0};
    return "/tmp/isf-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".sock";
}

} // namespace

// ---------------------------------------------------------------------------
// Public surface.

StageWriter::StageWriter(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
StageWriter::~StageWriter() = default;

double StageWriter::write_step(const StepPayload& payload) {
    return write_frame(serialize_payload(payload));
}

double StageWriter::write_frame(Bytes frame) {
    if (!impl_) throw Error(ErrorCode::StagingError, "writer not open");
    if (impl_->corrupt_next) {
        flip_payload_byte(frame);
        impl_->corrupt_next = false;
    }
    const auto start = Clock::now();
    const std::size_t bytes = frame.size();
    double blocked_s = 0.0;
    impl_->deliver(std::move(frame), blocked_s);
    impl_->stats.blocked_s += blocked_s;
    ++impl_->stats.steps_written;
    impl_->stats.bytes_written += bytes;
    return seconds_since(start);
}

void StageWriter::close() {
    if (impl_) impl_->close();
}

const WriterStats& StageWriter::stats() const {
    if (!impl_) throw Error(ErrorCode::StagingError, "writer not open");
    return impl_->stats;
}

void StageWriter::corrupt_next_frame() {
    if (!impl_) throw Error(ErrorCode::StagingError, "writer not open");
    impl_->corrupt_next = true;
}

StageReader::StageReader(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
StageReader::~StageReader() = default;

std::optional<StepPayload> StageReader::read_step() {
    auto frame = read_frame();
    if (!frame) return std::nullopt;
    return deserialize_payload(frame->bytes);
}

std::optional<ParsedOwnedFrame> StageReader::read_frame() {
    if (!impl_) throw Error(ErrorCode::StagingError, "reader not open");
    auto bytes = impl_->next_frame();
    if (!bytes) return std::nullopt;
    auto parsed = parse_frame(*bytes); // length + CRC validation
    ++impl_->stats.steps_read;
    impl_->stats.bytes_read += bytes->size();
    return ParsedOwnedFrame{parsed.header, std::move(*bytes)};
}

const ReaderStats& StageReader::stats() const {
    if (!impl_) throw Error(ErrorCode::StagingError, "reader not open");
    return impl_->stats;
}

std::pair<StageWriter, StageReader> open_pair(Backend backend, const Options& options) {
    validate_options(options);
    if (backend == Backend::InProcess) {
        auto ch = std::make_shared<Channel>();
        ch->capacity = options.capacity;
        ch->watchdog_s = options.watchdog_s;
        return {StageWriter(std::make_unique<InProcessWriter>(ch)),
                StageReader(std::make_unique<InProcessReader>(ch))};
    }
    const std::string endpoint = options.endpoint.empty() ? default_endpoint() : options.endpoint;
    Fd listener = listen_socket(endpoint);
    Fd wfd = connect_socket(endpoint, 5.0);
    Fd rfd(::accept(listener.fd, nullptr, nullptr));
    if (!rfd) throw Error(ErrorCode::ConnectFailed, std::string("accept: ") + std::strerror(errno));
    ::unlink(endpoint.c_str());
    writer_handshake(wfd.fd, options);
    reader_handshake(rfd.fd, options);
    return {StageWriter(std::make_unique<SocketWriter>(std::move(wfd), options)),
            StageReader(std::make_unique<SocketReader>(std::move(rfd)))};
}

StageReader listen_reader(const std::string& endpoint, const Options& options) {
    validate_options(options);
    Fd listener = listen_socket(endpoint);
    Fd rfd(::accept(listener.fd, nullptr, nullptr));
    if (!rfd) throw Error(ErrorCode::ConnectFailed, std::string("accept: ") + std::strerror(errno));
    ::unlink(endpoint.c_str());
    reader_handshake(rfd.fd, options);
    return StageReader(std::make_unique<SocketReader>(std::move(rfd)));
}

StageWriter connect_writer(const std::string& endpoint, const Options& options) {
    validate_options(options);
    Fd wfd = connect_socket(endpoint, 5.0);
    writer_handshake(wfd.fd, options);
    return StageWriter(std::make_unique<SocketWriter>(std::move(wfd), options));
}

} // namespace isf::staging
