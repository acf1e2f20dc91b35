#pragma once

// Classical-channel message framing and transports. Wire format: 4-byte
// big-endian length (type byte + payload), 1 message-type byte, payload.
// Two bindings: an in-process queue pair and a TCP stream.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hdqkd {

enum class MessageType : std::uint8_t {
  BasesAnnouncement = 1,
  SiftAck = 2,
  ParityRequest = 3,
  ParityResponse = 4,
  ShuffleSeed = 5,
  PaSeed = 6,
  Abort = 7,
  QberEstimate = 8,
  KeyDigest = 9,
};

struct ClassicalMessage {
  MessageType type;
  std::vector<std::uint8_t> payload;
};

inline std::vector<std::uint8_t> encode_message(const ClassicalMessage& msg) {
  const std::uint32_t body_len = static_cast<std::uint32_t>(msg.payload.size() + 1);
  std::vector<std::uint8_t> frame;
  frame.reserve(4 + body_len);
  frame.push_back(static_cast<std::uint8_t>(body_len >> 24));
  frame.push_back(static_cast<std::uint8_t>(body_len >> 16));
  frame.push_back(static_cast<std::uint8_t>(body_len >> 8));
  frame.push_back(static_cast<std::uint8_t>(body_len));
  frame.push_back(static_cast<std::uint8_t>(msg.type));
  frame.insert(frame.end(), msg.payload.begin(), msg.payload.end());
  return frame;
}

inline ClassicalMessage decode_message(const std::vector<std::uint8_t>& frame) {
  if (frame.size() < 5) throw std::runtime_error("frame too short");
  const std::uint32_t body_len = (static_cast<std::uint32_t>(frame[0]) << 24) |
                                 (static_cast<std::uint32_t>(frame[1]) << 16) |
                                 (static_cast<std::uint32_t>(frame[2]) << 8) |
                                 static_cast<std::uint32_t>(frame[3]);
  if (frame.size() != 4 + static_cast<std::size_t>(body_len))
    throw std::runtime_error("frame length mismatch");
  ClassicalMessage msg;
  msg.type = static_cast<MessageType>(frame[4]);
  msg.payload.assign(frame.begin() + 5, frame.end());
  return msg;
}

// Payload serialization helpers (big-endian throughout).
struct PayloadWriter {
  std::vector<std::uint8_t> bytes;

  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u32(std::uint32_t v) {
    bytes.push_back(static_cast<std::uint8_t>(v >> 24));
    bytes.push_back(static_cast<std::uint8_t>(v >> 16));
    bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    bytes.push_back(static_cast<std::uint8_t>(v));
  }
  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v >> 32));
    u32(static_cast<std::uint32_t>(v));
  }
  void f64(double v) {
    std::uint64_t raw;
    std::memcpy(&raw, &v, sizeof raw);
    u64(raw);
  }
  void blob(const std::vector<std::uint8_t>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    bytes.insert(bytes.end(), v.begin(), v.end());
  }
};

struct PayloadReader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw std::runtime_error("payload truncated");
  }
  std::uint8_t u8() {
    need(1);
    return bytes[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = (static_cast<std::uint32_t>(bytes[pos]) << 24) |
                      (static_cast<std::uint32_t>(bytes[pos + 1]) << 16) |
                      (static_cast<std::uint32_t>(bytes[pos + 2]) << 8) |
                      static_cast<std::uint32_t>(bytes[pos + 3]);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    const std::uint64_t hi = u32();
    return (hi << 32) | u32();
  }
  double f64() {
    const std::uint64_t raw = u64();
    double v;
    std::memcpy(&v, &raw, sizeof v);
    return v;
  }
  std::vector<std::uint8_t> blob() {
    const std::uint32_t n = u32();
    need(n);
    std::vector<std::uint8_t> v(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    return v;
  }
  bool done() const { return pos == bytes.size(); }
};

// Ordered, reliable, bidirectional message transport.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const ClassicalMessage& msg) = 0;
  virtual ClassicalMessage recv() = 0;

  // Transcript counters for leakage audits.
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
};

namespace detail {

class MessageQueue {
 public:
  void push(ClassicalMessage msg) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(msg));
    }
    cv_.notify_one();
  }
  ClassicalMessage pop() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return !queue_.empty(); });
    ClassicalMessage msg = std::move(queue_.front());
    queue_.pop_front();
    return msg;
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<ClassicalMessage> queue_;
};

}  // namespace detail

class InProcTransport : public Transport {
 public:
  InProcTransport(std::shared_ptr<detail::MessageQueue> out,
                  std::shared_ptr<detail::MessageQueue> in)
      : out_(std::move(out)), in_(std::move(in)) {}

  void send(const ClassicalMessage& msg) override {
    ++messages_sent;
    bytes_sent += encode_message(msg).size();
    out_->push(msg);
  }
  ClassicalMessage recv() override { return in_->pop(); }

  static std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_pair() {
    auto a_to_b = std::make_shared<detail::MessageQueue>();
    auto b_to_a = std::make_shared<detail::MessageQueue>();
    return {std::make_unique<InProcTransport>(a_to_b, b_to_a),
            std::make_unique<InProcTransport>(b_to_a, a_to_b)};
  }

 private:
  std::shared_ptr<detail::MessageQueue> out_;
  std::shared_ptr<detail::MessageQueue> in_;
};

class TcpTransport : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void send(const ClassicalMessage& msg) override {
    const auto frame = encode_message(msg);
    write_all(frame.data(), frame.size());
    ++messages_sent;
    bytes_sent += frame.size();
  }

  ClassicalMessage recv() override {
    std::uint8_t header[4];
    read_all(header, 4);
    const std::uint32_t body_len = (static_cast<std::uint32_t>(header[0]) << 24) |
                                   (static_cast<std::uint32_t>(header[1]) << 16) |
                                   (static_cast<std::uint32_t>(header[2]) << 8) |
                                   static_cast<std::uint32_t>(header[3]);
    if (body_len == 0) throw std::runtime_error("empty frame body");
    std::vector<std::uint8_t> frame(4 + body_len);
    std::memcpy(frame.data(), header, 4);
    read_all(frame.data() + 4, body_len);
    return decode_message(frame);
  }

  static std::unique_ptr<Transport> connect(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      ::close(fd);
      throw std::runtime_error("bad host address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      ::close(fd);
      throw std::runtime_error("connect() to " + host + " failed");
    }
    return std::make_unique<TcpTransport>(fd);
  }

 private:
  void write_all(const std::uint8_t* data, std::size_t len) {
    while (len > 0) {
      const ssize_t n = ::write(fd_, data, len);
      if (n <= 0) throw std::runtime_error("transport write failed");
      data += n;
      len -= static_cast<std::size_t>(n);
    }
  }
  void read_all(std::uint8_t* data, std::size_t len) {
    while (len > 0) {
      const ssize_t n = ::read(fd_, data, len);
      if (n <= 0) throw std::runtime_error("transport closed mid-message");
      data += n;
      len -= static_cast<std::size_t>(n);
    }
  }

  int fd_ = -1;
};

// Listening socket bound to 127.0.0.1; port 0 picks a free port.
class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw std::runtime_error("socket() failed");
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(fd_, 1) != 0) {
      ::close(fd_);
      throw std::runtime_error("bind/listen failed");
    }
  }
  ~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
  }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
      throw std::runtime_error("getsockname failed");
    return ntohs(addr.sin_port);
  }

  std::unique_ptr<Transport> accept() {
    const int client = ::accept(fd_, nullptr, nullptr);
    if (client < 0) throw std::runtime_error("accept failed");
    return std::make_unique<TcpTransport>(client);
  }

 private:
  int fd_ = -1;
};

}  // namespace hdqkd
