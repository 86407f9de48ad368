#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bcsmile/agent/adapter.hpp"

namespace bcsmile::agent {

struct Acknowledgment {
  bool delivered = false;
  int status = 0;    // HTTP status of the last attempt, 0 for file sinks / no response
  int attempts = 0;
  std::string target;
};

class CommandSink {
 public:
  virtual ~CommandSink() = default;
  virtual Acknowledgment emit(const SmileCommand& cmd) = 0;
};

// Appends one JSON object per line.
class FileSink final : public CommandSink {
 public:
  explicit FileSink(std::filesystem::path path) : path_(std::move(path)) {}
  Acknowledgment emit(const SmileCommand& cmd) override;

 private:
  std::filesystem::path path_;
};

struct EndpointOptions {
  std::string url;  // http://host:port/path
  std::chrono::milliseconds timeout{2000};
  int retries = 1;
  std::filesystem::path spool;  // commands that could not be delivered
};

// Environment variable holding the default endpoint URL.
inline constexpr const char* kEndpointEnv = "AGENT_ENDPOINT";

// POSTs the command JSON; one command in flight at a time. After the final
// failed attempt the command is appended to the spool file and Error is thrown.
class EndpointSink final : public CommandSink {
 public:
  explicit EndpointSink(EndpointOptions options);
  Acknowledgment emit(const SmileCommand& cmd) override;

 private:
  EndpointOptions options_;
  std::string scheme_host_port_;
  std::string path_;
  std::mutex mutex_;
};

// Local HTTP server standing in for the agent's remote API; records every
// request body it receives.
class StubServer {
 public:
  StubServer();
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  // Binds 127.0.0.1 on a free port and serves in a background thread.
  void start(int status = 200);
  void stop();
  int port() const { return port_; }
  std::string url(const std::string& path = "/command") const;
  std::vector<std::string> received() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace bcsmile::agent
