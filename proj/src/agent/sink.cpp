#include "bcsmile/agent/sink.hpp"

#include <fstream>
#include <thread>

#include "bcsmile/error.hpp"
#include "httplib.h"

namespace bcsmile::agent {
namespace {

void append_line(const std::filesystem::path& path, const std::string& line) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::app);
  if (!f) throw Error("cannot open " + path.string() + " for appending");
  f << line << '\n';
  if (!f) throw Error("failed writing " + path.string());
}

}  // namespace

Acknowledgment FileSink::emit(const SmileCommand& cmd) {
  append_line(path_, to_json(cmd));
  return Acknowledgment{true, 0, 1, path_.string()};
}

EndpointSink::EndpointSink(EndpointOptions options) : options_(std::move(options)) {
  const std::string& url = options_.url;
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) throw Error("endpoint: only http:// URLs are supported, got '" + url + "'");
  const auto slash = url.find('/', scheme.size());
  scheme_host_port_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (scheme_host_port_.size() == scheme.size()) throw Error("endpoint: missing host in '" + url + "'");
  if (options_.retries < 0) throw Error("endpoint: retries must be non-negative");
  if (options_.spool.empty()) options_.spool = "agent_spool.jsonl";
}

Acknowledgment EndpointSink::emit(const SmileCommand& cmd) {
  std::lock_guard lock(mutex_);
  const std::string body = to_json(cmd);
  Acknowledgment ack;
  ack.target = options_.url;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    ++ack.attempts;
    auto res = client.Post(path_, body, "application/json");
    if (res) {
      ack.status = res->status;
      if (res->status >= 200 && res->status < 300) {
        ack.delivered = true;
        return ack;
      }
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      ack.status = 0;
      last_error = httplib::to_string(res.error());
    }
  }
  append_line(options_.spool, body);
  throw Error("endpoint " + options_.url + ": delivery failed after " + std::to_string(ack.attempts) +
              " attempts (" + last_error + "); command spooled to " + options_.spool.string());
}

struct StubServer::Impl {
  httplib::Server server;
  std::thread thread;
  mutable std::mutex mutex;
  std::vector<std::string> bodies;
  int status = 200;
};

StubServer::StubServer() : impl_(std::make_unique<Impl>()) {}

StubServer::~StubServer() { stop(); }

void StubServer::start(int status) {
  if (impl_->thread.joinable()) throw Error("stub server already running");
  impl_->status = status;
  impl_->server.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(impl_->mutex);
      impl_->bodies.push_back(req.body);
    }
    res.status = impl_->status;
    res.set_content(R"({"ok":true})", "application/json");
  });
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw Error("stub server: cannot bind a port");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void StubServer::stop() {
  if (!impl_ || !impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

std::string StubServer::url(const std::string& path) const {
  return "http://127.0.0.1:" + std::to_string(port_) + path;
}

std::vector<std::string> StubServer::received() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->bodies;
}

}  // namespace bcsmile::agent
