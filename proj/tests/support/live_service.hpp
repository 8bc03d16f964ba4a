#pragma once

#include <httplib.h>
#include <json.hpp>

#include <memory>
#include <thread>

#include "support/golden.hpp"
#include "support/tempdir.hpp"
#include "vsm/service.hpp"
#include "vsm/store.hpp"

/// Repository + service on an ephemeral localhost port for the lifetime of
/// the object.
class LiveService {
 public:
  explicit LiveService(vsm::RepositoryOptions options = {}, vsm::ServiceConfig config = {})
      : repo_(std::make_unique<vsm::Repository>(dir_.path(), std::move(options))),
        service_(std::make_unique<vsm::Service>(*repo_, std::move(config))) {
    port_ = service_->bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("cannot bind test port");
    thread_ = std::thread([this] { service_->listen_after_bind(); });
    service_->wait_until_ready();
  }
  ~LiveService() {
    service_->stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(5, 0);
    return c;
  }
  vsm::Repository& repo() { return *repo_; }
  const TempDir& dir() const { return dir_; }
  int port() const { return port_; }

  nlohmann::json upload(const std::string& name, const std::string& cls, const std::string& text) {
    auto res = client().Post("/api/documents",
                             nlohmann::json{{"name", name}, {"classification", cls}, {"text", text}}.dump(),
                             "application/json");
    if (!res || res->status != 201) throw std::runtime_error("upload failed");
    return nlohmann::json::parse(res->body);
  }

  void upload_golden() {
    for (const auto& d : golden::kDocs) upload(d.name, golden::kClass, d.text);
  }

 private:
  TempDir dir_;
  std::unique_ptr<vsm::Repository> repo_;
  std::unique_ptr<vsm::Service> service_;
  std::thread thread_;
  int port_ = 0;
};
