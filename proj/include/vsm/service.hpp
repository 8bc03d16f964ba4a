#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "vsm/error.hpp"
#include "vsm/similarity.hpp"
#include "vsm/store.hpp"

namespace vsm {

struct ApiError {
  int status = 500;
  std::string_view code;
};

/// The single (status, code) pair each engine error maps to.
ApiError api_error(ErrorCode code) noexcept;

struct ServiceConfig {
  CosineMode default_cosine_mode = CosineMode::consistent;
  /// Served at "/" when set (the built web client).
  std::optional<std::filesystem::path> static_dir;
};

/// JSON HTTP API over a Repository:
///
///   POST /api/documents                  upload (JSON or multipart)
///   GET  /api/search                     q, measure, class*, threshold, limit, cosine_mode
///   GET  /api/runs/{run_id}              run, judgments, metrics
///   POST /api/runs/{run_id}/judgments    {doc_id, relevant}
///   GET  /api/collection                 class, offset, limit
///   GET  /api/classifications
class Service {
 public:
  Service(Repository& repo, ServiceConfig config = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds an ephemeral port and returns it, or -1.
  int bind_to_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vsm
