#include "vsm/service.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>

#include "vsm/serialize.hpp"

namespace vsm {

using nlohmann::json;

ApiError api_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::malformed_request:
    case ErrorCode::bad_measure:
    case ErrorCode::bad_parameter:
    case ErrorCode::empty_qrels:
      return {400, to_string(code)};
    case ErrorCode::unknown_document:
    case ErrorCode::unknown_run:
      return {404, to_string(code)};
    case ErrorCode::empty_corpus:
      return {409, to_string(code)};
    case ErrorCode::unknown_classification:
    case ErrorCode::doc_not_in_run:
    case ErrorCode::zero_total_relevant:
    case ErrorCode::inconsistent_counts:
    case ErrorCode::integrity:
    case ErrorCode::unresolvable_document:
      return {422, to_string(code)};
    case ErrorCode::locked:
      return {503, to_string(code)};
    case ErrorCode::io:
    case ErrorCode::format:
    case ErrorCode::version_mismatch:
      return {500, to_string(code)};
  }
  return {500, "internal"};
}

namespace {

Error malformed(const std::string& what) { return Error(ErrorCode::malformed_request, what); }

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

template <typename Int>
Int parse_unsigned(const std::string& text, const char* what) {
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::bad_parameter, std::string(what) + " must be a non-negative integer");
  }
  return value;
}

double parse_threshold(const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value) || value < 0.0) {
    throw Error(ErrorCode::bad_parameter, "threshold must be a finite number >= 0");
  }
  return value;
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw malformed(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

RunId run_id_from_path(const httplib::Request& req) {
  return RunId{parse_unsigned<std::uint64_t>(req.matches[1].str(), "run id")};
}

}  // namespace

struct Service::Impl {
  Repository& repo;
  ServiceConfig config;
  httplib::Server server;

  Impl(Repository& r, ServiceConfig c) : repo(r), config(std::move(c)) {
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;
    auto guarded = [](Handler h) {
      return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
        try {
          h(req, res);
        } catch (const Error& e) {
          const auto api = api_error(e.code());
          send_error(res, api.status, api.code, e.what());
        } catch (const json::exception& e) {
          send_error(res, 400, to_string(ErrorCode::malformed_request), e.what());
        } catch (const std::exception& e) {
          send_error(res, 500, "internal", e.what());
        }
      };
    };

    server.Post("/api/documents", guarded([this](const auto& req, auto& res) { upload(req, res); }));
    server.Get("/api/search", guarded([this](const auto& req, auto& res) { search(req, res); }));
    server.Get(R"(/api/runs/(\d+))",
               guarded([this](const auto& req, auto& res) { get_run(req, res); }));
    server.Post(R"(/api/runs/(\d+)/judgments)",
                guarded([this](const auto& req, auto& res) { judge(req, res); }));
    server.Get("/api/collection",
               guarded([this](const auto& req, auto& res) { collection(req, res); }));
    server.Get("/api/classifications",
               guarded([this](const auto& req, auto& res) { classifications(req, res); }));

    if (config.static_dir) server.set_mount_point("/", config.static_dir->string());
  }

  void upload(const httplib::Request& req, httplib::Response& res) {
    NewDocument doc;
    if (req.is_multipart_form_data()) {
      auto field = [&](const char* key) -> std::optional<httplib::MultipartFormData> {
        if (!req.has_file(key)) return std::nullopt;
        return req.get_file_value(key);
      };
      auto file = field("file");
      auto text = field("text");
      if (!file && !text) throw malformed("multipart upload needs a 'file' or 'text' part");
      doc.text = file ? file->content : text->content;
      if (auto name = field("name")) {
        doc.name = name->content;
      } else if (file && !file->filename.empty()) {
        doc.name = std::filesystem::path(file->filename).stem().string();
      }
      if (auto cls = field("classification")) doc.classification = cls->content;
    } else {
      const auto body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) throw malformed("body must be a JSON object");
      doc.name = required_string(body, "name");
      doc.classification = required_string(body, "classification");
      doc.text = required_string(body, "text");
    }
    if (doc.name.empty()) throw malformed("document name is required");
    if (doc.classification.empty()) throw malformed("classification is required");
    if (!is_valid_utf8(doc.text) || !is_valid_utf8(doc.name) ||
        !is_valid_utf8(doc.classification)) {
      throw malformed("upload must be UTF-8");
    }
    const auto added = repo.add_document(std::move(doc));
    send_json(res, 201,
              {{"doc_id", added.id.value}, {"term_count", added.term_count}, {"empty", added.empty}});
  }

  void search(const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("q")) throw malformed("missing query parameter 'q'");
    SearchRequest request;
    request.query_text = req.get_param_value("q");
    if (!is_valid_utf8(request.query_text)) throw malformed("query must be UTF-8");
    request.measure =
        req.has_param("measure") ? parse_measure(req.get_param_value("measure")) : Measure::cosine;
    request.cosine_mode = req.has_param("cosine_mode")
                              ? parse_cosine_mode(req.get_param_value("cosine_mode"))
                              : config.default_cosine_mode;
    for (std::size_t i = 0; i < req.get_param_value_count("class"); ++i) {
      auto label = req.get_param_value("class", i);
      if (!label.empty()) request.classifications.insert(std::move(label));
    }
    if (req.has_param("threshold")) request.threshold = parse_threshold(req.get_param_value("threshold"));
    if (req.has_param("limit")) {
      request.limit = parse_unsigned<std::size_t>(req.get_param_value("limit"), "limit");
    }
    const auto run = repo.search(request);
    json body = run;
    body["measure"] = to_string(run.request.measure);
    body["cosine_mode"] = to_string(run.request.cosine_mode);
    const auto metrics = repo.metrics(run.run_id);
    body["precision"] = metrics.precision;
    body["metrics"] = metrics;
    send_json(res, 200, body);
  }

  void get_run(const httplib::Request& req, httplib::Response& res) {
    const auto id = run_id_from_path(req);
    const auto run = repo.run(id);
    json body = run;
    body["judgments"] = repo.judgments(id);
    const auto metrics = repo.metrics(id);
    body["precision"] = metrics.precision;
    body["metrics"] = metrics;
    send_json(res, 200, body);
  }

  void judge(const httplib::Request& req, httplib::Response& res) {
    const auto id = run_id_from_path(req);
    const auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw malformed("body must be a JSON object");
    auto doc = body.find("doc_id");
    auto relevant = body.find("relevant");
    if (doc == body.end() || !doc->is_number_unsigned()) {
      throw malformed("field 'doc_id' must be a non-negative integer");
    }
    if (relevant == body.end() || !relevant->is_boolean()) {
      throw malformed("field 'relevant' must be a boolean");
    }
    const auto metrics =
        repo.judge(id, DocumentId{doc->get<std::uint64_t>()}, relevant->get<bool>());
    send_json(res, 200, metrics);
  }

  void collection(const httplib::Request& req, httplib::Response& res) {
    std::set<std::string, std::less<>> filter;
    for (std::size_t i = 0; i < req.get_param_value_count("class"); ++i) {
      auto label = req.get_param_value("class", i);
      if (!label.empty()) filter.insert(std::move(label));
    }
    const std::size_t offset =
        req.has_param("offset") ? parse_unsigned<std::size_t>(req.get_param_value("offset"), "offset") : 0;
    std::optional<std::size_t> limit;
    if (req.has_param("limit")) {
      limit = parse_unsigned<std::size_t>(req.get_param_value("limit"), "limit");
    }
    auto body = repo.read([&](const Index& ix) {
      json docs = json::array();
      std::size_t total = 0;
      for (const auto& [id, doc] : ix.documents()) {
        if (!filter.empty() && !filter.contains(doc.classification)) continue;
        if (total >= offset && (!limit || docs.size() < *limit)) docs.push_back(document_summary(doc));
        ++total;
      }
      return json{{"total", total}, {"offset", offset}, {"documents", std::move(docs)}};
    });
    send_json(res, 200, body);
  }

  void classifications(const httplib::Request&, httplib::Response& res) {
    auto labels = repo.read([](const Index& ix) { return json(ix.classifications()); });
    send_json(res, 200, {{"classifications", std::move(labels)}});
  }
};

Service::Service(Repository& repo, ServiceConfig config)
    : impl_(std::make_unique<Impl>(repo, std::move(config))) {}

Service::~Service() = default;

int Service::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool Service::bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port);
}

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace vsm
