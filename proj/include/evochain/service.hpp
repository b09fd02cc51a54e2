#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evochain/chains.hpp"
#include "evochain/engine.hpp"
#include "evochain/errors.hpp"

#include "json.hpp"

namespace evochain {

struct FieldError {
  std::string field;
  std::string message;
};

// Raised by parse_query_spec with every problem found in the body.
class SpecError : public ValidationError {
 public:
  explicit SpecError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

// Reads a QuerySpec from its JSON form: {kind, keyword, paper_a, paper_b,
// chain_length, com_t, r, M, N, beam_width}. Fields not allowed for the kind
// are rejected.
QuerySpec parse_query_spec(const nlohmann::json& body);

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Route handlers over one read-only engine. Usable without a socket.
class Service {
 public:
  explicit Service(const Engine& engine) : engine_(engine) {}

  HttpResponse communities() const;
  HttpResponse papers(const std::string& q, std::size_t limit = 50) const;
  HttpResponse query(const std::string& body) const;
  HttpResponse config() const;

 private:
  const Engine& engine_;
};

// Socket front end for a Service. Static files under `static_dir` are
// mounted at /ui.
class HttpServer {
 public:
  explicit HttpServer(const Service& service, std::optional<std::string> static_dir = std::nullopt);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds any free port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// PEG JSON for a query: the single code path shared by the CLI and HTTP.
std::string query_json(const Engine& engine, const QuerySpec& spec, std::vector<std::string>* warnings = nullptr);

}  // namespace evochain
