#include "evochain/service.hpp"

#include <algorithm>
#include <cctype>

#include "evochain/errors.hpp"
#include "httplib.h"

namespace evochain {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string summarize(const std::vector<FieldError>& errors) {
  std::string s = "invalid query";
  for (const auto& e : errors) s += "; " + e.field + ": " + e.message;
  return s;
}

HttpResponse json_response(int status, const ordered_json& body) {
  return {status, body.dump(2) + "\n"};
}

HttpResponse error_response(int status, const std::string& message) {
  ordered_json j;
  j["error"] = message;
  return json_response(status, j);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

SpecError::SpecError(std::vector<FieldError> errors) : ValidationError(summarize(errors)), errors_(std::move(errors)) {}

QuerySpec parse_query_spec(const json& body) {
  std::vector<FieldError> errors;
  QuerySpec spec;
  if (!body.is_object()) throw SpecError(std::vector<FieldError>{{"body", "must be a JSON object"}});

  static const std::vector<std::string> known{"kind", "keyword", "paper_a", "paper_b", "chain_length",
                                              "com_t", "r", "M", "N", "beam_width"};
  for (const auto& [key, value] : body.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) errors.push_back({key, "unknown field"});

  auto text = [&](const char* field) -> std::optional<std::string> {
    auto it = body.find(field);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
      errors.push_back({field, "must be a string"});
      return std::nullopt;
    }
    return it->get<std::string>();
  };
  auto integer = [&](const char* field, long long min) -> std::optional<long long> {
    auto it = body.find(field);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer() || it->get<long long>() < min) {
      errors.push_back({field, "must be an integer >= " + std::to_string(min)});
      return std::nullopt;
    }
    return it->get<long long>();
  };
  auto real = [&](const char* field) -> std::optional<double> {
    auto it = body.find(field);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) {
      errors.push_back({field, "must be a number"});
      return std::nullopt;
    }
    return it->get<double>();
  };

  auto kind = text("kind");
  if (!kind) {
    if (!body.contains("kind")) errors.push_back({"kind", "required"});
  } else {
    try {
      spec.kind = parse_query_kind(*kind);
    } catch (const ValidationError&) {
      errors.push_back({"kind", "must be one of keyword, single_paper, two_paper"});
      kind.reset();
    }
  }
  spec.keyword = text("keyword");
  spec.paper_a = text("paper_a");
  spec.paper_b = text("paper_b");
  if (auto v = integer("chain_length", 2)) spec.chain_length = static_cast<int>(*v);
  if (auto v = integer("M", 1)) spec.M = static_cast<std::size_t>(*v);
  if (auto v = integer("N", 1)) spec.N = static_cast<std::size_t>(*v);
  if (auto v = integer("beam_width", 1)) spec.beam_width = static_cast<std::size_t>(*v);
  if (auto v = real("com_t")) {
    if (*v > 0.0 && *v <= 1.0) spec.com_t = *v;
    else errors.push_back({"com_t", "must lie in (0, 1]"});
  }
  if (auto v = real("r")) {
    if (*v >= 0.0) spec.r = *v;
    else errors.push_back({"r", "must be nonnegative"});
  }

  if (kind) {
    auto require = [&](const std::optional<std::string>& v, const char* field) {
      if (!v || v->empty()) errors.push_back({field, std::string("required for kind ") + *kind});
    };
    auto forbid = [&](const std::optional<std::string>& v, const char* field) {
      if (v) errors.push_back({field, std::string("not allowed for kind ") + *kind});
    };
    switch (spec.kind) {
      case QueryKind::Keyword:
        require(spec.keyword, "keyword");
        forbid(spec.paper_a, "paper_a");
        forbid(spec.paper_b, "paper_b");
        break;
      case QueryKind::SinglePaper:
        require(spec.paper_a, "paper_a");
        forbid(spec.keyword, "keyword");
        forbid(spec.paper_b, "paper_b");
        break;
      case QueryKind::TwoPaper:
        require(spec.paper_a, "paper_a");
        require(spec.paper_b, "paper_b");
        forbid(spec.keyword, "keyword");
        break;
    }
  }
  if (!errors.empty()) throw SpecError(std::move(errors));
  return spec;
}

std::string query_json(const Engine& engine, const QuerySpec& spec, std::vector<std::string>* warnings) {
  auto outcome = engine.query(spec);
  if (warnings) *warnings = outcome.warnings;
  return export_graph(outcome.graph, "json");
}

HttpResponse Service::communities() const {
  const auto& model = engine_.model();
  const CommunityIndex index(model, engine_.config().com_t);
  ordered_json out = ordered_json::array();
  for (int k = 0; k < model.K; ++k) {
    std::vector<std::size_t> order(static_cast<std::size_t>(model.U2.rows()));
    for (std::size_t w = 0; w < order.size(); ++w) order[w] = w;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return model.U2(static_cast<Eigen::Index>(a), k) > model.U2(static_cast<Eigen::Index>(b), k);
    });
    if (order.size() > 10) order.resize(10);
    ordered_json c;
    c["id"] = k;
    c["size"] = index.members(k).size();
    c["probability"] = model.core[k];
    c["top_words"] = ordered_json::array();
    for (auto w : order) c["top_words"].push_back(engine_.vocabulary().term(w));
    out.push_back(std::move(c));
  }
  return json_response(200, out);
}

HttpResponse Service::papers(const std::string& q, std::size_t limit) const {
  const auto& corpus = engine_.corpus();
  const auto& content = engine_.relations().content;
  const std::string needle = lower(q);
  std::set<std::size_t> stems;
  for (const auto& s : analyze(q, engine_.stopwords()))
    if (auto w = engine_.vocabulary().find(s)) stems.insert(*w);

  struct Hit {
    std::size_t paper;
    bool title_match;
    double score;
  };
  std::vector<Hit> hits;
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    const bool in_title = !needle.empty() && lower(corpus.paper(p).title).find(needle) != std::string::npos;
    double score = 0.0;
    for (SparseMatrix::InnerIterator it(content, static_cast<Eigen::Index>(p)); it; ++it)
      if (stems.contains(static_cast<std::size_t>(it.col()))) score += it.value();
    if (in_title || score > 0.0) hits.push_back({p, in_title, score});
  }
  std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    if (a.title_match != b.title_match) return a.title_match;
    if (a.score != b.score) return a.score > b.score;
    return corpus.paper(a.paper).id < corpus.paper(b.paper).id;
  });
  if (hits.size() > limit) hits.resize(limit);

  const CommunityIndex index(engine_.model(), engine_.config().com_t);
  ordered_json out = ordered_json::array();
  for (const auto& h : hits) {
    const auto& rec = corpus.paper(h.paper);
    ordered_json j;
    j["id"] = rec.id;
    j["title"] = rec.title;
    j["year"] = rec.year;
    const auto& comms = index.communities_of(h.paper);
    j["communities"] = std::vector<int>(comms.begin(), comms.end());
    j["score"] = h.score;
    out.push_back(std::move(j));
  }
  return json_response(200, out);
}

HttpResponse Service::query(const std::string& body) const {
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::parse_error&) {
    ordered_json j;
    j["errors"] = ordered_json::array({{{"field", "body"}, {"message", "malformed JSON"}}});
    return json_response(400, j);
  }
  QuerySpec spec;
  try {
    spec = parse_query_spec(parsed);
  } catch (const SpecError& e) {
    ordered_json j;
    j["errors"] = ordered_json::array();
    for (const auto& fe : e.errors()) j["errors"].push_back({{"field", fe.field}, {"message", fe.message}});
    return json_response(400, j);
  }
  try {
    return {200, query_json(engine_, spec)};
  } catch (const NumericError& e) {
    return error_response(500, e.what());
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
}

HttpResponse Service::config() const {
  ordered_json j;
  j["fingerprint"] = engine_.fingerprint();
  j["config"] = engine_.config_json();
  j["papers"] = engine_.corpus().size();
  j["vocabulary"] = engine_.vocabulary().size();
  j["communities"] = engine_.model().K;
  return json_response(200, j);
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service, std::optional<std::string> static_dir)
    : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  auto send = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get("/communities", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.communities());
  });
  server.Get("/papers", [&service, send](const httplib::Request& req, httplib::Response& res) {
    std::size_t limit = 50;
    if (req.has_param("limit")) {
      try {
        limit = std::stoul(req.get_param_value("limit"));
      } catch (const std::exception&) {
        send(res, error_response(400, "limit must be a nonnegative integer"));
        return;
      }
    }
    send(res, service.papers(req.get_param_value("q"), limit));
  });
  server.Post("/query", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.query(req.body));
  });
  server.Get("/config", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.config());
  });
  if (static_dir && !server.set_mount_point("/ui", *static_dir))
    throw IoError("cannot serve static assets from " + *static_dir);
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.status == 404) res.set_content("{\n  \"error\": \"not found\"\n}\n", "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::run() {
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  impl_->server.stop();
}

}  // namespace evochain
