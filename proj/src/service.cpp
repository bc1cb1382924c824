#include "debiaskit/service.hpp"

#include "debiaskit/error.hpp"
#include "debiaskit/serialize.hpp"
#include "debiaskit/wordlists.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace debiaskit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Registry

EmbeddingRegistry::EmbeddingRegistry(std::vector<RegistryEntry> entries) : entries_(std::move(entries)) {}

std::shared_ptr<EmbeddingRegistry> EmbeddingRegistry::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open embedding registry '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "registry '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("embeddings") || !j.at("embeddings").is_array())
    throw Error(ErrorKind::Parse, "registry '" + path + "' needs an 'embeddings' array");
  const fs::path base = fs::path(path).parent_path();
  std::vector<RegistryEntry> entries;
  for (const auto& e : j.at("embeddings")) {
    if (!e.is_object() || !e.contains("name") || !e.contains("path"))
      throw Error(ErrorKind::Parse, "registry entries need 'name' and 'path'");
    RegistryEntry r;
    r.name = e.at("name").get<std::string>();
    fs::path p = e.at("path").get<std::string>();
    r.path = (p.is_relative() ? base / p : p).string();
    r.format = parse_format(e.value("format", std::string("glove_text")));
    if (e.contains("limit") && !e.at("limit").is_null()) r.limit = e.at("limit").get<std::size_t>();
    entries.push_back(std::move(r));
  }
  return std::make_shared<EmbeddingRegistry>(std::move(entries));
}

bool EmbeddingRegistry::contains(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return true;
  return false;
}

std::vector<std::string> EmbeddingRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

EmbeddingSnapshot EmbeddingRegistry::get(const std::string& name) {
  std::lock_guard lock(mu_);
  if (auto it = cache_.find(name); it != cache_.end()) return it->second;
  for (const auto& e : entries_) {
    if (e.name != name) continue;
    EmbeddingSnapshot s = load_embedding_file(e.path, e.format, e.limit);
    cache_.emplace(name, s);
    return s;
  }
  throw Error(ErrorKind::NotFound, "unknown embedding '" + name + "'");
}

ServiceConfig load_service_config(const std::optional<std::string>& path) {
  ServiceConfig cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(ErrorKind::NotFound, "cannot open service config '" + *path + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, "service config is not valid JSON: " + std::string(e.what()));
    }
    cfg.host = j.value("host", cfg.host);
    cfg.port = j.value("port", cfg.port);
    if (j.contains("registry")) {
      fs::path p = j.at("registry").get<std::string>();
      cfg.registry_path = (p.is_relative() ? fs::path(*path).parent_path() / p : p).string();
    }
  }
  if (const char* env = std::getenv("DEBIASKIT_PORT"); env && *env) {
    int port = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), port);
    if (ec != std::errc() || *ptr != '\0' || port < 0 || port > 65535)
      throw Error(ErrorKind::InvalidArgument, "DEBIASKIT_PORT must be a port number");
    cfg.port = port;
  }
  if (const char* env = std::getenv("DEBIASKIT_REGISTRY"); env && *env) cfg.registry_path = env;
  if (cfg.registry_path.empty()) cfg.registry_path = data_dir() + "/registry.json";
  return cfg;
}

// ---------------------------------------------------------------------------
// Responses

namespace {

ApiResponse json_response(int status, const Json& body) { return {status, body.dump(), "application/json"}; }

ApiResponse error_response(int status, const std::string& kind, const std::string& message,
                           const std::vector<std::string>& missing = {}) {
  Json err{{"kind", kind}, {"message", message}};
  if (!missing.empty()) err["missing"] = missing;
  return json_response(status, Json{{"error", err}});
}

ApiResponse from_error(int status, const Error& e) {
  if (const auto* u = dynamic_cast<const UnknownTokenError*>(&e))
    return error_response(status, to_string(e.kind()), e.what(), u->missing());
  return error_response(status, to_string(e.kind()), e.what());
}

// Status for errors raised while executing against a session's vectors.
int execution_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownToken: return 422;
    case ErrorKind::JobInvariant:
    case ErrorKind::InvalidArgument: return 409;
    case ErrorKind::Degenerate:
    case ErrorKind::Convergence: return 422;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Parse: return 400;
  }
  return 500;
}

std::optional<Json> parse_body(const std::string& body, ApiResponse& err) {
  try {
    return Json::parse(body.empty() ? std::string("{}") : body);
  } catch (const nlohmann::json::exception& e) {
    err = error_response(400, "parse", std::string("request body is not valid JSON: ") + e.what());
    return std::nullopt;
  }
}

std::optional<std::size_t> parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string query_value(const std::map<std::string, std::string>& q, const std::string& key,
                        const std::string& fallback) {
  auto it = q.find(key);
  return it == q.end() || it->second.empty() ? fallback : it->second;
}

ApiResponse unknown_session(const std::string& id) {
  return error_response(404, "not_found", "unknown session '" + id + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Sessions

SessionStore::SessionStore(std::shared_ptr<EmbeddingRegistry> registry) : registry_(std::move(registry)) {
  if (!registry_) registry_ = std::make_shared<EmbeddingRegistry>();
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionStore::session_count() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

ApiResponse SessionStore::list_embeddings() const {
  return json_response(200, Json{{"embeddings", registry_->names()}});
}

ApiResponse SessionStore::create_session(const std::string& body) {
  ApiResponse err;
  auto j = parse_body(body, err);
  if (!j) return err;
  if (!j->is_object()) return error_response(400, "parse", "request body must be a JSON object");

  std::string name;
  std::optional<EmbeddingSnapshot> base;
  const Json* upload = nullptr;
  if (j->contains("upload")) upload = &j->at("upload");
  else if (j->contains("embedding") && j->at("embedding").is_object()) upload = &j->at("embedding");

  if (upload) {
    if (!upload->is_object() || !upload->contains("data") || !upload->at("data").is_string())
      return error_response(400, "parse", "upload needs a 'data' string");
    try {
      const auto format = parse_format(upload->value("format", std::string("glove_text")));
      std::optional<std::size_t> limit;
      if (upload->contains("limit") && !upload->at("limit").is_null())
        limit = upload->at("limit").get<std::size_t>();
      base = load_embedding_string(upload->at("data").get_ref<const std::string&>(), format, limit);
      name = upload->value("name", std::string("upload"));
    } catch (const Error& e) {
      return from_error(400, e);
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "parse", e.what());
    }
  } else if (j->contains("embedding") && j->at("embedding").is_string()) {
    name = j->at("embedding").get<std::string>();
    if (!registry_->contains(name)) return error_response(404, "not_found", "unknown embedding '" + name + "'");
    try {
      base = registry_->get(name);
    } catch (const Error& e) {
      return from_error(e.kind() == ErrorKind::NotFound ? 404 : 500, e);
    }
  } else {
    return error_response(400, "invalid_argument", "body needs 'embedding' (a registered name) or 'upload'");
  }

  std::shared_ptr<Session> session;
  {
    std::unique_lock lock(mu_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_++));
    session = std::make_shared<Session>(buf, name, *base);
    sessions_.emplace(session->id, session);
  }
  return json_response(201, Json{{"session_id", session->id},
                                 {"embedding", name},
                                 {"vocab_size", base->size()},
                                 {"dim", base->dim()},
                                 {"snapshot_id", base->id()}});
}

ApiResponse SessionStore::get_session(const std::string& id, bool include_vocab) {
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::lock_guard lock(s->mu);
  Json history = Json::array();
  for (const auto& h : s->history) {
    Json e{{"kind", h.kind}, {"snapshot_id", h.snapshot_id}};
    if (h.job) e["job"] = to_json(*h.job);
    history.push_back(std::move(e));
  }
  Json out{{"session_id", s->id},
           {"embedding", s->embedding_name},
           {"vocab_size", s->base.size()},
           {"dim", s->base.dim()},
           {"base_snapshot_id", s->base.id()},
           {"current_snapshot_id", s->current.id()},
           {"history", history}};
  if (include_vocab) out["vocabulary"] = s->base.tokens();
  return json_response(200, out);
}

ApiResponse SessionStore::identify(const std::string& id, const std::string& body) {
  auto s = find(id);
  if (!s) return unknown_session(id);
  ApiResponse err;
  auto j = parse_body(body, err);
  if (!j) return err;
  if (!j->is_object()) return error_response(400, "parse", "request body must be a JSON object");

  DebiasJob job;
  std::size_t k = 10;
  try {
    Json as_job = *j;
    as_job["subspace"] = j->value("method", std::string("two_means"));
    as_job["method"] = "lp";
    if (j->contains("config") && j->at("config").is_object()) {
      const Json& cfg = j->at("config");
      if (cfg.contains("iterative")) as_job["iterative"] = cfg.at("iterative");
      if (cfg.contains("k")) k = cfg.at("k").get<std::size_t>();
    }
    if (j->contains("k")) k = j->at("k").get<std::size_t>();
    job = job_from_json(as_job);
  } catch (const Error& e) {
    return from_error(400, e);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "parse", e.what());
  }

  EmbeddingSnapshot current = [&] {
    std::lock_guard lock(s->mu);
    return s->current;
  }();
  try {
    job.validate();
    ConceptDirection dir = identify_direction(current, job);
    return json_response(200, direction_summary(current, dir, k));
  } catch (const Error& e) {
    return from_error(execution_status(e.kind()), e);
  }
}

ApiResponse SessionStore::run_job(const std::string& id, const std::string& body) {
  auto s = find(id);
  if (!s) return unknown_session(id);
  ApiResponse err;
  auto j = parse_body(body, err);
  if (!j) return err;

  DebiasJob job;
  try {
    job = job_from_json(j->contains("job") ? j->at("job") : *j);
  } catch (const Error& e) {
    return from_error(400, e);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "parse", e.what());
  }

  std::lock_guard lock(s->mu);
  try {
    TraceResult result = build_trace(s->current, job);
    Json out = job_result_json(result);
    out["session_id"] = s->id;
    s->current = result.job.transform.output;
    s->history.push_back({"job", job, result.trace, s->current.id()});
    return json_response(200, out);
  } catch (const Error& e) {
    return from_error(execution_status(e.kind()), e);
  }
}

ApiResponse SessionStore::neighbors(const std::string& id, const std::map<std::string, std::string>& query) {
  auto s = find(id);
  if (!s) return unknown_session(id);
  const std::string token = query_value(query, "token", "");
  if (token.empty()) return error_response(400, "invalid_argument", "missing 'token' parameter");
  const auto k = parse_count(query_value(query, "k", "10"));
  if (!k || *k == 0) return error_response(400, "invalid_argument", "'k' must be a positive integer");
  const std::string state = query_value(query, "state", "both");
  if (state != "before" && state != "after" && state != "both")
    return error_response(400, "invalid_argument", "'state' must be before, after or both");

  auto [base, current] = [&] {
    std::lock_guard lock(s->mu);
    return std::pair(s->base, s->current);
  }();
  if (!base.contains(token)) return error_response(404, "not_found", "unknown token '" + token + "'");
  if (*k >= static_cast<std::size_t>(base.size()))
    return error_response(400, "invalid_argument", "'k' must be smaller than the vocabulary size");
  Json out{{"token", token}, {"k", *k}};
  try {
    if (state != "after") out["before"] = to_json(nearest_neighbors(base, token, *k));
    if (state != "before") out["after"] = to_json(nearest_neighbors(current, token, *k));
  } catch (const Error& e) {
    return from_error(execution_status(e.kind()), e);
  }
  return json_response(200, out);
}

ApiResponse SessionStore::export_snapshot(const std::string& id, const std::map<std::string, std::string>& query) {
  auto s = find(id);
  if (!s) return unknown_session(id);
  EmbeddingFormat format;
  ExportOptions options;
  try {
    format = parse_format(query_value(query, "format", "glove_text"));
  } catch (const Error& e) {
    return from_error(400, e);
  }
  if (auto it = query.find("digits"); it != query.end() && !it->second.empty()) {
    const auto d = parse_count(it->second);
    if (!d || *d > 17) return error_response(400, "invalid_argument", "'digits' must be between 0 and 17");
    options.significant_digits = static_cast<int>(*d);
  }
  EmbeddingSnapshot current = [&] {
    std::lock_guard lock(s->mu);
    return s->current;
  }();
  return {200, export_embedding_string(current, format, options), "text/plain; charset=utf-8"};
}

ApiResponse SessionStore::reset(const std::string& id) {
  auto s = find(id);
  if (!s) return unknown_session(id);
  std::lock_guard lock(s->mu);
  s->current = s->base;
  s->history.push_back({"reset", std::nullopt, std::nullopt, s->current.id()});
  return json_response(200, Json{{"session_id", s->id}, {"snapshot_id", s->current.id()}});
}

ApiResponse SessionStore::handle(const ApiRequest& req) {
  std::vector<std::string> parts;
  {
    std::stringstream ss(req.path);
    std::string part;
    while (std::getline(ss, part, '/'))
      if (!part.empty()) parts.push_back(part);
  }
  auto method_not_allowed = [] { return error_response(405, "invalid_argument", "method not allowed"); };
  const bool get = req.method == "GET";
  const bool post = req.method == "POST";

  try {
    if (parts.size() == 1 && parts[0] == "embeddings") return get ? list_embeddings() : method_not_allowed();
    if (parts.empty() || parts[0] != "sessions")
      return error_response(404, "not_found", "no route for '" + req.path + "'");
    if (parts.size() == 1) return post ? create_session(req.body) : method_not_allowed();
    const std::string& id = parts[1];
    if (parts.size() == 2)
      return get ? get_session(id, query_value(req.query, "vocab", "0") != "0") : method_not_allowed();
    if (parts.size() == 3) {
      const std::string& action = parts[2];
      if (action == "subspace") return post ? identify(id, req.body) : method_not_allowed();
      if (action == "jobs") return post ? run_job(id, req.body) : method_not_allowed();
      if (action == "neighbors") return get ? neighbors(id, req.query) : method_not_allowed();
      if (action == "export") return get ? export_snapshot(id, req.query) : method_not_allowed();
      if (action == "reset") return post ? reset(id) : method_not_allowed();
    }
    return error_response(404, "not_found", "no route for '" + req.path + "'");
  } catch (const Error& e) {
    return from_error(execution_status(e.kind()), e);
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

// ---------------------------------------------------------------------------
// HTTP transport

void install_routes(httplib::Server& server, SessionStore& store) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto forward = [&store](const httplib::Request& req, httplib::Response& res) {
    ApiRequest api{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) api.query.emplace(k, v);
    ApiResponse out = store.handle(api);
    res.status = out.status;
    if (out.content_type.rfind("text/plain", 0) == 0) {
      const std::string ext = api.query.count("format") && api.query.at("format").rfind("word2vec", 0) == 0
                                  ? "w2v.txt"
                                  : "txt";
      res.set_header("Content-Disposition", "attachment; filename=\"embedding." + ext + "\"");
    }
    res.set_content(out.body, out.content_type);
  };
  server.Get(R"(/.*)", forward);
  server.Post(R"(/.*)", forward);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

int run_server(const ServiceConfig& config) {
  SessionStore store(EmbeddingRegistry::from_file(config.registry_path));
  httplib::Server server;
  install_routes(server, store);
  std::fprintf(stderr, "debiaskit service listening on http://%s:%d (registry %s)\n", config.host.c_str(),
               config.port, config.registry_path.c_str());
  if (!server.listen(config.host, config.port)) {
    std::fprintf(stderr, "failed to listen on %s:%d\n", config.host.c_str(), config.port);
    return 1;
  }
  return 0;
}

}  // namespace debiaskit
