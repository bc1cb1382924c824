#pragma once

#include "debiaskit/embedding.hpp"
#include "debiaskit/job.hpp"
#include "debiaskit/view.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace debiaskit {

struct RegistryEntry {
  std::string name;
  std::string path;
  EmbeddingFormat format = EmbeddingFormat::GloveText;
  std::optional<std::size_t> limit;
};

/// Named embeddings, loaded on first use and shared read-only afterwards.
class EmbeddingRegistry {
 public:
  EmbeddingRegistry() = default;
  explicit EmbeddingRegistry(std::vector<RegistryEntry> entries);

  /// {"embeddings": [{"name", "path", "format", "limit"}]}; relative paths
  /// resolve against the config file's directory.
  static std::shared_ptr<EmbeddingRegistry> from_file(const std::string& path);

  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;
  /// Throws Error(NotFound) for an unregistered name.
  EmbeddingSnapshot get(const std::string& name);

 private:
  std::vector<RegistryEntry> entries_;
  std::map<std::string, EmbeddingSnapshot> cache_;
  std::mutex mu_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string registry_path;
};

/// Reads an optional JSON config {host, port, registry}; DEBIASKIT_PORT and
/// DEBIASKIT_REGISTRY override it. Without either, the bundled registry is used.
ServiceConfig load_service_config(const std::optional<std::string>& path);

struct ApiRequest {
  std::string method;  // GET, POST
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct HistoryEntry {
  std::string kind;  // "job" or "reset"
  std::optional<DebiasJob> job;
  std::optional<StepTrace> trace;
  std::string snapshot_id;  // current snapshot after the entry
};

struct Session {
  Session(std::string session_id, std::string name, EmbeddingSnapshot snapshot)
      : id(std::move(session_id)), embedding_name(std::move(name)), base(snapshot), current(std::move(snapshot)) {}

  std::string id;
  std::string embedding_name;
  EmbeddingSnapshot base;
  EmbeddingSnapshot current;
  std::vector<HistoryEntry> history;
  std::mutex mu;  // serializes writers; readers copy snapshots under it
};

/// Session lifecycle and request handling, independent of the HTTP transport.
class SessionStore {
 public:
  explicit SessionStore(std::shared_ptr<EmbeddingRegistry> registry);

  ApiResponse handle(const ApiRequest& request);

  ApiResponse create_session(const std::string& body);
  ApiResponse get_session(const std::string& id, bool include_vocab);
  ApiResponse identify(const std::string& id, const std::string& body);
  ApiResponse run_job(const std::string& id, const std::string& body);
  ApiResponse neighbors(const std::string& id, const std::map<std::string, std::string>& query);
  ApiResponse export_snapshot(const std::string& id, const std::map<std::string, std::string>& query);
  ApiResponse reset(const std::string& id);
  ApiResponse list_embeddings() const;

  std::size_t session_count() const;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;

  std::shared_ptr<EmbeddingRegistry> registry_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  mutable std::shared_mutex mu_;
  std::uint64_t next_id_ = 1;
};

/// Route every endpoint of `store` on `server`.
void install_routes(httplib::Server& server, SessionStore& store);

/// Blocking server loop.
int run_server(const ServiceConfig& config);

}  // namespace debiaskit
