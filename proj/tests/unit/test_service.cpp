#include "support.hpp"

#include "debiaskit/error.hpp"
#include "debiaskit/serialize.hpp"
#include "debiaskit/service.hpp"
#include "debiaskit/wordlists.hpp"

#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

using namespace debiaskit;
using namespace testing_support;

namespace {

// 1,000 x 50 desk-scale fixture, written once per test binary.
const std::string& fixture_path() {
  static const std::string path = [] {
    const auto p = std::filesystem::temp_directory_path() / "debiaskit_fixture_1000x50.txt";
    std::ofstream out(p);
    export_embedding(random_snapshot(1000, 50, 4242), out, EmbeddingFormat::GloveText);
    return p.string();
  }();
  return path;
}

std::shared_ptr<EmbeddingRegistry> fixture_registry() {
  return std::make_shared<EmbeddingRegistry>(
      std::vector<RegistryEntry>{{"fixture", fixture_path(), EmbeddingFormat::GloveText, std::nullopt}});
}

ApiResponse call(SessionStore& store, const std::string& method, const std::string& path, const Json& body = {},
                 std::map<std::string, std::string> query = {}) {
  return store.handle({method, path, std::move(query), body.is_null() ? std::string() : body.dump()});
}

std::string new_session(SessionStore& store, const std::string& name = "fixture") {
  const auto r = call(store, "POST", "/sessions", {{"embedding", name}});
  REQUIRE(r.status == 201);
  return Json::parse(r.body)["session_id"];
}

Json lp_job() {
  return Json{{"method", "lp"},
              {"subspace", "two_means"},
              {"seeds_f", {"w0", "w1", "w2"}},
              {"seeds_m", {"w3", "w4", "w5"}},
              {"evaluation", {"w10", "w11", "w12"}}};
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("embeddings are listed and sessions created by name") {
  SessionStore store(fixture_registry());
  auto r = call(store, "GET", "/embeddings");
  CHECK(r.status == 200);
  CHECK(Json::parse(r.body)["embeddings"] == Json::array({"fixture"}));

  r = call(store, "POST", "/sessions", {{"embedding", "fixture"}});
  CHECK(r.status == 201);
  const Json j = Json::parse(r.body);
  CHECK(j["vocab_size"] == 1000);
  CHECK(j["dim"] == 50);
  CHECK(call(store, "POST", "/sessions", {{"embedding", "nonexistent"}}).status == 404);
  CHECK(call(store, "POST", "/sessions", Json::object()).status == 400);
  CHECK(store.handle({"POST", "/sessions", {}, "{not json"}).status == 400);
}

TEST_CASE("bundled registry resolves the default embedding") {
  const auto registry = EmbeddingRegistry::from_file(data_dir() + "/registry.json");
  REQUIRE_FALSE(registry->names().empty());
  SessionStore store(registry);
  const auto r = call(store, "POST", "/sessions", {{"embedding", registry->names().front()}});
  CHECK(r.status == 201);
  CHECK(Json::parse(r.body)["dim"] == 300);
}

TEST_CASE("upload of the 1000 x 50 fixture") {
  SessionStore store(fixture_registry());
  std::ifstream in(fixture_path());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto r = call(store, "POST", "/sessions", {{"upload", {{"format", "glove_text"}, {"data", data}}}});
  REQUIRE(r.status == 201);
  const std::string id = Json::parse(r.body)["session_id"];
  r = call(store, "GET", "/sessions/" + id, {}, {{"vocab", "1"}});
  CHECK(r.status == 200);
  const Json j = Json::parse(r.body);
  CHECK(j["vocab_size"] == 1000);
  CHECK(j["vocabulary"].size() == 1000);

  CHECK(call(store, "POST", "/sessions", {{"upload", {{"data", "a 1 2\nb 3\n"}}}}).status == 400);
  CHECK(call(store, "POST", "/sessions", {{"upload", {{"format", "xml"}, {"data", "a 1 2\n"}}}}).status == 400);
  CHECK(call(store, "POST", "/sessions", {{"upload", {{"format", "glove_text"}}}}).status == 400);
}

TEST_CASE("subspace endpoint returns a direction summary") {
  SessionStore store(fixture_registry());
  const auto id = new_session(store);
  auto r = call(store, "POST", "/sessions/" + id + "/subspace",
                {{"method", "two_means"}, {"seeds_f", {"w0", "w1"}}, {"seeds_m", {"w2", "w3"}}, {"k", 3}});
  REQUIRE(r.status == 200);
  const Json j = Json::parse(r.body);
  CHECK(j["method"] == "two_means");
  CHECK(j["vector"].size() == 50);
  CHECK(j["nearest_positive"].size() == 3);
  CHECK(j["nearest_negative"].size() == 3);

  r = call(store, "POST", "/sessions/" + id + "/subspace",
           {{"method", "two_means"}, {"seeds_f", {"w0", "zz1"}}, {"seeds_m", {"zz2"}}});
  CHECK(r.status == 422);
  CHECK(Json::parse(r.body)["error"]["missing"] == Json::array({"zz1", "zz2"}));
  r = call(store, "POST", "/sessions/" + id + "/subspace", {{"method", "two_means"}, {"seeds_f", {"w0"}}});
  CHECK(r.status == 409);
  r = call(store, "POST", "/sessions/" + id + "/subspace", {{"method", "spectral"}});
  CHECK(r.status == 400);
}

TEST_CASE("jobs endpoint: trace, metrics, error codes") {
  SessionStore store(fixture_registry());
  const auto id = new_session(store);
  Json job = lp_job();
  job["metrics"] = {{"weat", {{"x", {"w20"}}, {"y", {"w21"}}, {"a", {"w22", "w23"}}, {"b", {"w24", "w25"}}}},
                    {"ect_attributes", {"w30", "w31", "w32"}}};
  auto r = call(store, "POST", "/sessions/" + id + "/jobs", job);
  REQUIRE(r.status == 200);
  Json j = Json::parse(r.body);
  CHECK(j["trace"]["frames"].size() == 4);
  CHECK(j["metrics_before"].is_object());
  CHECK(j["metrics_after"].is_object());
  CHECK(j["metrics_after"]["snapshot_id"] == j["output_snapshot_id"]);

  // The {"job": ...} envelope is accepted too.
  // Repeating the same seeds would now be degenerate, so use fresh ones.
  Json wrapped = lp_job();
  wrapped["seeds_f"] = {"w6", "w7"};
  wrapped["seeds_m"] = {"w8", "w9"};
  CHECK(call(store, "POST", "/sessions/" + id + "/jobs", {{"job", wrapped}}).status == 200);

  Json missing = lp_job();
  missing["evaluation"] = {"w10", "nope1", "nope2"};
  r = call(store, "POST", "/sessions/" + id + "/jobs", missing);
  CHECK(r.status == 422);
  CHECK(Json::parse(r.body)["error"]["missing"] == Json::array({"nope1", "nope2"}));

  Json hd = lp_job();
  hd["method"] = "hd";
  r = call(store, "POST", "/sessions/" + id + "/jobs", hd);
  CHECK(r.status == 409);
  CHECK(Json::parse(r.body)["error"]["kind"] == "job_invariant");

  CHECK(store.handle({"POST", "/sessions/" + id + "/jobs", {}, "[1,"}).status == 400);
  CHECK(call(store, "POST", "/sessions/" + id + "/jobs", {{"method", "soft"}}).status == 400);
  CHECK(call(store, "POST", "/sessions/s999999/jobs", lp_job()).status == 404);

  r = call(store, "GET", "/sessions/" + id);
  j = Json::parse(r.body);
  CHECK(j["history"].size() == 2);
  CHECK(j["current_snapshot_id"] != j["base_snapshot_id"]);
}

TEST_CASE("neighbors before and after") {
  SessionStore store(fixture_registry());
  const auto id = new_session(store);
  REQUIRE(call(store, "POST", "/sessions/" + id + "/jobs", lp_job()).status == 200);
  auto r = call(store, "GET", "/sessions/" + id + "/neighbors", {}, {{"token", "w10"}, {"k", "5"}});
  REQUIRE(r.status == 200);
  Json j = Json::parse(r.body);
  CHECK(j["before"].size() == 5);
  CHECK(j["after"].size() == 5);
  r = call(store, "GET", "/sessions/" + id + "/neighbors", {}, {{"token", "w10"}, {"state", "before"}});
  j = Json::parse(r.body);
  CHECK(j["before"].size() == 10);
  CHECK_FALSE(j.contains("after"));
  CHECK(call(store, "GET", "/sessions/" + id + "/neighbors", {}, {{"token", "zzz"}}).status == 404);
  CHECK(call(store, "GET", "/sessions/" + id + "/neighbors").status == 400);
  CHECK(call(store, "GET", "/sessions/" + id + "/neighbors", {}, {{"token", "w1"}, {"k", "-1"}}).status == 400);
  CHECK(call(store, "GET", "/sessions/" + id + "/neighbors", {}, {{"token", "w1"}, {"state", "now"}}).status == 400);
}

TEST_CASE("export, reset and determinism") {
  SessionStore store(fixture_registry());
  const auto a = new_session(store);
  const auto b = new_session(store);
  const auto base = call(store, "GET", "/sessions/" + a + "/export");
  CHECK(base.status == 200);
  CHECK(base.content_type.rfind("text/plain", 0) == 0);

  const auto ja = call(store, "POST", "/sessions/" + a + "/jobs", lp_job());
  REQUIRE(ja.status == 200);
  REQUIRE(call(store, "POST", "/sessions/" + b + "/jobs", lp_job()).status == 200);
  const auto ea = call(store, "GET", "/sessions/" + a + "/export");
  const auto eb = call(store, "GET", "/sessions/" + b + "/export");
  CHECK(ea.body == eb.body);
  CHECK(ea.body != base.body);

  // Exported vectors read back exactly and satisfy LP nullity.
  const auto out = load_embedding_string(ea.body, EmbeddingFormat::GloveText);
  const auto jv = Json::parse(ja.body)["directions"][0]["vector"].get<std::vector<double>>();
  const Vector v = Eigen::Map<const Vector>(jv.data(), static_cast<Index>(jv.size()));
  CHECK((out.matrix() * v).cwiseAbs().maxCoeff() <= 1e-9);

  CHECK(call(store, "POST", "/sessions/" + a + "/reset").status == 200);
  CHECK(call(store, "GET", "/sessions/" + a + "/export").body == base.body);

  const auto w2v = call(store, "GET", "/sessions/" + a + "/export", {}, {{"format", "word2vec_text"}});
  CHECK(w2v.body.rfind("1000 50\n", 0) == 0);
  CHECK(call(store, "GET", "/sessions/" + a + "/export", {}, {{"format", "bin"}}).status == 400);
  CHECK(call(store, "GET", "/sessions/" + a + "/export", {}, {{"digits", "40"}}).status == 400);
  const auto six = call(store, "GET", "/sessions/" + a + "/export", {}, {{"digits", "6"}});
  CHECK(six.status == 200);
  CHECK(six.body.size() < base.body.size());
}

TEST_CASE("sessions are isolated") {
  SessionStore store(fixture_registry());
  const auto a = new_session(store);
  const auto b = new_session(store);
  const auto before = call(store, "GET", "/sessions/" + b + "/export").body;
  REQUIRE(call(store, "POST", "/sessions/" + a + "/jobs", lp_job()).status == 200);
  CHECK(call(store, "GET", "/sessions/" + b + "/export").body == before);
  CHECK(Json::parse(call(store, "GET", "/sessions/" + b).body)["history"].empty());
}

TEST_CASE("chained jobs operate on the current snapshot") {
  SessionStore store(fixture_registry());
  const auto id = new_session(store);
  const Json first = Json::parse(call(store, "POST", "/sessions/" + id + "/jobs", lp_job()).body);
  Json second_job = lp_job();
  second_job["seeds_f"] = {"w6", "w7"};
  second_job["seeds_m"] = {"w8", "w9"};
  const Json second = Json::parse(call(store, "POST", "/sessions/" + id + "/jobs", second_job).body);
  CHECK(second["trace"]["frames"][0]["snapshot_id"] == first["output_snapshot_id"]);
}

TEST_CASE("routing") {
  SessionStore store(fixture_registry());
  const auto id = new_session(store);
  CHECK(call(store, "GET", "/nothing").status == 404);
  CHECK(call(store, "GET", "/sessions/" + id + "/frobnicate").status == 404);
  CHECK(call(store, "GET", "/sessions/s424242").status == 404);
  CHECK(call(store, "GET", "/sessions").status == 405);
  CHECK(call(store, "POST", "/embeddings").status == 405);
  CHECK(call(store, "GET", "/sessions/" + id + "/jobs").status == 405);
  CHECK(call(store, "GET", "/sessions/" + id + "/reset").status == 405);
  CHECK(call(store, "POST", "/sessions/" + id + "/export").status == 405);
  CHECK(call(store, "PUT", "/sessions/" + id).status == 405);
}

TEST_CASE("concurrent jobs on separate sessions match serial results") {
  SessionStore store(fixture_registry());
  std::vector<std::string> ids;
  for (int i = 0; i < 6; ++i) ids.push_back(new_session(store));
  std::vector<std::string> exports(ids.size());
  std::vector<int> statuses(ids.size());
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < ids.size(); ++i)
    threads.emplace_back([&, i] {
      statuses[i] = call(store, "POST", "/sessions/" + ids[i] + "/jobs", lp_job()).status;
      exports[i] = call(store, "GET", "/sessions/" + ids[i] + "/export").body;
    });
  for (auto& t : threads) t.join();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    CHECK(statuses[i] == 200);
    CHECK(exports[i] == exports[0]);
  }
}

TEST_CASE("concurrent jobs on one session are serialized") {
  SessionStore store(fixture_registry());
  const auto id = new_session(store);
  std::vector<std::thread> threads;
  std::vector<int> statuses(4);
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&, i] {
      Json job = lp_job();
      job["seeds_f"] = {"w" + std::to_string(100 + 2 * i)};
      job["seeds_m"] = {"w" + std::to_string(101 + 2 * i)};
      statuses[static_cast<std::size_t>(i)] = call(store, "POST", "/sessions/" + id + "/jobs", job).status;
    });
  for (auto& t : threads) t.join();
  const Json j = Json::parse(call(store, "GET", "/sessions/" + id).body);
  for (int st : statuses) CHECK(st == 200);
  REQUIRE(j["history"].size() == 4);
  CHECK(j["current_snapshot_id"] == j["history"][3]["snapshot_id"]);
}

TEST_CASE("HTTP round trip over a real socket") {
  SessionStore store(fixture_registry());
  httplib::Server server;
  install_routes(server, store);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto r = client.Post("/sessions", R"({"embedding":"fixture"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 201);
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
  const std::string id = Json::parse(r->body)["session_id"];

  r = client.Post("/sessions/" + id + "/jobs", lp_job().dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  r = client.Get("/sessions/" + id + "/neighbors?token=w10&k=3&state=after");
  REQUIRE(r);
  CHECK(Json::parse(r->body)["after"].size() == 3);
  r = client.Get("/sessions/" + id + "/export?format=glove_text");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("Content-Type").rfind("text/plain", 0) == 0);
  CHECK(load_embedding_string(r->body, EmbeddingFormat::GloveText).size() == 1000);
  r = client.Post("/sessions/" + id + "/reset", "", "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  r = client.Get("/embeddings");
  REQUIRE(r);
  CHECK(r->status == 200);
  r = client.Options("/sessions");
  REQUIRE(r);
  CHECK(r->status == 204);
  r = client.Get("/sessions/s777777");
  REQUIRE(r);
  CHECK(r->status == 404);

  server.stop();
  worker.join();
}

TEST_CASE("service config: file and environment overrides") {
  const auto dir = std::filesystem::temp_directory_path() / "debiaskit_cfg";
  std::filesystem::create_directories(dir);
  const auto cfg_path = (dir / "service.json").string();
  std::ofstream(cfg_path) << R"({"host":"0.0.0.0","port":9001,"registry":"reg.json"})";
  auto cfg = load_service_config(cfg_path);
  CHECK(cfg.host == "0.0.0.0");
  CHECK(cfg.port == 9001);
  CHECK(cfg.registry_path == (dir / "reg.json").string());
  CHECK_THROWS_AS(load_service_config(std::string("/nonexistent/cfg.json")), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("registry file errors") {
  CHECK_THROWS_AS(EmbeddingRegistry::from_file("/nonexistent/registry.json"), Error);
  const auto path = (std::filesystem::temp_directory_path() / "debiaskit_bad_registry.json").string();
  std::ofstream(path) << R"({"embeddings":[{"name":"x"}]})";
  CHECK_THROWS_AS(EmbeddingRegistry::from_file(path), Error);
  std::filesystem::remove(path);
}


TEST_CASE("shipped presets run on the bundled embedding") {
  SessionStore store(EmbeddingRegistry::from_file(data_dir() + "/registry.json"));
  const std::map<std::string, std::size_t> frames{{"gender_lp", 4}, {"gender_hd", 5}, {"gender_occupation_oscar", 4},
                                                  {"royalty_lp", 4}, {"gender_inlp", 0}};
  for (const auto& [name, count] : frames) {
    CAPTURE(name);
    std::ifstream in(data_dir() + "/presets/" + name + ".json");
    REQUIRE(in);
    const Json preset = Json::parse(in);
    CHECK(preset["name"].is_string());
    const auto id = new_session(store, "gnews300-default");
    const auto r = call(store, "POST", "/sessions/" + id + "/jobs", preset);
    REQUIRE(r.status == 200);
    const Json j = Json::parse(r.body);
    if (count) CHECK(j["trace"]["frames"].size() == count);
    else CHECK(j["trace"]["frames"].size() == 2 + 2 * j["inlp"]["rounds"].size());
  }
}

}  // TEST_SUITE
