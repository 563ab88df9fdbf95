#include <gtest/gtest.h>

#include <thread>

#include "corae/log_format.hpp"
#include "corae/service/http_server.hpp"
#include "generators.hpp"
#include "httplib.h"
#include "json.hpp"
#include "test_support.hpp"

namespace corae::service {
namespace {

using nlohmann::json;

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    media_ = dir_ / "clip.mp4";
    std::string bytes;
    for (int i = 0; i < 1000; ++i) bytes += static_cast<char>('a' + i % 26);
    test::write_text(media_, bytes);
    ServiceConfig config;
    config.data_dir = dir_ / "data";
    service_ = std::make_unique<SessionService>(config, std::make_unique<FileSessionStore>(config.data_dir));
    server_ = std::make_unique<HttpServer>(*service_);
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->listen(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  json create_session() {
    json body{{"media", {{"path", media_.string()}, {"frame_rate", 30}, {"duration_seconds", 60}}}};
    auto res = client_->Post("/api/sessions", body.dump(), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    return json::parse(res->body);
  }

  httplib::Result post(const std::string& path, const json& body) {
    return client_->Post(path, body.dump(), "application/json");
  }

  json annotations(const AnnotationLog& log, std::size_t from, std::size_t n) {
    json list = json::array();
    for (std::size_t i = from; i < from + n && i < log.records.size(); ++i) {
      const auto& r = log.records[i];
      list.push_back({{"rating", r.rating.value}, {"timecode", r.timecode.to_string()}, {"cause", to_string(r.cause)}});
    }
    return {{"annotations", list}};
  }

  void annotate(const std::string& token, const std::string& pid, const AnnotationLog& log) {
    ASSERT_EQ(post("/api/annotator/" + token + "/identity", {{"participant_id", pid}})->status, 200);
    for (std::size_t i = 0; i < log.records.size(); i += 10) {
      auto res = post("/api/annotator/" + token + "/annotations", annotations(log, i, 10));
      ASSERT_EQ(res->status, 200) << res->body;
    }
    auto res = client_->Post("/api/annotator/" + token + "/complete");
    ASSERT_EQ(res->status, 200) << res->body;
  }

  test::TempDir dir_;
  std::filesystem::path media_;
  std::unique_ptr<SessionService> service_;
  std::unique_ptr<HttpServer> server_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpTest, FullSessionFlow) {
  const auto created = create_session();
  const auto id = created["session_id"].get<std::string>();
  ASSERT_EQ(created["participants"].size(), 2u);
  const auto ta = created["participants"][0]["token"].get<std::string>();
  const auto tb = created["participants"][1]["token"].get<std::string>();
  EXPECT_NE(created["participants"][0]["url"].get<std::string>().find("/a/" + ta), std::string::npos);

  auto page = client_->Get("/a/" + ta);
  ASSERT_EQ(page->status, 200);
  EXPECT_NE(page->body.find("corae-session"), std::string::npos);
  EXPECT_EQ(page->get_header_value("Content-Type").rfind("text/html", 0), 0u);

  std::mt19937_64 rng(9);
  const auto log_a = gen::random_session(rng, 40.0);
  const auto log_b = gen::random_session(rng, 40.0);

  auto early = client_->Get("/api/sessions/" + id + "/analysis");
  EXPECT_EQ(early->status, 412);

  annotate(ta, "A", log_a);
  annotate(tb, "B", log_b);

  auto summary = json::parse(client_->Get("/api/sessions/" + id)->body);
  EXPECT_EQ(summary["state"], "sealed");
  EXPECT_EQ(summary.dump().find(ta), std::string::npos);

  auto analysis = client_->Get("/api/sessions/" + id + "/analysis?window=10");
  ASSERT_EQ(analysis->status, 200) << analysis->body;
  EXPECT_EQ(analysis->body.find(ta), std::string::npos);
  EXPECT_EQ(analysis->body.find(tb), std::string::npos);
  const auto report = json::parse(analysis->body);
  EXPECT_EQ(report["config"]["window_seconds"], 10.0);
  EXPECT_EQ(report["participants"]["b"], "B");

  auto log = client_->Get("/api/annotator/" + ta + "/log");
  ASSERT_EQ(log->status, 200);
  EXPECT_EQ(log_parse(log->body).records, log_a.records);

  auto bad_query = client_->Get("/api/sessions/" + id + "/analysis?window=abc");
  EXPECT_EQ(bad_query->status, 400);
}

TEST_F(HttpTest, ErrorsCarryStatusAndIndex) {
  const auto created = create_session();
  const auto token = created["participants"][0]["token"].get<std::string>();
  EXPECT_EQ(client_->Get("/a/not-a-token")->status, 403);
  EXPECT_EQ(client_->Get("/api/annotator/not-a-token")->status, 403);
  EXPECT_EQ(client_->Get("/api/sessions/nope")->status, 404);
  EXPECT_EQ(client_->Post("/api/sessions", "{", "application/json")->status, 400);

  ASSERT_EQ(post("/api/annotator/" + token + "/identity", {{"participant_id", "A"}})->status, 200);
  json batch{{"annotations",
              {{{"rating", 0}, {"timecode", "00:00:00:00"}, {"cause", "interval"}},
               {{"rating", 3}, {"timecode", "00:00:00:05"}, {"cause", "change"}}}}};
  auto res = post("/api/annotator/" + token + "/annotations", batch);
  EXPECT_EQ(res->status, 422);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body["index"], 1);
  EXPECT_EQ(body["code"], "invalid");
  EXPECT_TRUE(body["last_timecode"].is_null());

  json stale_setup{{"annotations", {{{"rating", 0}, {"timecode", "00:00:00:00"}, {"cause", "interval"}},
                                    {{"rating", 0}, {"timecode", "00:00:02:00"}, {"cause", "interval"}}}}};
  ASSERT_EQ(post("/api/annotator/" + token + "/annotations", stale_setup)->status, 200);
  json stale{{"annotations", {{{"rating", 1}, {"timecode", "00:00:01:00"}, {"cause", "change"}}}}};
  res = post("/api/annotator/" + token + "/annotations", stale);
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(json::parse(res->body)["last_timecode"], "00:00:02:00");
}

TEST_F(HttpTest, MediaHonoursRange) {
  const auto id = create_session()["session_id"].get<std::string>();
  auto full = client_->Get("/media/" + id);
  ASSERT_EQ(full->status, 200);
  EXPECT_EQ(full->body.size(), 1000u);
  auto part = client_->Get("/media/" + id, {{"Range", "bytes=26-51"}});
  ASSERT_EQ(part->status, 206);
  EXPECT_EQ(part->body, "abcdefghijklmnopqrstuvwxyz");
  EXPECT_EQ(client_->Get("/media/nope")->status, 404);
}

TEST_F(HttpTest, UploadEndpoint) {
  const auto id = create_session()["session_id"].get<std::string>();
  const auto legacy = test::read_text(test::fixture("legacy_pairs.json"));
  auto res = client_->Post("/api/sessions/" + id + "/upload?participant=L1", legacy, "application/json");
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(log_parse(res->body).participant_id, "L1");
}

}  // namespace
}  // namespace corae::service
