#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <thread>

#include "corae/log_format.hpp"
#include "corae/service/session_service.hpp"
#include "corae/service/token.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace corae::service {
namespace {

using Code = ServiceError::Code;

template <typename F>
Code code_of(F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ServiceError thrown";
  return Code::bad_request;
}

AnnotationRecord rec(int rating, std::int64_t frame, RecordCause cause = RecordCause::change) {
  return {Rating{rating}, Timecode::from_frames(frame, FrameRate(30)), cause};
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    media_ = dir_ / "clip.mp4";
    test::write_text(media_, "not really a video");
    config_.data_dir = dir_ / "data";
    config_.base_url = "http://test";
    restart();
  }

  void restart() {
    service_.reset();
    service_ = std::make_unique<SessionService>(config_, std::make_unique<FileSessionStore>(config_.data_dir));
  }

  CreatedSession create(std::size_t participants = 2, double seconds = 120.0) {
    CreateSessionRequest request;
    request.media = {media_.string(), FrameRate(30), seconds};
    request.participants = participants;
    return service_->create_session(request);
  }

  // Registers and streams a whole generated log in batches of `batch`.
  void stream(const std::string& token, const AnnotationLog& log, const std::string& pid, std::size_t batch = 7) {
    service_->register_identifier(token, pid);
    for (std::size_t i = 0; i < log.records.size(); i += batch) {
      const auto n = std::min(batch, log.records.size() - i);
      service_->append_annotations(token, std::span(log.records).subspan(i, n));
    }
  }

  test::TempDir dir_;
  std::filesystem::path media_;
  ServiceConfig config_;
  std::unique_ptr<SessionService> service_;
};

TEST_F(ServiceTest, CreateIssuesDistinctTokens) {
  const auto created = create();
  ASSERT_EQ(created.tokens.size(), 2u);
  EXPECT_NE(created.tokens[0], created.tokens[1]);
  EXPECT_TRUE(is_token_shaped(created.tokens[0]));
  EXPECT_EQ(created.urls[0], "http://test/a/" + created.tokens[0]);
  EXPECT_EQ(create(1).tokens.size(), 1u);
  EXPECT_EQ(service_->session_count(), 2u);
}

TEST_F(ServiceTest, CreateRejectsBadMedia) {
  EXPECT_EQ(code_of([&] { create(2, 601.0); }), Code::bad_request);
  EXPECT_EQ(code_of([&] { create(0); }), Code::bad_request);
  CreateSessionRequest request;
  request.media = {(dir_ / "missing.mp4").string(), FrameRate(30), 10.0};
  EXPECT_EQ(code_of([&] { service_->create_session(request); }), Code::bad_request);
}

TEST(TokenTest, TenThousandUnique) {
  std::set<std::string> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(generate_token());
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_FALSE(is_token_shaped("short"));
}

TEST_F(ServiceTest, RegisterIdentifier) {
  const auto created = create();
  EXPECT_EQ(code_of([&] { service_->register_identifier("nope", "P1"); }), Code::unauthorized);
  const auto view = service_->register_identifier(created.tokens[0], "P1");
  EXPECT_TRUE(view.registered);
  EXPECT_EQ(view.participant_id, "P1");
  EXPECT_NO_THROW(service_->register_identifier(created.tokens[0], "P1"));
  EXPECT_EQ(code_of([&] { service_->register_identifier(created.tokens[0], "P2"); }), Code::conflict);
  EXPECT_EQ(code_of([&] { service_->register_identifier(created.tokens[1], ""); }), Code::bad_request);
  EXPECT_EQ(service_->summary(created.session_id).state, SessionState::annotating);
}

TEST_F(ServiceTest, AppendRequiresRegistration) {
  const auto created = create();
  const auto r = rec(0, 0, RecordCause::interval);
  EXPECT_EQ(code_of([&] { service_->append_annotations(created.tokens[0], std::span(&r, 1)); }), Code::precondition);
}

TEST_F(ServiceTest, AppendValidatesAndReportsIndex) {
  const auto created = create();
  const auto& token = created.tokens[0];
  service_->register_identifier(token, "P1");
  const std::vector<AnnotationRecord> good{rec(0, 0, RecordCause::interval), rec(1, 10), rec(1, 30, RecordCause::interval)};
  const auto ack = service_->append_annotations(token, good);
  EXPECT_EQ(ack.accepted, 3u);
  EXPECT_EQ(ack.total_records, 3u);
  EXPECT_EQ(*ack.last_timecode, Timecode::from_frames(30, FrameRate(30)));

  const std::vector<AnnotationRecord> jump{rec(2, 40), rec(4, 45)};
  try {
    service_->append_annotations(token, jump);
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.code(), Code::invalid);
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_EQ(service_->annotator(token).records, 3u);
}

TEST_F(ServiceTest, ReplayIsNoOpAndStaleIsRejected) {
  const auto created = create();
  const auto& token = created.tokens[0];
  service_->register_identifier(token, "P1");
  const std::vector<AnnotationRecord> batch{rec(0, 0, RecordCause::interval), rec(1, 10), rec(2, 20)};
  service_->append_annotations(token, batch);
  const auto again = service_->append_annotations(token, batch);
  EXPECT_EQ(again.accepted, 0u);
  EXPECT_EQ(again.duplicates, 3u);
  EXPECT_EQ(again.total_records, 3u);

  // overlapping replay plus new records
  const std::vector<AnnotationRecord> overlap{rec(2, 20), rec(1, 25)};
  const auto ack = service_->append_annotations(token, overlap);
  EXPECT_EQ(ack.duplicates, 1u);
  EXPECT_EQ(ack.accepted, 1u);

  const std::vector<AnnotationRecord> stale{rec(0, 5)};
  EXPECT_EQ(code_of([&] { service_->append_annotations(token, stale); }), Code::stale);
}

TEST_F(ServiceTest, CompleteSealsSession) {
  const auto created = create();
  service_->register_identifier(created.tokens[0], "P1");
  EXPECT_EQ(code_of([&] { service_->complete_annotation(created.tokens[0]); }), Code::precondition);

  std::mt19937_64 rng(5);
  const auto log_a = gen::random_session(rng, 30.0);
  const auto log_b = gen::random_session(rng, 30.0);
  stream(created.tokens[0], log_a, "P1");
  const auto bytes = service_->complete_annotation(created.tokens[0]);
  EXPECT_EQ(bytes, service_->complete_annotation(created.tokens[0]));
  const auto parsed = log_parse(bytes);
  EXPECT_EQ(parsed.records, log_a.records);
  EXPECT_EQ(parsed.session_id, created.session_id);
  EXPECT_EQ(parsed.participant_id, "P1");
  EXPECT_EQ(service_->summary(created.session_id).state, SessionState::annotating);

  EXPECT_EQ(code_of([&] { service_->get_analysis(created.session_id, {}); }), Code::precondition);

  stream(created.tokens[1], log_b, "P2");
  service_->complete_annotation(created.tokens[1]);
  EXPECT_EQ(service_->summary(created.session_id).state, SessionState::sealed);

  const auto r = rec(0, 9999);
  EXPECT_EQ(code_of([&] { service_->append_annotations(created.tokens[0], std::span(&r, 1)); }), Code::conflict);
  EXPECT_EQ(code_of([&] { service_->upload_log(created.session_id, bytes); }), Code::conflict);

  const auto report = service_->get_analysis(created.session_id, {});
  EXPECT_EQ(report, service_->get_analysis(created.session_id, {}));
  const auto j = nlohmann::json::parse(report);
  EXPECT_EQ(j["participants"]["a"], "P1");
  for (const auto& t : created.tokens) EXPECT_EQ(report.find(t), std::string::npos);
}

TEST_F(ServiceTest, RestartRecoversAckedRecords) {
  const auto created = create();
  std::mt19937_64 rng(11);
  const auto log = gen::random_session(rng, 20.0);
  const auto half = log.records.size() / 2;
  service_->register_identifier(created.tokens[0], "P1");
  service_->append_annotations(created.tokens[0], std::span(log.records).first(half));

  // A torn final line, as left by a crash mid-write.
  const auto wal = config_.data_dir / "sessions" / created.session_id / "slots" / (created.tokens[0] + ".wal");
  ASSERT_TRUE(std::filesystem::exists(wal));
  {
    std::ofstream out(wal, std::ios::app | std::ios::binary);
    out << "{\"records\":[{\"rat";
  }
  restart();

  const auto view = service_->annotator(created.tokens[0]);
  EXPECT_EQ(view.participant_id, "P1");
  EXPECT_EQ(view.records, half);
  // resending everything replays the acked half as duplicates
  const auto ack = service_->append_annotations(created.tokens[0], log.records);
  EXPECT_EQ(ack.duplicates, half);
  EXPECT_EQ(ack.total_records, log.records.size());
  EXPECT_EQ(log_parse(service_->complete_annotation(created.tokens[0])).records, log.records);

  restart();
  EXPECT_TRUE(service_->annotator(created.tokens[0]).completed);
  EXPECT_EQ(service_->session_count(), 1u);
}

TEST_F(ServiceTest, UploadLegacyAndCanonical) {
  const auto created = create(2, 200.0);
  const auto legacy = test::read_text(test::fixture("legacy_pairs.json"));
  const auto stored = service_->upload_log(created.session_id, legacy, std::string("L1"));
  const auto parsed = log_parse(stored);
  EXPECT_EQ(parsed.participant_id, "L1");
  EXPECT_EQ(parsed.session_id, created.session_id);
  EXPECT_EQ(code_of([&] { service_->upload_log(created.session_id, legacy); }), Code::bad_request);

  auto other = gen::log_from_ir(gen::piecewise({{0, 5}, {1, 5}}), "L2");
  other.session_id = created.session_id;
  service_->upload_log(created.session_id, log_serialize(other));
  EXPECT_EQ(service_->summary(created.session_id).state, SessionState::sealed);
  EXPECT_NO_THROW(service_->get_analysis(created.session_id, {}));

  EXPECT_EQ(code_of([&] { service_->upload_log("missing", legacy, std::string("x")); }), Code::not_found);
}

TEST_F(ServiceTest, UploadRejectsMismatchedFrameRate) {
  const auto created = create();
  auto log = gen::log_from_ir(gen::piecewise({{0, 5}}), "P", 25);
  log.session_id = created.session_id;
  EXPECT_EQ(code_of([&] { service_->upload_log(created.session_id, log_serialize(log)); }), Code::invalid);
}

TEST_F(ServiceTest, ConcurrentSlots) {
  const auto created = create();
  std::mt19937_64 rng(3);
  const auto a = gen::random_session(rng, 60.0);
  const auto b = gen::random_session(rng, 60.0);
  std::thread ta([&] { stream(created.tokens[0], a, "A", 3); });
  std::thread tb([&] { stream(created.tokens[1], b, "B", 3); });
  ta.join();
  tb.join();
  EXPECT_EQ(log_parse(service_->download_log(created.tokens[0])).records, a.records);
  EXPECT_EQ(log_parse(service_->download_log(created.tokens[1])).records, b.records);
}

TEST(ServiceConfigTest, ParseAndValidate) {
  const auto c = parse_service_config(R"({"port": 9000, "data_dir": "/tmp/x", "policy": {"interval_seconds": 0.5}})");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.data_dir, "/tmp/x");
  EXPECT_EQ(c.default_policy.interval_seconds, 0.5);
  EXPECT_THROW(parse_service_config(R"({"port": -1})").validate(), Error);
  EXPECT_THROW(parse_service_config("nope"), Error);
}

}  // namespace
}  // namespace corae::service
