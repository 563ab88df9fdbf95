#include "corae/service/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "corae/error.hpp"
#include "json.hpp"

namespace corae::service {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view to_string(SessionState state) noexcept {
  switch (state) {
    case SessionState::created: return "created";
    case SessionState::annotating: return "annotating";
    case SessionState::sealed: return "sealed";
  }
  return "unknown";
}

SessionState parse_session_state(std::string_view text) {
  if (text == "created") return SessionState::created;
  if (text == "annotating") return SessionState::annotating;
  if (text == "sealed") return SessionState::sealed;
  throw Error("unknown session state '" + std::string(text) + "'");
}

std::string manifest_to_json(const SessionManifest& m) {
  ordered_json doc;
  doc["session_id"] = m.session_id;
  doc["media"] = {{"path", m.media.path},
                  {"frame_rate", m.media.frame_rate.fps()},
                  {"duration_seconds", m.media.duration_seconds}};
  doc["scale"] = {{"min", m.scale.min},
                  {"max", m.scale.max},
                  {"labels", {{"min", m.scale.min_label}, {"neutral", m.scale.neutral_label}, {"max", m.scale.max_label}}}};
  doc["policy"] = {{"interval_seconds", m.policy.interval_seconds}, {"log_on_change", m.policy.log_on_change}};
  doc["max_media_seconds"] = m.max_media_seconds;
  doc["state"] = to_string(m.state);
  auto slots = ordered_json::array();
  for (const auto& s : m.slots) {
    slots.push_back({{"token", s.token}, {"participant_id", s.participant_id}, {"completed", s.completed}});
  }
  doc["slots"] = std::move(slots);
  return doc.dump(2) + "\n";
}

SessionManifest manifest_from_json(std::string_view text) {
  try {
    const auto doc = ordered_json::parse(text.begin(), text.end());
    SessionManifest m;
    m.session_id = doc.at("session_id").get<std::string>();
    const auto& media = doc.at("media");
    m.media.path = media.at("path").get<std::string>();
    m.media.frame_rate = FrameRate(media.at("frame_rate").get<int>());
    m.media.duration_seconds = media.at("duration_seconds").get<double>();
    const auto& scale = doc.at("scale");
    m.scale.min = scale.at("min").get<int>();
    m.scale.max = scale.at("max").get<int>();
    const auto& labels = scale.at("labels");
    m.scale.min_label = labels.at("min").get<std::string>();
    m.scale.neutral_label = labels.at("neutral").get<std::string>();
    m.scale.max_label = labels.at("max").get<std::string>();
    m.policy.interval_seconds = doc.at("policy").at("interval_seconds").get<double>();
    m.policy.log_on_change = doc.at("policy").at("log_on_change").get<bool>();
    m.max_media_seconds = doc.at("max_media_seconds").get<double>();
    m.state = parse_session_state(doc.at("state").get<std::string>());
    for (const auto& s : doc.at("slots")) {
      m.slots.push_back({s.at("token").get<std::string>(), s.at("participant_id").get<std::string>(),
                         s.at("completed").get<bool>()});
    }
    return m;
  } catch (const ordered_json::exception& e) {
    throw Error(std::string("corrupt session manifest: ") + e.what());
  }
}

namespace {

[[noreturn]] void io_fail(const std::string& what, const fs::path& path) {
  throw Error(what + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view bytes, const fs::path& path) {
  while (!bytes.empty()) {
    const ssize_t n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write failed for", path);
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

// Write to a temporary sibling, fsync, then rename over the target.
void atomic_write(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("cannot open", tmp);
  write_all(fd, bytes, tmp);
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_fail("fsync failed for", tmp);
  }
  ::close(fd);
  fs::rename(tmp, path);
  fsync_dir(path.parent_path());
}

std::optional<std::string> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

FileSessionStore::FileSessionStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "sessions");
}

fs::path FileSessionStore::session_dir(const std::string& session_id) const { return root_ / "sessions" / session_id; }

std::vector<std::string> FileSessionStore::list_sessions() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool FileSessionStore::exists(const std::string& session_id) const {
  return fs::exists(session_dir(session_id) / "manifest.json");
}

void FileSessionStore::write_manifest(const SessionManifest& manifest) {
  atomic_write(session_dir(manifest.session_id) / "manifest.json", manifest_to_json(manifest));
}

SessionManifest FileSessionStore::read_manifest(const std::string& session_id) const {
  const auto path = session_dir(session_id) / "manifest.json";
  auto text = slurp(path);
  if (!text) throw Error("cannot read " + path.string());
  return manifest_from_json(*text);
}

void FileSessionStore::append_batch(const std::string& session_id, const std::string& token,
                                    std::span<const AnnotationRecord> records) {
  const auto dir = session_dir(session_id) / "slots";
  fs::create_directories(dir);
  const auto path = dir / (token + ".wal");

  std::string line = "{\"records\":[";
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i) line += ',';
    line += "{\"rating\":" + std::to_string(records[i].rating.value) + ",\"timecode\":\"" +
            records[i].timecode.to_string() + "\",\"cause\":\"" + std::string(to_string(records[i].cause)) + "\"}";
  }
  line += "]}\n";

  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("cannot open", path);
  write_all(fd, line, path);
  if (::fdatasync(fd) != 0) {
    ::close(fd);
    io_fail("fsync failed for", path);
  }
  ::close(fd);
}

std::vector<std::vector<AnnotationRecord>> FileSessionStore::read_batches(const std::string& session_id,
                                                                          const std::string& token,
                                                                          FrameRate rate) const {
  std::vector<std::vector<AnnotationRecord>> out;
  auto text = slurp(session_dir(session_id) / "slots" / (token + ".wal"));
  if (!text) return out;

  std::size_t pos = 0;
  while (pos < text->size()) {
    const std::size_t nl = text->find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail: never acknowledged
    const std::string_view line(text->data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    try {
      const auto doc = ordered_json::parse(line.begin(), line.end());
      std::vector<AnnotationRecord> batch;
      for (const auto& r : doc.at("records")) {
        batch.push_back({Rating{r.at("rating").get<int>()},
                         Timecode::parse(r.at("timecode").get<std::string>(), rate),
                         parse_record_cause(r.at("cause").get<std::string>())});
      }
      out.push_back(std::move(batch));
    } catch (const std::exception&) {
      break;  // a damaged line ends the journal
    }
  }
  return out;
}

void FileSessionStore::write_log_file(const std::string& session_id, const std::string& token,
                                      std::string_view bytes) {
  atomic_write(session_dir(session_id) / "slots" / (token + ".json"), bytes);
}

std::optional<std::string> FileSessionStore::read_log_file(const std::string& session_id,
                                                           const std::string& token) const {
  return slurp(session_dir(session_id) / "slots" / (token + ".json"));
}

}  // namespace corae::service
