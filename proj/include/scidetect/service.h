#ifndef SCIDETECT_SERVICE_H_
#define SCIDETECT_SERVICE_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace scidetect {

inline constexpr std::string_view kServiceVersion = "scidetect-service/1.0";

struct ServiceConfig {
  int port = 8080;  // 0 binds an ephemeral port
  std::string host = "127.0.0.1";
  // Holds corpora/*.jsonl, models/*.json and sessions/.
  std::filesystem::path data_dir;
  std::optional<std::filesystem::path> static_dir;
  std::size_t max_sessions = 64;
};

// Throws ValidationError for a port outside [0, 65535] or max_sessions 0.
void validate_config(const ServiceConfig& config);

// JSON-over-HTTP facade for sessions, analysis and projections. Sessions are
// written to data_dir/sessions after every mutating request and restored on
// construction.
class Service {
 public:
  // Throws IoError when data_dir is unreadable.
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Returns the bound port. Throws IoError when the port is unavailable.
  int bind();
  // Serves until stop(); call bind() first.
  void run();
  void stop();

  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace scidetect

#endif  // SCIDETECT_SERVICE_H_
