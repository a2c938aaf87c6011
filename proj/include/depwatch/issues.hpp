#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace depwatch {

struct RepoRef {
  std::string host;   // e.g. "github.com"
  std::string owner;
  std::string name;

  std::string full() const { return host + "/" + owner + "/" + name; }

  /// Parses "host/owner/name" or "owner/name" (host defaults to github.com).
  static RepoRef parse(const std::string& spec);

  auto operator<=>(const RepoRef&) const = default;
};

enum class IssueState { Open, Closed, PullRequest };

std::string to_string(IssueState s);

struct IssueRecord {
  RepoRef repo;
  std::int64_t issue_id = 0;
  std::string title;
  std::string body;
  std::string created_at;           // ISO-8601 UTC, as received
  std::int64_t created_epoch = 0;   // parsed form, used for ordering
  IssueState state = IssueState::Open;

  auto operator<=>(const IssueRecord&) const = default;
};

/// Maps one REST API issue object to an IssueRecord. Requires number,
/// title, and created_at; a missing mandatory field throws IssueSchemaError.
/// A present pull_request marker wins over the state field.
IssueRecord normalize(const nlohmann::json& raw, const RepoRef& repo,
                      std::size_t record_index = 0);

struct HttpReply {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};

/// Transport seam: the real client and test mocks implement this.
class HttpBackend {
 public:
  virtual ~HttpBackend() = default;
  virtual HttpReply get(const std::string& path) = 0;
};

/// cpp-httplib backed client. The auth token, when present, is sent as an
/// Authorization header.
std::unique_ptr<HttpBackend> make_httplib_backend(const std::string& base_url,
                                                  const std::string& token);

struct FetchOptions {
  std::string since;          // ISO date or timestamp; empty = no cutoff
  int page_size = 100;
  int max_retries = 3;
  int backoff_ms = 250;       // doubled per retry
  int rate_wait_cap_s = 30;   // upper bound honored for server wait hints
  bool include_pulls = true;
};

/// All issues with created_at >= since, fully paginated, ordered by
/// (created_at, issue_id). Transient failures are retried with exponential
/// backoff; rate-limit responses wait per the server hint and resume.
/// Exhausting the retry budget throws TransportError.
std::vector<IssueRecord> fetch_issues(HttpBackend& backend, const RepoRef& repo,
                                      const FetchOptions& options = {});

/// Offline twin of fetch_issues: a JSON array file in the API issue shape,
/// run through the same normalization, filtering, and ordering.
std::vector<IssueRecord> load_fixture(const std::filesystem::path& path,
                                      const RepoRef& repo,
                                      const FetchOptions& options = {});

}  // namespace depwatch
