#include "depwatch/issues.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "depwatch/errors.hpp"
#include "depwatch/util.hpp"

namespace depwatch {

RepoRef RepoRef::parse(const std::string& spec) {
  std::vector<std::string> parts = split(spec, '/');
  RepoRef ref;
  if (parts.size() == 2) {
    ref = RepoRef{"github.com", parts[0], parts[1]};
  } else if (parts.size() == 3) {
    ref = RepoRef{parts[0], parts[1], parts[2]};
  } else {
    throw ConfigError("repository spec must be owner/name or host/owner/name: " +
                      spec);
  }
  if (ref.owner.empty() || ref.name.empty()) {
    throw ConfigError("repository owner and name must be non-empty: " + spec);
  }
  return ref;
}

std::string to_string(IssueState s) {
  switch (s) {
    case IssueState::Open: return "open";
    case IssueState::Closed: return "closed";
    case IssueState::PullRequest: return "pull_request";
  }
  return "open";
}

IssueRecord normalize(const nlohmann::json& raw, const RepoRef& repo,
                      std::size_t record_index) {
  auto require = [&](const char* field) -> const nlohmann::json& {
    auto it = raw.find(field);
    if (it == raw.end() || it->is_null()) {
      throw IssueSchemaError(std::string("missing mandatory field '") + field +
                                 "'",
                             record_index);
    }
    return *it;
  };

  IssueRecord rec;
  rec.repo = repo;
  const auto& number = require("number");
  if (!number.is_number_integer()) {
    throw IssueSchemaError("field 'number' must be an integer", record_index);
  }
  rec.issue_id = number.get<std::int64_t>();
  if (rec.issue_id <= 0) {
    throw IssueSchemaError("field 'number' must be positive", record_index);
  }
  rec.title = trim(require("title").get<std::string>());
  rec.created_at = require("created_at").get<std::string>();
  auto epoch = parse_iso8601_utc(rec.created_at);
  if (!epoch) {
    throw IssueSchemaError("field 'created_at' is not an ISO-8601 UTC timestamp",
                           record_index);
  }
  rec.created_epoch = *epoch;

  if (auto it = raw.find("body"); it != raw.end() && it->is_string()) {
    rec.body = it->get<std::string>();
  }

  if (auto it = raw.find("pull_request");
      it != raw.end() && !it->is_null()) {
    rec.state = IssueState::PullRequest;
  } else if (auto st = raw.find("state");
             st != raw.end() && st->is_string() &&
             st->get<std::string>() == "closed") {
    rec.state = IssueState::Closed;
  } else {
    rec.state = IssueState::Open;
  }
  return rec;
}

namespace {

class HttplibBackend : public HttpBackend {
 public:
  HttplibBackend(std::string base_url, std::string token)
      : client_(base_url.c_str()), token_(std::move(token)) {
    client_.set_connection_timeout(10);
    client_.set_read_timeout(30);
  }

  HttpReply get(const std::string& path) override {
    httplib::Headers headers{{"Accept", "application/vnd.github+json"},
                             {"User-Agent", "depwatch"}};
    if (!token_.empty()) {
      headers.emplace("Authorization", "token " + token_);
    }
    auto res = client_.Get(path.c_str(), headers);
    if (!res) {
      throw TransportError("HTTP GET " + path + " failed: " +
                           httplib::to_string(res.error()));
    }
    HttpReply reply;
    reply.status = res->status;
    reply.body = res->body;
    for (const auto& [k, v] : res->headers) reply.headers[k] = v;
    return reply;
  }

 private:
  httplib::Client client_;
  std::string token_;
};

std::vector<IssueRecord> finalize(std::vector<IssueRecord> records,
                                  const FetchOptions& options) {
  std::int64_t cutoff = -1;
  if (!options.since.empty()) {
    auto t = parse_iso8601_utc(options.since);
    if (!t) throw ConfigError("invalid --since timestamp: " + options.since);
    cutoff = *t;
  }
  std::vector<IssueRecord> out;
  out.reserve(records.size());
  for (IssueRecord& rec : records) {
    if (cutoff >= 0 && rec.created_epoch < cutoff) continue;
    if (!options.include_pulls && rec.state == IssueState::PullRequest) {
      continue;
    }
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const IssueRecord& a,
                                       const IssueRecord& b) {
    return std::tie(a.created_epoch, a.issue_id) <
           std::tie(b.created_epoch, b.issue_id);
  });
  return out;
}

int rate_wait_seconds(const HttpReply& reply, int cap_s) {
  int wait = 1;
  auto it = reply.headers.find("Retry-After");
  if (it != reply.headers.end()) {
    try {
      wait = std::stoi(it->second);
    } catch (...) {
    }
  } else if (auto reset = reply.headers.find("X-RateLimit-Reset");
             reset != reply.headers.end()) {
    try {
      std::int64_t at = std::stoll(reset->second);
      wait = static_cast<int>(std::max<std::int64_t>(1, at - now_utc()));
    } catch (...) {
    }
  }
  return std::clamp(wait, 1, cap_s);
}

}  // namespace

std::unique_ptr<HttpBackend> make_httplib_backend(const std::string& base_url,
                                                  const std::string& token) {
  return std::make_unique<HttplibBackend>(base_url, token);
}

std::vector<IssueRecord> fetch_issues(HttpBackend& backend, const RepoRef& repo,
                                      const FetchOptions& options) {
  if (options.page_size < 1) {
    throw ConfigError("page_size must be >= 1");
  }
  std::vector<IssueRecord> collected;
  std::map<std::int64_t, bool> seen;
  int page = 1;
  while (true) {
    std::string path = "/repos/" + repo.owner + "/" + repo.name +
                       "/issues?state=all&per_page=" +
                       std::to_string(options.page_size) +
                       "&page=" + std::to_string(page);
    HttpReply reply;
    int attempt = 0;
    while (true) {
      try {
        reply = backend.get(path);
      } catch (const TransportError&) {
        if (attempt >= options.max_retries) throw;
        std::this_thread::sleep_for(
            std::chrono::milliseconds(options.backoff_ms << attempt));
        ++attempt;
        continue;
      }
      if (reply.status == 403 || reply.status == 429) {
        std::this_thread::sleep_for(std::chrono::seconds(
            rate_wait_seconds(reply, options.rate_wait_cap_s)));
        continue;
      }
      if (reply.status >= 500) {
        if (attempt >= options.max_retries) {
          throw TransportError("HTTP " + std::to_string(reply.status) +
                               " from " + path + " after " +
                               std::to_string(attempt + 1) + " attempts");
        }
        std::this_thread::sleep_for(
            std::chrono::milliseconds(options.backoff_ms << attempt));
        ++attempt;
        continue;
      }
      break;
    }
    if (reply.status != 200) {
      throw TransportError("HTTP " + std::to_string(reply.status) + " from " +
                           path);
    }
    nlohmann::json page_json = nlohmann::json::parse(reply.body, nullptr,
                                                     /*allow_exceptions=*/false);
    if (page_json.is_discarded() || !page_json.is_array()) {
      throw TransportError("malformed issue page from " + path);
    }
    std::size_t fresh = 0;
    for (std::size_t i = 0; i < page_json.size(); ++i) {
      IssueRecord rec = normalize(page_json[i], repo, i);
      if (seen.emplace(rec.issue_id, true).second) {
        collected.push_back(std::move(rec));
        ++fresh;
      }
    }
    if (page_json.size() < static_cast<std::size_t>(options.page_size)) break;
    // A full page of nothing but already-seen ids means the server is
    // stuck; stop rather than loop.
    if (fresh == 0) break;
    ++page;
  }
  return finalize(std::move(collected), options);
}

std::vector<IssueRecord> load_fixture(const std::filesystem::path& path,
                                      const RepoRef& repo,
                                      const FetchOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open issue fixture: " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr,
                                             /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw Error("issue fixture must be a JSON array: " + path.string());
  }
  std::vector<IssueRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    records.push_back(normalize(doc[i], repo, i));
  }
  return finalize(std::move(records), options);
}

}  // namespace depwatch
