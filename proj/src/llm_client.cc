#include "axsynth/llm_client.h"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "axsynth/errors.h"
#include "axsynth/io.h"
#include "httplib.h"
#include "json_util.h"

namespace axsynth {
namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

// Splits "http://host:port/prefix" into "http://host:port" and "/prefix".
std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("chat base_url must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1 << 20>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1 << 20>& s_;
};

}  // namespace

ChatConfig ChatConfig::from_env() {
  ChatConfig cfg;
  cfg.base_url = env_or_empty("CHAT_API_BASE");
  cfg.api_key = env_or_empty("CHAT_API_KEY");
  cfg.model_name = env_or_empty("CHAT_MODEL");
  return cfg;
}

void ChatConfig::validate() const {
  if (!(timeout_seconds > 0)) throw ValidationError("chat timeout must be > 0");
  if (max_retries < 0) throw ValidationError("chat max_retries must be >= 0");
  if (max_concurrency < 1) throw ValidationError("chat max_concurrency must be >= 1");
  if (!(backoff_initial_seconds >= 0)) {
    throw ValidationError("chat backoff must be >= 0");
  }
}

std::string build_chat_request_body(const ChatConfig& cfg,
                                    const ChatRequest& request) {
  using detail::Json;
  Json message = Json::object();
  message["role"] = "user";
  if (request.image_base64) {
    Json text = Json::object();
    text["type"] = "text";
    text["text"] = request.prompt;
    Json url = Json::object();
    url["url"] = "data:image/png;base64," + *request.image_base64;
    Json image = Json::object();
    image["type"] = "image_url";
    image["image_url"] = std::move(url);
    message["content"] = Json::array({std::move(text), std::move(image)});
  } else {
    message["content"] = request.prompt;
  }
  Json body = Json::object();
  body["model"] = cfg.model_name;
  body["messages"] = Json::array({std::move(message)});
  body["temperature"] = detail::number_to_json(cfg.temperature);
  return body.dump();
}

std::string parse_chat_response_body(std::string_view body) {
  using detail::Json;
  Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ClientError("chat response is not a JSON object");
  }
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw ClientError("chat response has no choices");
  }
  const Json& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") ||
      !first["message"].is_object() || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw ClientError("chat response lacks message content");
  }
  return first["message"]["content"].get<std::string>();
}

HttpChatClient::HttpChatClient(ChatConfig cfg)
    : cfg_(std::move(cfg)), slots_(cfg_.max_concurrency > 0 ? cfg_.max_concurrency : 1) {
  cfg_.validate();
  if (cfg_.base_url.empty()) throw ValidationError("chat base_url is empty");
  std::tie(scheme_host_port_, path_prefix_) = split_base_url(cfg_.base_url);
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const ChatRequest& request) {
  const std::string body = build_chat_request_body(cfg_, request);
  const std::string path = path_prefix_ + "/chat/completions";
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  }

  SlotGuard guard(slots_);
  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = cfg_.backoff_initial_seconds * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    httplib::Client client(scheme_host_port_);
    const auto timeout = std::chrono::duration<double>(cfg_.timeout_seconds);
    const auto secs = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw ClientError("chat request failed with HTTP " + std::to_string(res->status));
    }
    return parse_chat_response_body(res->body);
  }
  throw ClientError("chat request failed after " + std::to_string(cfg_.max_retries) +
                    " retries: " + last_error);
}

MockChatClient::MockChatClient(std::vector<Entry> entries, int max_concurrency)
    : entries_(std::move(entries)), max_concurrency_(max_concurrency) {
  if (max_concurrency_ < 1) throw ValidationError("max_concurrency must be >= 1");
}

MockChatClient::MockChatClient(MockChatClient&& other) noexcept
    : entries_(std::move(other.entries_)),
      max_concurrency_(other.max_concurrency_),
      calls_(other.calls_) {}

MockChatClient MockChatClient::from_jsonl(std::string_view text, int max_concurrency) {
  std::vector<Entry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const detail::Json j = detail::parse_json(line, line_no);
    if (!j.is_object()) throw ParseError("mock entry must be an object", line_no);
    Entry e;
    e.match = detail::optional_string(j, "match", "$", line_no);
    if (j.contains("error")) {
      if (!j["error"].is_boolean()) throw ParseError("\"error\" must be a boolean", line_no);
      e.error = j["error"].get<bool>();
    }
    if (!e.error) e.response = detail::required_string(j, "response", "$", line_no);
    entries.push_back(std::move(e));
  }
  return MockChatClient(std::move(entries), max_concurrency);
}

MockChatClient MockChatClient::load(const std::filesystem::path& path, int max_concurrency) {
  return from_jsonl(read_file(path), max_concurrency);
}

std::string MockChatClient::complete(const ChatRequest& request) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++calls_;
  }
  const Entry* fallback = nullptr;
  for (const Entry& e : entries_) {
    if (!e.match) {
      if (!fallback) fallback = &e;
      continue;
    }
    if (request.prompt.find(*e.match) != std::string::npos) {
      if (e.error) throw ClientError("mock transport failure");
      return e.response;
    }
  }
  if (fallback) {
    if (fallback->error) throw ClientError("mock transport failure");
    return fallback->response;
  }
  throw ClientError("mock client has no response for prompt");
}

std::size_t MockChatClient::call_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

}  // namespace axsynth
