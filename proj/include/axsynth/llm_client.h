#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace axsynth {

struct ChatConfig {
  std::string base_url;
  std::string api_key;
  std::string model_name;
  double timeout_seconds = 60;
  int max_retries = 3;
  int max_concurrency = 4;
  double temperature = 0;
  double backoff_initial_seconds = 1.0;

  // Reads CHAT_API_BASE, CHAT_API_KEY and CHAT_MODEL; other fields keep their
  // defaults.
  static ChatConfig from_env();

  // Throws ValidationError on a non-positive timeout, negative retries or
  // concurrency below 1.
  void validate() const;
};

struct ChatRequest {
  std::string prompt;
  // PNG bytes, base64 encoded, sent as an image part when present.
  std::optional<std::string> image_base64;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;

  // Returns the first message text. Throws ClientError on failure.
  virtual std::string complete(const ChatRequest& request) = 0;
  std::string complete(std::string prompt) {
    return complete(ChatRequest{std::move(prompt), std::nullopt});
  }

  virtual int max_concurrency() const { return 1; }
};

// JSON body of a chat-completion request. Byte-identical for equal inputs.
std::string build_chat_request_body(const ChatConfig& cfg,
                                    const ChatRequest& request);

// Extracts choices[0].message.content. Throws ClientError otherwise.
std::string parse_chat_response_body(std::string_view body);

// POSTs to {base_url}/chat/completions. Transport errors, 429 and 5xx are
// retried with exponential backoff; at most max_concurrency calls are in
// flight at once.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(ChatConfig cfg);
  ~HttpChatClient() override;

  using ChatClient::complete;
  std::string complete(const ChatRequest& request) override;
  int max_concurrency() const override { return cfg_.max_concurrency; }

  const ChatConfig& config() const { return cfg_; }

 private:
  ChatConfig cfg_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::counting_semaphore<1 << 20> slots_;
};

// Canned responses loaded from JSONL rows {"match": substring, "response":
// text}. The first row whose match occurs in the prompt wins; a row without
// "match" is the default. No hit raises ClientError. A row may carry
// "error": true to simulate a transport failure.
class MockChatClient : public ChatClient {
 public:
  struct Entry {
    std::optional<std::string> match;
    std::string response;
    bool error = false;
  };

  explicit MockChatClient(std::vector<Entry> entries, int max_concurrency = 4);
  MockChatClient(MockChatClient&& other) noexcept;
  static MockChatClient from_jsonl(std::string_view text, int max_concurrency = 4);
  static MockChatClient load(const std::filesystem::path& path, int max_concurrency = 4);

  using ChatClient::complete;
  std::string complete(const ChatRequest& request) override;
  int max_concurrency() const override { return max_concurrency_; }

  std::size_t call_count() const;

 private:
  std::vector<Entry> entries_;
  int max_concurrency_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

}  // namespace axsynth
