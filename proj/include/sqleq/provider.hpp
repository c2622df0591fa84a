#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "sqleq/judge.hpp"

namespace sqleq {

// Chat-completion provider over HTTP. The request body is standard chat
// shape ({model, temperature, messages: [{role: "user", content: prompt}]});
// the reply is read from choices[0].message.content. The API key is read
// from the environment variable named by api_key_env at call time — keys
// never appear in configuration values or logs.
struct HttpProviderConfig {
  std::string endpoint;  // full URL, e.g. http://host:port/v1/chat/completions
  std::string model = "gpt-4";
  std::string api_key_env = "SQLEQ_API_KEY";
  int timeout_seconds = 30;
  int retry_limit = 3;  // consecutive transport failures before ProviderError
};

class HttpProvider : public ChatProvider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  std::string complete(const std::string& prompt, double temperature) override;

 private:
  HttpProviderConfig config_;
};

// Replays canned responses in order; throws ProviderError when the script is
// exhausted. Used by every test and by offline runs.
class ScriptedProvider : public ChatProvider {
 public:
  explicit ScriptedProvider(std::vector<std::string> responses);

  // Loads one response per line; each line is either a JSON string literal
  // (for responses containing newlines) or taken verbatim.
  static ScriptedProvider from_jsonl(const std::string& path);

  std::string complete(const std::string& prompt, double temperature) override;

  std::size_t calls() const { return calls_; }

 private:
  std::vector<std::string> responses_;
  std::size_t calls_ = 0;
};

// Token-bucket rate limit: at most `rate` acquisitions per second sustained,
// with bursts up to `burst`. Pure logic over an explicit clock so tests can
// drive it with fake timestamps.
class TokenBucket {
 public:
  TokenBucket(double rate_per_second, double burst);

  // Consumes a token if one is available at `now` (seconds, monotonic).
  bool try_acquire(double now);

  // Earliest time at or after `now` when try_acquire would succeed.
  double next_available(double now) const;

 private:
  void refill(double now);

  double rate_;
  double burst_;
  double tokens_;
  double updated_ = 0.0;
  bool started_ = false;
};

// Thread-safe blocking facade over TokenBucket for concurrent judge calls.
class RateLimiter {
 public:
  RateLimiter(double rate_per_second, double burst);

  // Blocks (sleeping) until a token is granted.
  void acquire();

 private:
  std::mutex mutex_;
  TokenBucket bucket_;
};

}  // namespace sqleq
