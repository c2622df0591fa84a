#include "sqleq/provider.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sqleq {

namespace {

// Splits a full URL into the scheme://host[:port] base httplib expects and
// the request path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  std::size_t scheme = endpoint.find("://");
  std::size_t path_start =
      endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {}

std::string HttpProvider::complete(const std::string& prompt, double temperature) {
  if (config_.endpoint.empty()) throw ProviderError("no endpoint configured");
  auto [base, path] = split_endpoint(config_.endpoint);

  nlohmann::json body = {
      {"model", config_.model},
      {"temperature", temperature},
      {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"}, {"content", prompt}}})},
  };
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_failure = "no attempts made";
  int attempts = std::max(1, config_.retry_limit);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);

    httplib::Result result = client.Post(path, headers, payload, "application/json");
    if (!result) {
      last_failure = "transport failure: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 400 && result->status < 500) {
      // Client errors will not improve on retry (bad key, bad request).
      throw ProviderError("HTTP " + std::to_string(result->status) + ": " + result->body);
    }
    if (result->status != 200) {
      last_failure = "HTTP " + std::to_string(result->status);
      continue;
    }
    nlohmann::json parsed = nlohmann::json::parse(result->body, nullptr, false);
    if (parsed.is_discarded()) {
      last_failure = "response body is not JSON";
      continue;
    }
    try {
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      last_failure = "response lacks choices[0].message.content";
      continue;
    }
  }
  throw ProviderError(last_failure + " after " + std::to_string(attempts) + " attempts");
}

ScriptedProvider::ScriptedProvider(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

ScriptedProvider ScriptedProvider::from_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputFormatError(path, 0, "cannot open scripted responses file");
  std::vector<std::string> responses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_string())
      responses.push_back(parsed.get<std::string>());
    else
      responses.push_back(line);
    (void)line_no;
  }
  return ScriptedProvider(std::move(responses));
}

std::string ScriptedProvider::complete(const std::string& prompt, double temperature) {
  (void)prompt;
  (void)temperature;
  if (calls_ >= responses_.size())
    throw ProviderError("scripted responses exhausted after " + std::to_string(calls_) +
                        " calls");
  return responses_[calls_++];
}

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(burst), tokens_(burst) {
  if (rate_ <= 0.0 || burst_ < 1.0)
    throw InputFormatError("rate limiter", 0, "require rate > 0 and burst >= 1");
}

void TokenBucket::refill(double now) {
  if (!started_) {
    started_ = true;
    updated_ = now;
    return;
  }
  if (now > updated_) {
    tokens_ = std::min(burst_, tokens_ + (now - updated_) * rate_);
    updated_ = now;
  }
}

bool TokenBucket::try_acquire(double now) {
  refill(now);
  if (tokens_ >= 1.0) {
    tokens_ -= 1.0;
    return true;
  }
  return false;
}

double TokenBucket::next_available(double now) const {
  double tokens = tokens_;
  if (started_ && now > updated_) tokens = std::min(burst_, tokens + (now - updated_) * rate_);
  if (tokens >= 1.0) return now;
  return now + (1.0 - tokens) / rate_;
}

RateLimiter::RateLimiter(double rate_per_second, double burst) : bucket_(rate_per_second, burst) {}

void RateLimiter::acquire() {
  using clock = std::chrono::steady_clock;
  auto seconds_now = [] {
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
  };
  for (;;) {
    double wait = 0.0;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      double now = seconds_now();
      if (bucket_.try_acquire(now)) return;
      wait = bucket_.next_available(now) - now;
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(std::max(wait, 0.001)));
  }
}

}  // namespace sqleq
