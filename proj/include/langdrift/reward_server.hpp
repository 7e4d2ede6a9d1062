#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "langdrift/script_metrics.hpp"

namespace langdrift {

inline constexpr std::size_t kDefaultMaxBody = 8u << 20;  // 8 MiB
inline constexpr const char* kBindEnvVar = "LANGDRIFT_BIND";
inline constexpr const char* kDefaultBind = "127.0.0.1:8080";

struct ServerConfig {
    double default_lambda = 0.5;  // used when a request omits "lambda"
    double accuracy_weight = 1.0;
    std::size_t max_body_bytes = kDefaultMaxBody;
};

struct HttpReply {
    int status = 200;
    std::string body;
};

// Wire numbers carry at most 12 significant digits.
double wire_number(double x);

// JSON object for one composition, as served by /v1/composition.
std::string composition_json(const LanguageComposition& comp);

// Pure request handlers; the HTTP layer only routes to them.
HttpReply handle_health();
HttpReply handle_composition(std::string_view body, const ServerConfig& cfg = {});
HttpReply handle_reward(std::string_view body, const ServerConfig& cfg = {});

struct BindAddress {
    std::string host;
    int port = 0;
};

// "host:port" (port 0 picks a free port). Throws ParseError.
BindAddress parse_bind_address(std::string_view addr);

class RewardServer {
public:
    explicit RewardServer(ServerConfig cfg = {});
    ~RewardServer();
    RewardServer(const RewardServer&) = delete;
    RewardServer& operator=(const RewardServer&) = delete;

    // Throws IoError naming the address on failure. Returns the bound port.
    int bind(const BindAddress& addr);
    int port() const noexcept;

    // Blocks serving requests until stop(); in-flight requests complete.
    void run();
    void stop();
    bool running() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace langdrift
