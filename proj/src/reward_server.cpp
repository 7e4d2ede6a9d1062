#include "langdrift/reward_server.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "langdrift/answer_verify.hpp"
#include "langdrift/error.hpp"
#include "langdrift/rewards.hpp"

namespace langdrift {

using nlohmann::json;

namespace {

HttpReply error_reply(int status, const std::string& message, const std::string& field = {}) {
    json j{{"error", message}};
    if (!field.empty()) j["field"] = field;
    return {status, j.dump()};
}

json ratio_map(const std::map<ScriptClass, double>& m) {
    json j = json::object();
    for (const auto& [cls, v] : m) j[std::string(script_name(cls))] = wire_number(v);
    return j;
}

json composition_object(const LanguageComposition& c) {
    return json{
        {"word_ratio", ratio_map(c.word_ratio)},
        {"char_ratio", ratio_map(c.char_ratio)},
        {"code_switch_ratio", wire_number(c.code_switch_ratio)},
        {"counted_tokens", c.counted_tokens},
        {"discarded_tokens", c.discarded_tokens},
    };
}

// Thrown inside handlers for 400 replies.
struct BadRequest {
    std::string message;
    std::string field;
};

json parse_body(std::string_view body) {
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw BadRequest{"body is not valid JSON", ""};
    if (!j.is_object()) throw BadRequest{"body must be a JSON object", ""};
    return j;
}

std::vector<std::string> string_array(const json& body, const char* key, bool allow_empty) {
    const auto it = body.find(key);
    if (it == body.end()) throw BadRequest{std::string("missing '") + key + "'", key};
    if (!it->is_array()) throw BadRequest{std::string("'") + key + "' must be an array of strings", key};
    if (it->empty() && !allow_empty) throw BadRequest{std::string("'") + key + "' must not be empty", key};
    std::vector<std::string> out;
    out.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& v = (*it)[i];
        if (!v.is_string()) throw BadRequest{"expected a string", std::string(key) + "[" + std::to_string(i) + "]"};
        out.push_back(v.get<std::string>());
    }
    return out;
}

template <typename Fn>
HttpReply guarded(std::string_view body, const ServerConfig& cfg, Fn&& fn) {
    if (body.size() > cfg.max_body_bytes) return error_reply(413, "request body exceeds limit");
    try {
        return fn(parse_body(body));
    } catch (const BadRequest& e) {
        return error_reply(400, e.message, e.field);
    } catch (const Error& e) {
        return error_reply(400, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

}  // namespace

double wire_number(double x) {
    if (!std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

std::string composition_json(const LanguageComposition& comp) { return composition_object(comp).dump(); }

HttpReply handle_health() { return {200, R"({"status":"ok"})"}; }

HttpReply handle_composition(std::string_view body, const ServerConfig& cfg) {
    return guarded(body, cfg, [](const json& req) {
        const auto texts = string_array(req, "texts", false);
        json results = json::array();
        for (const auto& t : texts) results.push_back(composition_object(composition(t)));
        return HttpReply{200, json{{"results", std::move(results)}}.dump()};
    });
}

HttpReply handle_reward(std::string_view body, const ServerConfig& cfg) {
    return guarded(body, cfg, [&cfg](const json& req) {
        const auto completions = string_array(req, "completions", false);

        const auto t = req.find("target");
        if (t == req.end() || !t->is_string())
            throw BadRequest{"'target' must be one of hangul, latin, cjk, cyrillic", "target"};
        const auto target = script_from_name(t->get<std::string>());
        if (!target || !is_concrete_script(*target))
            throw BadRequest{"unknown target '" + t->get<std::string>() + "' (valid: hangul, latin, cjk, cyrillic)",
                             "target"};

        RewardConfig rc;
        rc.target_script = *target;
        rc.accuracy_weight = cfg.accuracy_weight;
        rc.lambda = cfg.default_lambda;
        if (auto l = req.find("lambda"); l != req.end() && !l->is_null()) {
            if (!l->is_number()) throw BadRequest{"'lambda' must be a number", "lambda"};
            rc.lambda = l->get<double>();
            if (!(rc.lambda >= 0.0) || !std::isfinite(rc.lambda))
                throw BadRequest{"'lambda' must be a finite value >= 0", "lambda"};
        }

        std::vector<std::string> golds;
        bool have_golds = false;
        if (auto g = req.find("golds"); g != req.end() && !g->is_null()) {
            if (!g->is_array()) throw BadRequest{"'golds' must be an array", "golds"};
            for (std::size_t i = 0; i < g->size(); ++i) {
                const auto& v = (*g)[i];
                const auto field = "golds[" + std::to_string(i) + "]";
                if (v.is_string())
                    golds.push_back(v.get<std::string>());
                else if (v.is_number())
                    golds.push_back(v.dump());
                else
                    throw BadRequest{"expected a string or number", field};
                if (!try_normalize_number(golds.back())) throw BadRequest{"gold is not a decimal number", field};
            }
            if (golds.size() != completions.size())
                throw BadRequest{"'golds' length " + std::to_string(golds.size()) + " does not match 'completions' length " +
                                     std::to_string(completions.size()),
                                 "golds"};
            have_golds = true;
        }

        json results = json::array();
        for (std::size_t i = 0; i < completions.size(); ++i) {
            const auto& text = completions[i];
            const auto comp = composition(text);
            const double consistency = comp.word(rc.target_script);
            json r;
            if (have_golds) {
                r["reward"] = wire_number(combined_reward(text, golds[i], rc));
                r["accuracy"] = static_cast<int>(accuracy_reward(text, golds[i]));
            } else {
                r["reward"] = wire_number(rc.lambda * consistency);
                r["accuracy"] = nullptr;
            }
            r["consistency"] = wire_number(consistency);
            r["composition"] = composition_object(comp);
            results.push_back(std::move(r));
        }
        return HttpReply{200, json{{"results", std::move(results)}}.dump()};
    });
}

BindAddress parse_bind_address(std::string_view addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == addr.size())
        throw ParseError("bind address must be host:port", std::string(addr));
    BindAddress out;
    out.host = std::string(addr.substr(0, colon));
    const auto port_s = addr.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(port_s.data(), port_s.data() + port_s.size(), out.port);
    if (ec != std::errc{} || ptr != port_s.data() + port_s.size() || out.port < 0 || out.port > 65535)
        throw ParseError("invalid port", std::string(port_s));
    return out;
}

struct RewardServer::Impl {
    ServerConfig cfg;
    httplib::Server http;
    int port = -1;
};

RewardServer::RewardServer(ServerConfig cfg) : impl_(std::make_unique<Impl>()) {
    impl_->cfg = cfg;
    auto& http = impl_->http;
    const ServerConfig* c = &impl_->cfg;
    http.set_payload_max_length(cfg.max_body_bytes);
    // httplib also sets SO_REUSEPORT, which would let a second server share
    // the port instead of failing to bind.
    http.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });

    auto send = [](httplib::Response& res, const HttpReply& reply) {
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    };
    http.Get("/health", [send](const httplib::Request&, httplib::Response& res) { send(res, handle_health()); });
    http.Post("/v1/composition", [send, c](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_composition(req.body, *c));
    });
    http.Post("/v1/reward", [send, c](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_reward(req.body, *c));
    });
    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            json j{{"error", httplib::status_message(res.status)}};
            res.set_content(j.dump(), "application/json");
        }
    });
}

RewardServer::~RewardServer() { stop(); }

int RewardServer::bind(const BindAddress& addr) {
    auto& http = impl_->http;
    const int port = addr.port == 0 ? http.bind_to_any_port(addr.host) : (http.bind_to_port(addr.host, addr.port) ? addr.port : -1);
    if (port < 0) throw IoError("cannot bind " + addr.host + ":" + std::to_string(addr.port));
    impl_->port = port;
    return port;
}

int RewardServer::port() const noexcept { return impl_->port; }

void RewardServer::run() {
    if (impl_->port < 0) throw InvalidArgument("server is not bound");
    impl_->http.listen_after_bind();
}

void RewardServer::stop() {
    if (impl_->http.is_running()) impl_->http.stop();
}

bool RewardServer::running() const noexcept { return impl_->http.is_running(); }

}  // namespace langdrift
