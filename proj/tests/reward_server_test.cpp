#include <gtest/gtest.h>

#include <fstream>
#include <future>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "langdrift/answer_verify.hpp"
#include "langdrift/error.hpp"
#include "langdrift/reward_server.hpp"
#include "langdrift/rewards.hpp"
#include "server_expectations.hpp"

using namespace langdrift;
using nlohmann::json;
using testing_support::expected_response;
using testing_support::frozen_requests;

namespace {

json body_of(const HttpReply& r) { return json::parse(r.body); }

class LiveServer : public ::testing::Test {
protected:
    void SetUp() override {
        server_ = std::make_unique<RewardServer>(cfg_);
        port_ = server_->bind({"127.0.0.1", 0});
        thread_ = std::thread([this] { server_->run(); });
        for (int i = 0; i < 200 && !server_->running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    void TearDown() override {
        server_->stop();
        thread_.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(30, 0);
        return c;
    }

    ServerConfig cfg_;
    std::unique_ptr<RewardServer> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace

TEST(Handlers, Health) {
    const auto r = handle_health();
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(body_of(r), json({{"status", "ok"}}));
}

TEST(Handlers, CompositionExamples) {
    const auto r = handle_composition(R"({"texts":["hello world","Привіт hello",""]})");
    ASSERT_EQ(r.status, 200);
    const auto j = body_of(r)["results"];
    EXPECT_EQ(j[0]["word_ratio"], json({{"latin", 1.0}}));
    EXPECT_EQ(j[1]["word_ratio"], json({{"cyrillic", 0.5}, {"latin", 0.5}}));
    EXPECT_EQ(j[2]["counted_tokens"], 0);
    EXPECT_TRUE(j[2]["word_ratio"].empty());
    EXPECT_TRUE(j[2]["char_ratio"].empty());
}

TEST(Handlers, RewardExamples) {
    auto r = body_of(handle_reward(R"({"completions":["Отже \\boxed{72}"],"target":"cyrillic","lambda":0.5,"golds":["72"]})"));
    EXPECT_EQ(r["results"][0]["reward"], 1.5);
    EXPECT_EQ(r["results"][0]["accuracy"], 1);

    r = body_of(handle_reward(R"({"completions":["Отже \\boxed{72}"],"target":"cyrillic","lambda":1,"golds":[72]})"));
    EXPECT_EQ(r["results"][0]["reward"], 2.0);

    r = body_of(handle_reward(R"({"completions":["Привіт hello"],"target":"cyrillic","lambda":0.4})"));
    EXPECT_DOUBLE_EQ(r["results"][0]["reward"].get<double>(), 0.2);
    EXPECT_TRUE(r["results"][0]["accuracy"].is_null());
    EXPECT_EQ(r["results"][0]["consistency"], 0.5);

    r = body_of(handle_reward(R"({"completions":["so \\boxed{5}"],"target":"cyrillic","golds":["6"]})"));
    EXPECT_EQ(r["results"][0]["reward"], 0.0);
}

TEST(Handlers, DefaultLambdaFromConfig) {
    ServerConfig cfg;
    cfg.default_lambda = 0.25;
    const auto r = body_of(handle_reward(R"({"completions":["hello"],"target":"latin"})", cfg));
    EXPECT_EQ(r["results"][0]["reward"], 0.25);
}

TEST(Handlers, ValidationErrors) {
    struct Case {
        const char* body;
        const char* field;
    };
    const Case cases[] = {
        {R"({"completions":[],"target":"latin"})", "completions"},
        {R"({"target":"latin"})", "completions"},
        {R"({"completions":"x","target":"latin"})", "completions"},
        {R"({"completions":["a",3],"target":"latin"})", "completions[1]"},
        {R"({"completions":["a"],"target":"klingon"})", "target"},
        {R"({"completions":["a"],"target":"other"})", "target"},
        {R"({"completions":["a"]})", "target"},
        {R"({"completions":["a"],"target":"latin","lambda":-1})", "lambda"},
        {R"({"completions":["a"],"target":"latin","lambda":"big"})", "lambda"},
        {R"({"completions":["a","b"],"target":"latin","golds":["1"]})", "golds"},
        {R"({"completions":["a"],"target":"latin","golds":["one"]})", "golds[0]"},
        {R"({"completions":["a"],"target":"latin","golds":[true]})", "golds[0]"},
    };
    for (const auto& c : cases) {
        const auto r = handle_reward(c.body);
        EXPECT_EQ(r.status, 400) << c.body;
        const auto j = body_of(r);
        EXPECT_TRUE(j.contains("error")) << c.body;
        EXPECT_EQ(j.value("field", ""), c.field) << c.body;
    }
    const auto unknown = body_of(handle_reward(R"({"completions":["a"],"target":"klingon"})"));
    EXPECT_NE(unknown["error"].get<std::string>().find("hangul, latin, cjk, cyrillic"), std::string::npos);

    EXPECT_EQ(handle_composition("{").status, 400);
    EXPECT_EQ(handle_composition("[1]").status, 400);
    EXPECT_EQ(handle_composition(R"({"texts":[]})").status, 400);
}

TEST(Handlers, OversizedBody) {
    ServerConfig cfg;
    cfg.max_body_bytes = 16;
    EXPECT_EQ(handle_composition(R"({"texts":["a long enough body"]})", cfg).status, 413);
}

TEST(Handlers, MatchLibraryOnFrozenCorpus) {
    const auto reqs = frozen_requests();
    ASSERT_GE(reqs.size(), 20u);
    const ServerConfig cfg;
    for (const auto& [path, body] : reqs) {
        const auto reply = path == "/v1/composition" ? handle_composition(body.dump(), cfg) : handle_reward(body.dump(), cfg);
        ASSERT_EQ(reply.status, 200) << reply.body;
        EXPECT_EQ(body_of(reply), expected_response(path, body, cfg)) << body.dump();
    }
}

TEST(Handlers, Idempotent) {
    const std::string body = R"({"completions":["Привіт hello \\boxed{2}"],"target":"latin","golds":["2"]})";
    EXPECT_EQ(handle_reward(body).body, handle_reward(body).body);
}

TEST(WireNumber, TwelveSignificantDigits) {
    EXPECT_EQ(wire_number(1.0 / 3.0), 0.333333333333);
    EXPECT_EQ(wire_number(0.5), 0.5);
    EXPECT_EQ(wire_number(2.0), 2.0);
}

TEST(BindAddress, Parse) {
    const auto a = parse_bind_address("0.0.0.0:9000");
    EXPECT_EQ(a.host, "0.0.0.0");
    EXPECT_EQ(a.port, 9000);
    for (const char* bad : {"localhost", ":80", "host:", "host:http", "host:70000", "host:-1"})
        EXPECT_THROW(parse_bind_address(bad), ParseError) << bad;
}

TEST(RewardServerBind, PortInUseIsIoError) {
    RewardServer a;
    const int port = a.bind({"127.0.0.1", 0});
    RewardServer b;
    EXPECT_THROW(b.bind({"127.0.0.1", port}), IoError);
}

TEST_F(LiveServer, HealthAndRoutes) {
    auto c = client();
    auto r = c.Get("/health");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(json::parse(r->body), json({{"status", "ok"}}));

    r = c.Post("/v1/reward", R"({"completions":[],"target":"latin"})", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400);

    r = c.Get("/nope");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 404);
    EXPECT_TRUE(json::parse(r->body).contains("error"));
}

TEST_F(LiveServer, RejectsHugeBody) {
    auto c = client();
    const std::string big = "{\"texts\":[\"" + std::string(kDefaultMaxBody + 10, 'a') + "\"]}";
    auto r = c.Post("/v1/composition", big, "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 413);
}

TEST_F(LiveServer, MatchesLibraryOverHttp) {
    auto c = client();
    for (const auto& [path, body] : frozen_requests()) {
        auto r = c.Post(path, body.dump(), "application/json");
        ASSERT_TRUE(r);
        ASSERT_EQ(r->status, 200);
        EXPECT_EQ(json::parse(r->body), expected_response(path, body, cfg_));
    }
}

TEST_F(LiveServer, ConcurrentIdenticalRequests) {
    const std::string body =
        R"({"completions":["Отже відповідь \\boxed{72}","모델was good 72","hello"],"target":"cyrillic","golds":["72","72","1"]})";
    const auto expected = handle_reward(body, cfg_).body;
    std::vector<std::future<std::string>> futures;
    for (int i = 0; i < 100; ++i)
        futures.push_back(std::async(std::launch::async, [&] {
            auto c = client();
            auto r = c.Post("/v1/reward", body, "application/json");
            if (!r) return std::string("request failed: ") + httplib::to_string(r.error());
            return r->status == 200 ? r->body : "status " + std::to_string(r->status);
        }));
    for (auto& f : futures) EXPECT_EQ(f.get(), expected);
}
