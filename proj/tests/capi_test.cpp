#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include "httplib.h"
#include "langdrift/langdrift.h"

namespace {

const std::string kFixtures = LANGDRIFT_FIXTURES;

std::string take(char* s) {
    std::string out = s ? s : "";
    ld_string_free(s);
    return out;
}

ld_composition* compute(const std::string& text) {
    ld_composition* c = nullptr;
    EXPECT_EQ(ld_composition_compute(text.data(), text.size(), &c), LD_OK);
    return c;
}

}  // namespace

TEST(CApi, VersionAndScriptNames) {
    EXPECT_STREQ(ld_version(), "1.0.0");
    ld_script s;
    ASSERT_EQ(ld_script_from_name("cyrillic", &s), LD_OK);
    EXPECT_EQ(s, LD_SCRIPT_CYRILLIC);
    EXPECT_STREQ(ld_script_name(LD_SCRIPT_CODE_SWITCH), "code_switch");
    EXPECT_EQ(ld_script_from_name("klingon", &s), LD_ERR_PARSE);
    EXPECT_NE(std::string(ld_last_error()).find("klingon"), std::string::npos);
    EXPECT_EQ(ld_script_from_name(nullptr, &s), LD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, Composition) {
    auto* c = compute("Привіт hello \\frac 42");
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(ld_composition_word_ratio(c, LD_SCRIPT_CYRILLIC), 0.5);
    EXPECT_EQ(ld_composition_word_ratio(c, LD_SCRIPT_LATIN), 0.5);
    EXPECT_EQ(ld_composition_word_ratio(c, LD_SCRIPT_HANGUL), 0.0);
    EXPECT_NEAR(ld_composition_char_ratio(c, LD_SCRIPT_CYRILLIC), 6.0 / 11.0, 1e-12);
    EXPECT_EQ(ld_composition_code_switch_ratio(c), 0.0);
    EXPECT_EQ(ld_composition_counted_tokens(c), 2u);
    EXPECT_EQ(ld_composition_discarded_tokens(c), 2u);
    char* json = nullptr;
    ASSERT_EQ(ld_composition_to_json(c, &json), LD_OK);
    const auto j = take(json);
    EXPECT_NE(j.find("\"word_ratio\""), std::string::npos);
    EXPECT_NE(j.find("\"cyrillic\":0.5"), std::string::npos);
    ld_composition_free(c);
    ld_composition_free(nullptr);

    EXPECT_EQ(ld_composition_compute(nullptr, 3, &c), LD_ERR_INVALID_ARGUMENT);
    ld_composition* empty = nullptr;
    ASSERT_EQ(ld_composition_compute(nullptr, 0, &empty), LD_OK);
    EXPECT_EQ(ld_composition_counted_tokens(empty), 0u);
    ld_composition_free(empty);
}

TEST(CApi, EmbeddedNulAndLengthRespected) {
    const std::string text("hello\0Привіт", 5 + 1 + 12);
    auto* whole = compute(text);
    auto* head = compute(text.substr(0, 5));
    EXPECT_EQ(ld_composition_word_ratio(head, LD_SCRIPT_LATIN), 1.0);
    EXPECT_LT(ld_composition_word_ratio(whole, LD_SCRIPT_LATIN), 1.0);
    ld_composition_free(whole);
    ld_composition_free(head);
}

TEST(CApi, Answers) {
    const std::string completion = "Отже \\boxed{1,234.50}";
    char* ans = nullptr;
    ASSERT_EQ(ld_extract_answer(completion.data(), completion.size(), &ans), LD_OK);
    EXPECT_EQ(take(ans), "1,234.50");

    const std::string none = "no answer here";
    ans = reinterpret_cast<char*>(1);
    ASSERT_EQ(ld_extract_answer(none.data(), none.size(), &ans), LD_OK);
    EXPECT_EQ(ans, nullptr);

    int ok = -1;
    ASSERT_EQ(ld_is_correct(completion.data(), completion.size(), "1234.5", &ok), LD_OK);
    EXPECT_EQ(ok, 1);
    ASSERT_EQ(ld_is_correct(completion.data(), completion.size(), "1234", &ok), LD_OK);
    EXPECT_EQ(ok, 0);
    EXPECT_EQ(ld_is_correct(completion.data(), completion.size(), "seven", &ok), LD_ERR_PARSE);
    EXPECT_NE(std::string(ld_last_error()).find("seven"), std::string::npos);
}

TEST(CApi, CombinedReward) {
    const std::string c = "Отже \\boxed{72}";
    double r = -1;
    ASSERT_EQ(ld_combined_reward(c.data(), c.size(), "72", LD_SCRIPT_CYRILLIC, 0.5, &r), LD_OK);
    EXPECT_EQ(r, 1.5);
    ASSERT_EQ(ld_combined_reward(c.data(), c.size(), nullptr, LD_SCRIPT_CYRILLIC, 0.5, &r), LD_OK);
    EXPECT_EQ(r, 0.5);
    EXPECT_EQ(ld_combined_reward(c.data(), c.size(), "72", LD_SCRIPT_OTHER, 0.5, &r), LD_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(ld_combined_reward(c.data(), c.size(), "72", LD_SCRIPT_LATIN, -1.0, &r), LD_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(ld_combined_reward(c.data(), c.size(), "72", static_cast<ld_script>(42), 0.5, &r),
              LD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, Experiment) {
    ld_experiment* e = nullptr;
    EXPECT_EQ(ld_experiment_run("warmup", 0, &e), LD_ERR_INVALID_ARGUMENT);
    ASSERT_EQ(ld_experiment_run("collapse", 7, &e), LD_OK);
    char* s = nullptr;
    ASSERT_EQ(ld_experiment_summary(e, &s), LD_OK);
    EXPECT_NE(take(s).find("onset_step: "), std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "langdrift_capi_exp";
    std::filesystem::remove_all(dir);
    ASSERT_EQ(ld_experiment_write(e, dir.c_str()), LD_OK);
    EXPECT_TRUE(std::filesystem::exists(dir / "collapse_default.csv"));
    EXPECT_EQ(ld_experiment_write(e, "/proc/langdrift_nope"), LD_ERR_IO);
    std::filesystem::remove_all(dir);
    ld_experiment_free(e);
}

TEST(CApi, TraceAnalysis) {
    ld_trace_log* log = nullptr;
    EXPECT_EQ(ld_trace_load((kFixtures + "/does_not_exist.jsonl").c_str(), &log), LD_ERR_IO);
    ASSERT_EQ(ld_trace_load((kFixtures + "/planted_drop.jsonl").c_str(), &log), LD_OK);
    EXPECT_EQ(ld_trace_record_count(log), 800u);
    EXPECT_EQ(ld_trace_skipped_count(log), 0u);

    ld_analyze_options opts;
    ld_analyze_options_default(&opts);
    EXPECT_EQ(opts.target, LD_SCRIPT_LATIN);
    opts.target = LD_SCRIPT_CYRILLIC;

    ld_analysis* a = nullptr;
    ASSERT_EQ(ld_analyze(log, &opts, &a), LD_OK);
    ASSERT_EQ(ld_analysis_has_onset(a), 1);
    uint64_t start = 0, end = 0;
    double drop = 0;
    ASSERT_EQ(ld_analysis_onset(a, &start, &end, &drop), LD_OK);
    EXPECT_GE(start, 75u);
    EXPECT_LE(start, 125u);
    EXPECT_GT(end, start);
    EXPECT_GE(drop, 0.5);
    char* s = nullptr;
    ASSERT_EQ(ld_analysis_summary(a, &s), LD_OK);
    EXPECT_NE(take(s).find("onset_start: "), std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "langdrift_capi_analysis";
    std::filesystem::remove_all(dir);
    ASSERT_EQ(ld_analysis_write(a, dir.c_str()), LD_OK);
    EXPECT_FALSE(std::filesystem::is_empty(dir));
    std::filesystem::remove_all(dir);
    ld_analysis_free(a);

    opts.target = LD_SCRIPT_CODE_SWITCH;
    EXPECT_EQ(ld_analyze(log, &opts, &a), LD_ERR_INVALID_ARGUMENT);
    opts.target = LD_SCRIPT_CYRILLIC;
    opts.bucket = 0;
    EXPECT_EQ(ld_analyze(log, &opts, &a), LD_ERR_INVALID_ARGUMENT);
    opts.bucket = 10;
    opts.min_drop = 0.0;
    EXPECT_EQ(ld_analyze(log, &opts, &a), LD_ERR_INVALID_ARGUMENT);

    // The planted fall is 0.93, so demanding a full drop finds nothing.
    opts.min_drop = 1.0;
    ASSERT_EQ(ld_analyze(log, &opts, &a), LD_OK);
    EXPECT_EQ(ld_analysis_has_onset(a), 0);
    EXPECT_EQ(ld_analysis_onset(a, &start, &end, &drop), LD_ERR_INVALID_ARGUMENT);
    ld_analysis_free(a);
    ld_trace_free(log);
}

TEST(CApi, MalformedTraceIsFormatError) {
    const auto path = std::filesystem::temp_directory_path() / "langdrift_capi_bad.jsonl";
    {
        std::ofstream f(path);
        f << "{\"step\": 1, \"text\": \"a\"}\nnot json\nstill not json\n";
    }
    ld_trace_log* log = nullptr;
    EXPECT_EQ(ld_trace_load(path.c_str(), &log), LD_ERR_FORMAT);
    std::filesystem::remove(path);
}

TEST(CApi, ServerLifecycle) {
    ld_server_options opts;
    ld_server_options_default(&opts);
    EXPECT_EQ(opts.default_lambda, 0.5);
    ld_server* srv = nullptr;
    ASSERT_EQ(ld_server_create("127.0.0.1:0", &opts, &srv), LD_OK) << ld_last_error();
    const int port = ld_server_port(srv);
    ASSERT_GT(port, 0);
    std::thread t([srv] { ld_server_run(srv); });

    httplib::Client c("127.0.0.1", port);
    httplib::Result r;
    for (int i = 0; i < 200 && !(r = c.Get("/health")); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);

    ld_server_stop(srv);
    t.join();
    ld_server_free(srv);

    EXPECT_EQ(ld_server_create("127.0.0.1:notaport", nullptr, &srv), LD_ERR_PARSE);
    opts.default_lambda = -1;
    EXPECT_EQ(ld_server_create("127.0.0.1:0", &opts, &srv), LD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ServerBindFromEnvironment) {
    ::setenv("LANGDRIFT_BIND", "127.0.0.1:0", 1);
    ld_server* srv = nullptr;
    ASSERT_EQ(ld_server_create(nullptr, nullptr, &srv), LD_OK) << ld_last_error();
    EXPECT_GT(ld_server_port(srv), 0);
    ld_server_free(srv);

    ::setenv("LANGDRIFT_BIND", "garbage", 1);
    EXPECT_EQ(ld_server_create(nullptr, nullptr, &srv), LD_ERR_PARSE);
    ASSERT_EQ(ld_server_create("127.0.0.1:0", nullptr, &srv), LD_OK);
    ld_server_free(srv);
    ::unsetenv("LANGDRIFT_BIND");
}

TEST(CApi, NullHandlesAreSafe) {
    EXPECT_EQ(ld_composition_counted_tokens(nullptr), 0u);
    EXPECT_EQ(ld_trace_record_count(nullptr), 0u);
    EXPECT_EQ(ld_analysis_has_onset(nullptr), 0);
    EXPECT_EQ(ld_server_port(nullptr), -1);
    char* s = nullptr;
    EXPECT_EQ(ld_experiment_summary(nullptr, &s), LD_ERR_INVALID_ARGUMENT);
    ld_string_free(nullptr);
    ld_server_stop(nullptr);
}
