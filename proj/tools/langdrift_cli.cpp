// langdrift command-line front end. Every subcommand is a thin wrapper over
// the C API in langdrift/langdrift.h.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "langdrift/langdrift.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

int report(ld_status st) {
    if (st == LD_OK) return kExitOk;
    std::cerr << "error: " << ld_last_error() << "\n";
    return st == LD_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
}

// Takes ownership of a C-API string and returns it as std::string.
std::string take(char* s) {
    std::string out = s ? s : "";
    ld_string_free(s);
    return out;
}

bool parse_target(const std::string& name, ld_script& out) {
    if (ld_script_from_name(name.c_str(), &out) != LD_OK || out > LD_SCRIPT_CYRILLIC) {
        std::cerr << "error: unknown target '" << name << "' (valid: hangul, latin, cjk, cyrillic)\n";
        return false;
    }
    return true;
}

int cmd_analyze(const std::string& input, const std::string& target, uint64_t bucket, uint64_t window,
                double min_drop, const std::string& out_dir) {
    ld_analyze_options opts;
    ld_analyze_options_default(&opts);
    if (!parse_target(target, opts.target)) return kExitUsage;
    opts.bucket = bucket;
    opts.window_steps = window;
    opts.min_drop = min_drop;

    ld_trace_log* log = nullptr;
    if (ld_status st = ld_trace_load(input.c_str(), &log); st != LD_OK) return report(st);
    ld_analysis* analysis = nullptr;
    ld_status st = ld_analyze(log, &opts, &analysis);
    ld_trace_free(log);
    if (st != LD_OK) return report(st);

    char* summary = nullptr;
    st = ld_analysis_summary(analysis, &summary);
    if (st == LD_OK) std::cout << take(summary);
    if (st == LD_OK && !out_dir.empty()) st = ld_analysis_write(analysis, out_dir.c_str());
    ld_analysis_free(analysis);
    return report(st);
}

int cmd_simulate(const std::string& preset, uint64_t seed, const std::string& out_dir) {
    ld_experiment* exp = nullptr;
    if (ld_status st = ld_experiment_run(preset.c_str(), seed, &exp); st != LD_OK) return report(st);
    char* summary = nullptr;
    ld_status st = ld_experiment_summary(exp, &summary);
    if (st == LD_OK) std::cout << take(summary);
    if (st == LD_OK && !out_dir.empty()) st = ld_experiment_write(exp, out_dir.c_str());
    ld_experiment_free(exp);
    return report(st);
}

int cmd_verify(const std::string& completion_path, const std::string& gold) {
    std::ifstream f(completion_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open " << completion_path << "\n";
        return kExitData;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    const std::string text = buf.str();

    char* answer = nullptr;
    if (ld_status st = ld_extract_answer(text.data(), text.size(), &answer); st != LD_OK) return report(st);
    const bool have_answer = answer != nullptr;
    const std::string ans = take(answer);
    int correct = 0;
    if (ld_status st = ld_is_correct(text.data(), text.size(), gold.c_str(), &correct); st != LD_OK) return report(st);
    std::cout << "answer: " << (have_answer ? ans : "none") << "\n";
    std::cout << "gold: " << gold << "\n";
    std::cout << "correct: " << (correct ? "true" : "false") << "\n";
    return kExitOk;
}

int cmd_composition(const std::string& text) {
    ld_composition* comp = nullptr;
    if (ld_status st = ld_composition_compute(text.data(), text.size(), &comp); st != LD_OK) return report(st);
    char* json = nullptr;
    ld_status st = ld_composition_to_json(comp, &json);
    ld_composition_free(comp);
    if (st == LD_OK) std::cout << take(json) << "\n";
    return report(st);
}

int cmd_serve(const std::string& bind, double lambda, size_t max_body) {
    ld_server_options opts;
    ld_server_options_default(&opts);
    opts.default_lambda = lambda;
    if (max_body > 0) opts.max_body_bytes = max_body;

    ld_server* server = nullptr;
    if (ld_status st = ld_server_create(bind.empty() ? nullptr : bind.c_str(), &opts, &server); st != LD_OK)
        return report(st);
    std::cerr << "listening on port " << ld_server_port(server) << "\n";

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::atomic<bool> done{false};
    std::thread watcher([&] {
        while (!g_stop.load() && !done.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        ld_server_stop(server);
    });
    const ld_status st = ld_server_run(server);
    done.store(true);
    watcher.join();
    ld_server_free(server);
    return report(st);
}

// Pulls "--config <file>" (or --config=<file>) out of argv and appends the
// file's key=value pairs as flags, skipping keys already given on the command
// line.
bool expand_config(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return true;

    std::ifstream f(path);
    if (!f) {
        std::cerr << "error: cannot open config file " << path << "\n";
        return false;
    }
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(f);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << path << ": " << e.what() << "\n";
        return false;
    }
    for (const auto& item : items) {
        if (item.name.empty() || item.name == "++" || item.name == "--") continue;
        if (!item.parents.empty()) {
            std::cerr << "error: " << path << ": sections are not supported (key '" << item.name << "')\n";
            return false;
        }
        const std::string flag = "--" + item.name;
        bool given = false;
        for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
        if (given) continue;
        args.push_back(flag);
        for (const auto& v : item.inputs) args.push_back(v);
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    if (!expand_config(args)) return kExitUsage;

    CLI::App app{"Measure and simulate reasoning-language drift under RL fine-tuning."};
    app.set_version_flag("--version", std::string(ld_version()));
    app.require_subcommand(1, 1);
    app.footer("Any subcommand accepts --config <file> with key=value lines mirroring its flags.");

    std::string input, target = "latin", out_dir;
    uint64_t bucket = 10, window = 25;
    double min_drop = 0.5;
    auto* analyze = app.add_subcommand("analyze", "Detect target-language drift in a JSONL rollout log");
    analyze->add_option("--input", input, "JSONL file with step/text[/gold/target] records")->required();
    analyze->add_option("--target", target, "Target script: hangul, latin, cjk or cyrillic")->capture_default_str();
    analyze->add_option("--bucket", bucket, "Steps per series point")->capture_default_str()->check(CLI::PositiveNumber);
    analyze->add_option("--window", window, "Detection window in steps")->capture_default_str();
    analyze->add_option("--min-drop", min_drop, "Minimum ratio drop to report")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    analyze->add_option("--out", out_dir, "Write series.csv and summary.txt here");

    std::string preset;
    uint64_t seed = 0;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Run a toy GRPO experiment preset");
    simulate->add_option("--preset", preset, "collapse, mitigation, difficulty or recovery")->required();
    simulate->add_option("--seed", seed, "RNG seed")->capture_default_str();
    simulate->add_option("--out", sim_out, "Write per-run CSVs and summaries here");

    std::string completion, gold;
    auto* verify = app.add_subcommand("verify", "Check a completion's final answer against a gold value");
    verify->add_option("--completion", completion, "File holding the completion text")->required();
    verify->add_option("--gold", gold, "Gold answer")->required();

    std::string text;
    auto* comp = app.add_subcommand("composition", "Print the language composition of a text as JSON");
    comp->add_option("--text", text, "Text to measure")->required();

    std::string bind;
    double lambda = 0.5;
    size_t max_body = 0;
    auto* serve = app.add_subcommand("serve", "Serve rewards over HTTP");
    serve->add_option("--bind", bind, "host:port (default: $LANGDRIFT_BIND or 127.0.0.1:8080)");
    serve->add_option("--lambda", lambda, "Language-consistency weight when a request omits it")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    serve->add_option("--max-body", max_body, "Maximum request body in bytes (default 8 MiB)");

    std::vector<const char*> cargv;
    for (const auto& a : args) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), const_cast<char**>(cargv.data()));
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*analyze) return cmd_analyze(input, target, bucket, window, min_drop, out_dir);
    if (*simulate) return cmd_simulate(preset, seed, sim_out);
    if (*verify) return cmd_verify(completion, gold);
    if (*comp) return cmd_composition(text);
    return cmd_serve(bind, lambda, max_body);
}
