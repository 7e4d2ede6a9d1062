#include "langdrift/langdrift.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "langdrift/answer_verify.hpp"
#include "langdrift/collapse_sim.hpp"
#include "langdrift/error.hpp"
#include "langdrift/reward_server.hpp"
#include "langdrift/rewards.hpp"
#include "langdrift/script_metrics.hpp"
#include "langdrift/trace_ingest.hpp"

struct ld_composition {
    langdrift::LanguageComposition value;
};

struct ld_experiment {
    langdrift::Report value;
};

struct ld_trace_log {
    langdrift::ParsedRecords value;
};

struct ld_analysis {
    langdrift::Analysis value;
};

struct ld_server {
    explicit ld_server(langdrift::ServerConfig cfg) : value(cfg) {}
    langdrift::RewardServer value;
};

namespace {

thread_local std::string last_error;

ld_status fail(ld_status status, const char* msg) {
    last_error = msg;
    return status;
}

// Runs `fn`, mapping the core exception hierarchy onto status codes.
template <typename Fn>
ld_status guard(Fn&& fn) noexcept {
    try {
        fn();
        return LD_OK;
    } catch (const langdrift::InvalidArgument& e) {
        return fail(LD_ERR_INVALID_ARGUMENT, e.what());
    } catch (const langdrift::ParseError& e) {
        return fail(LD_ERR_PARSE, e.what());
    } catch (const langdrift::IoError& e) {
        return fail(LD_ERR_IO, e.what());
    } catch (const langdrift::FormatError& e) {
        return fail(LD_ERR_FORMAT, e.what());
    } catch (const langdrift::InsufficientData& e) {
        return fail(LD_ERR_INSUFFICIENT_DATA, e.what());
    } catch (const langdrift::NumericError& e) {
        return fail(LD_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(LD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(LD_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    auto* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void require(bool cond, const char* what) {
    if (!cond) throw langdrift::InvalidArgument(what);
}

langdrift::ScriptClass to_script(ld_script s) {
    require(s >= LD_SCRIPT_HANGUL && s <= LD_SCRIPT_OTHER, "script value out of range");
    return static_cast<langdrift::ScriptClass>(s);
}

std::string_view text_of(const char* text, size_t len) {
    require(text != nullptr || len == 0, "text is NULL");
    return text ? std::string_view(text, len) : std::string_view();
}

}  // namespace

extern "C" {

const char* ld_version(void) { return "1.0.0"; }

const char* ld_last_error(void) { return last_error.c_str(); }

void ld_string_free(char* s) { std::free(s); }

ld_status ld_script_from_name(const char* name, ld_script* out) {
    return guard([&] {
        require(name && out, "NULL argument");
        const auto s = langdrift::script_from_name(name);
        if (!s) throw langdrift::ParseError("unknown script name", name);
        *out = static_cast<ld_script>(*s);
    });
}

const char* ld_script_name(ld_script script) {
    if (script < LD_SCRIPT_HANGUL || script > LD_SCRIPT_OTHER) return "";
    return langdrift::script_name(static_cast<langdrift::ScriptClass>(script)).data();
}

ld_status ld_composition_compute(const char* text, size_t len, ld_composition** out) {
    return guard([&] {
        require(out, "out is NULL");
        *out = new ld_composition{langdrift::composition(text_of(text, len))};
    });
}

void ld_composition_free(ld_composition* comp) { delete comp; }

double ld_composition_word_ratio(const ld_composition* comp, ld_script script) {
    if (!comp || script < LD_SCRIPT_HANGUL || script > LD_SCRIPT_OTHER) return 0.0;
    return comp->value.word(static_cast<langdrift::ScriptClass>(script));
}

double ld_composition_char_ratio(const ld_composition* comp, ld_script script) {
    if (!comp || script < LD_SCRIPT_HANGUL || script > LD_SCRIPT_OTHER) return 0.0;
    return comp->value.chars(static_cast<langdrift::ScriptClass>(script));
}

double ld_composition_code_switch_ratio(const ld_composition* comp) { return comp ? comp->value.code_switch_ratio : 0.0; }

size_t ld_composition_counted_tokens(const ld_composition* comp) { return comp ? comp->value.counted_tokens : 0; }

size_t ld_composition_discarded_tokens(const ld_composition* comp) { return comp ? comp->value.discarded_tokens : 0; }

ld_status ld_composition_to_json(const ld_composition* comp, char** out) {
    return guard([&] {
        require(comp && out, "NULL argument");
        *out = dup_string(langdrift::composition_json(comp->value));
    });
}

ld_status ld_extract_answer(const char* completion, size_t len, char** out) {
    return guard([&] {
        require(out, "out is NULL");
        const auto ans = langdrift::extract_answer(text_of(completion, len));
        *out = ans ? dup_string(*ans) : nullptr;
    });
}

ld_status ld_is_correct(const char* completion, size_t len, const char* gold, int* out) {
    return guard([&] {
        require(gold && out, "NULL argument");
        *out = langdrift::is_correct(text_of(completion, len), gold) ? 1 : 0;
    });
}

ld_status ld_combined_reward(const char* completion, size_t len, const char* gold, ld_script target, double lambda,
                             double* out) {
    return guard([&] {
        require(out, "out is NULL");
        langdrift::RewardConfig cfg;
        cfg.target_script = to_script(target);
        cfg.lambda = lambda;
        cfg.validate();
        const auto text = text_of(completion, len);
        *out = gold ? langdrift::combined_reward(text, gold, cfg)
                    : lambda * langdrift::language_consistency_reward(text, cfg.target_script);
    });
}

ld_status ld_experiment_run(const char* preset, uint64_t seed, ld_experiment** out) {
    return guard([&] {
        require(preset && out, "NULL argument");
        *out = new ld_experiment{langdrift::run_experiment(langdrift::parse_preset(preset), seed)};
    });
}

ld_status ld_experiment_write(const ld_experiment* exp, const char* dir) {
    return guard([&] {
        require(exp && dir, "NULL argument");
        langdrift::write_experiment(exp->value, dir);
    });
}

ld_status ld_experiment_summary(const ld_experiment* exp, char** out) {
    return guard([&] {
        require(exp && out, "NULL argument");
        *out = dup_string(langdrift::format_report_summary(exp->value));
    });
}

void ld_experiment_free(ld_experiment* exp) { delete exp; }

void ld_analyze_options_default(ld_analyze_options* opts) {
    if (!opts) return;
    opts->target = LD_SCRIPT_LATIN;
    opts->bucket = langdrift::kDefaultBucket;
    opts->window_steps = langdrift::kDefaultWindowSteps;
    opts->min_drop = langdrift::kDefaultMinDrop;
}

ld_status ld_trace_load(const char* path, ld_trace_log** out) {
    return guard([&] {
        require(path && out, "NULL argument");
        *out = new ld_trace_log{langdrift::parse_records_file(path)};
    });
}

size_t ld_trace_record_count(const ld_trace_log* log) { return log ? log->value.records.size() : 0; }

size_t ld_trace_skipped_count(const ld_trace_log* log) { return log ? log->value.skipped : 0; }

void ld_trace_free(ld_trace_log* log) { delete log; }

ld_status ld_analyze(const ld_trace_log* log, const ld_analyze_options* opts, ld_analysis** out) {
    return guard([&] {
        require(log && opts && out, "NULL argument");
        langdrift::AnalyzeOptions o;
        o.target = to_script(opts->target);
        require(langdrift::is_concrete_script(o.target), "target must be hangul, latin, cjk or cyrillic");
        require(opts->bucket >= 1, "bucket must be >= 1");
        o.bucket = opts->bucket;
        o.window_steps = opts->window_steps;
        require(opts->min_drop > 0.0 && opts->min_drop <= 1.0, "min_drop must be in (0, 1]");
        o.min_drop = opts->min_drop;
        *out = new ld_analysis{langdrift::analyze(log->value, o)};
    });
}

int ld_analysis_has_onset(const ld_analysis* analysis) { return analysis && analysis->value.onset ? 1 : 0; }

ld_status ld_analysis_onset(const ld_analysis* analysis, uint64_t* start_step, uint64_t* end_step, double* drop) {
    return guard([&] {
        require(analysis, "analysis is NULL");
        require(analysis->value.onset.has_value(), "no onset detected");
        const auto& o = *analysis->value.onset;
        if (start_step) *start_step = o.start_step;
        if (end_step) *end_step = o.end_step;
        if (drop) *drop = o.drop;
    });
}

ld_status ld_analysis_write(const ld_analysis* analysis, const char* dir) {
    return guard([&] {
        require(analysis && dir, "NULL argument");
        langdrift::write_report(analysis->value, dir);
    });
}

ld_status ld_analysis_summary(const ld_analysis* analysis, char** out) {
    return guard([&] {
        require(analysis && out, "NULL argument");
        *out = dup_string(langdrift::format_analysis_summary(analysis->value));
    });
}

void ld_analysis_free(ld_analysis* analysis) { delete analysis; }

void ld_server_options_default(ld_server_options* opts) {
    if (!opts) return;
    const langdrift::ServerConfig cfg;
    opts->default_lambda = cfg.default_lambda;
    opts->accuracy_weight = cfg.accuracy_weight;
    opts->max_body_bytes = cfg.max_body_bytes;
}

ld_status ld_server_create(const char* bind, const ld_server_options* opts, ld_server** out) {
    return guard([&] {
        require(out, "out is NULL");
        langdrift::ServerConfig cfg;
        if (opts) {
            require(opts->default_lambda >= 0.0, "default_lambda must be >= 0");
            require(opts->accuracy_weight > 0.0, "accuracy_weight must be > 0");
            cfg.default_lambda = opts->default_lambda;
            cfg.accuracy_weight = opts->accuracy_weight;
            if (opts->max_body_bytes > 0) cfg.max_body_bytes = opts->max_body_bytes;
        }
        std::string addr = langdrift::kDefaultBind;
        if (bind) {
            addr = bind;
        } else if (const char* env = std::getenv(langdrift::kBindEnvVar); env && *env) {
            addr = env;
        }
        auto server = std::make_unique<ld_server>(cfg);
        server->value.bind(langdrift::parse_bind_address(addr));
        *out = server.release();
    });
}

int ld_server_port(const ld_server* server) { return server ? server->value.port() : -1; }

ld_status ld_server_run(ld_server* server) {
    return guard([&] {
        require(server, "server is NULL");
        server->value.run();
    });
}

void ld_server_stop(ld_server* server) {
    if (server) server->value.stop();
}

void ld_server_free(ld_server* server) { delete server; }

}  // extern "C"
