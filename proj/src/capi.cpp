#include "weakflow/weakflow.h"

#include <memory>
#include <string>

#include "config.hpp"
#include "render.hpp"
#include "runner.hpp"

using weakflow::Error;
using weakflow::KeyValueConfig;
using weakflow::RecordTable;
using weakflow::Status;

struct wf_config {
    KeyValueConfig values;
};

struct wf_result {
    explicit wf_result(RecordTable t) : table(std::move(t)) {}
    RecordTable table;
    std::string rendered_csv;
    std::string rendered_json;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_error_kind;

wf_status record_error(const Error& e) {
    g_last_error = e.what();
    g_last_error_kind = e.kind();
    return static_cast<wf_status>(static_cast<int>(e.status()));
}

wf_status record_error(const std::exception& e) {
    g_last_error = e.what();
    g_last_error_kind = "Internal";
    return WF_ERR_NUMERIC;
}

template <typename Fn>
wf_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        g_last_error_kind.clear();
        return WF_OK;
    } catch (const Error& e) {
        return record_error(e);
    } catch (const std::exception& e) {
        return record_error(e);
    }
}

}  // namespace

extern "C" {

const char* wf_version(void) { return "weakflow 1.0.0"; }

wf_config* wf_config_new(void) { return new (std::nothrow) wf_config; }

void wf_config_free(wf_config* config) { delete config; }

wf_status wf_config_set(wf_config* config, const char* key, const char* value) {
    if (!config || !key || !value) {
        g_last_error = "null argument to wf_config_set";
        g_last_error_kind = "ConfigError";
        return WF_ERR_CONFIG;
    }
    return guarded([&] { config->values.set(key, value); });
}

wf_status wf_config_load_file(wf_config* config, const char* path) {
    if (!config || !path) {
        g_last_error = "null argument to wf_config_load_file";
        g_last_error_kind = "ConfigError";
        return WF_ERR_CONFIG;
    }
    return guarded([&] { config->values.load_file(path); });
}

wf_status wf_run(const wf_config* config, const char* command, wf_result** out_result) {
    if (!config || !command || !out_result) {
        g_last_error = "null argument to wf_run";
        g_last_error_kind = "ConfigError";
        return WF_ERR_CONFIG;
    }
    *out_result = nullptr;
    return guarded([&] {
        RecordTable table = weakflow::run_command(command, config->values);
        *out_result = new wf_result(std::move(table));
    });
}

size_t wf_result_rows(const wf_result* result) { return result ? result->table.rows() : 0; }

size_t wf_result_cols(const wf_result* result) { return result ? result->table.cols() : 0; }

const char* wf_result_column(const wf_result* result, size_t index) {
    if (!result || index >= result->table.cols()) return nullptr;
    return result->table.field(index).name.c_str();
}

const char* wf_result_render(wf_result* result, const char* format) {
    if (!result || !format) return nullptr;
    const std::string fmt(format);
    try {
        if (fmt == "csv") {
            if (result->rendered_csv.empty())
                result->rendered_csv = weakflow::render_csv(result->table);
            return result->rendered_csv.c_str();
        }
        if (fmt == "json") {
            if (result->rendered_json.empty())
                result->rendered_json = weakflow::render_json(result->table);
            return result->rendered_json.c_str();
        }
    } catch (const Error& e) {
        record_error(e);
        return nullptr;
    } catch (const std::exception& e) {
        record_error(e);
        return nullptr;
    }
    g_last_error = "unknown render format '" + fmt + "' (expected csv or json)";
    g_last_error_kind = "ConfigError";
    return nullptr;
}

void wf_result_free(wf_result* result) { delete result; }

const char* wf_last_error(void) { return g_last_error.c_str(); }

const char* wf_last_error_kind(void) { return g_last_error_kind.c_str(); }

}  // extern "C"
