// weakflow command-line front end. Talks to the shared library exclusively
// through the C API in weakflow/weakflow.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weakflow/weakflow.h"

namespace {

struct ConfigHandle {
    wf_config* ptr = wf_config_new();
    ~ConfigHandle() { wf_config_free(ptr); }
};

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

int fail(wf_status status) {
    std::cerr << "{\"error\":{\"code\":" << static_cast<int>(status) << ",\"kind\":\""
              << json_escape(wf_last_error_kind()) << "\",\"message\":\""
              << json_escape(wf_last_error()) << "\"}}\n";
    return static_cast<int>(status);
}

struct FlagBinding {
    std::string key;
    std::string value;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weakflow: weak values, weak quantum evolution and its validity map"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.set_version_flag("--version", std::string(wf_version()));

    std::string config_path;
    std::string output_path;
    std::string format = "csv";
    std::vector<FlagBinding> bindings;

    app.add_option("--config", config_path, "configuration file (key = value with [section]s)");
    app.add_option("--output", output_path, "write the rendered table to this file");
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto bind = [&](CLI::App* cmd, const char* flag, const char* key, const char* help) {
        auto callback = [&bindings, key](const std::string& value) {
            bindings.push_back({key, value});
        };
        cmd->add_option_function<std::string>(flag, callback, help);
    };

    auto add_common = [&](CLI::App* cmd) {
        bind(cmd, "--theta", "selection.theta", "selection angle in (0, pi/2)");
        bind(cmd, "--overlap-floor", "selection.overlap_floor", "minimum |<f|i>|");
        bind(cmd, "--operator", "operators.weak", "weak observable (sigma_x/sigma_y/sigma_z/identity)");
        bind(cmd, "--strong-operator", "operators.strong", "strong observable");
        bind(cmd, "--eps-a", "coupling.eps_a", "weak pulse strength eps_A(t_end) q_z");
        bind(cmd, "--eps-st-qx", "coupling.eps_st_qx", "strong pulse strength eps_st(t_end) q_x");
        bind(cmd, "--t-end", "grid.t_end", "evolution time");
        bind(cmd, "--steps", "grid.steps", "time grid steps");
        bind(cmd, "--order", "grid.order", "series order (0..8)");
        bind(cmd, "--ensemble", "ensemble.n", "ensemble size N");
        bind(cmd, "--seed", "run.seed", "rng seed (reserved for sampled post-selection)");
        bind(cmd, "--margin-factor", "output.margin_factor", "factor quantifying 'much smaller than'");
    };

    CLI::App* weak_value = app.add_subcommand("weak-value", "A_w = <f|A|i>/<f|i> with anomaly flag");
    add_common(weak_value);

    CLI::App* series = app.add_subcommand(
        "series-compare", "exact Dyson series vs weak-evolution series, order by order");
    add_common(series);

    CLI::App* aav = app.add_subcommand(
        "aav", "spin-1/2 + Gaussian pointer simulation with post-selected readout");
    add_common(aav);
    bind(aav, "--delta", "pointer.delta", "pointer spread");
    bind(aav, "--q0", "pointer.q0", "pointer center");
    bind(aav, "--points", "pointer.n_points", "pointer grid points (power of two >= 256)");
    bind(aav, "--box-halfwidth", "pointer.box_halfwidth", "half-width of the box in units of delta");
    bind(aav, "--eps-list", "pointer.eps_list", "comma-separated coupling strengths");

    CLI::App* regimes = app.add_subcommand(
        "regimes", "validity-window sweep over N, theta and coupling strengths");
    add_common(regimes);
    bind(regimes, "--n-values", "sweep.n_values", "comma-separated ensemble sizes");
    bind(regimes, "--theta-values", "sweep.theta_values", "comma-separated selection angles");
    bind(regimes, "--eps-a-values", "sweep.eps_a_values", "comma-separated weak strengths");
    bind(regimes, "--eps-st-qx-values", "sweep.eps_st_qx_values", "comma-separated strong strengths");
    bind(regimes, "--phase-threshold", "output.phase_threshold", "phase-condition pass level, rad");

    CLI::App* transition = app.add_subcommand(
        "transition", "transition probability as the ratio of two propagators");
    add_common(transition);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "{\"error\":{\"code\":1,\"kind\":\"ConfigError\",\"message\":\""
                  << json_escape(e.what()) << "\"}}\n";
        return 1;
    }

    ConfigHandle config;
    if (!config.ptr) {
        std::cerr << "{\"error\":{\"code\":3,\"kind\":\"Internal\",\"message\":\"allocation failure\"}}\n";
        return 3;
    }
    if (!config_path.empty()) {
        const wf_status status = wf_config_load_file(config.ptr, config_path.c_str());
        if (status != WF_OK) return fail(status);
    }
    // Command-line flags win over the configuration file.
    for (const FlagBinding& b : bindings) {
        const wf_status status = wf_config_set(config.ptr, b.key.c_str(), b.value.c_str());
        if (status != WF_OK) return fail(status);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    wf_result* result = nullptr;
    const wf_status status = wf_run(config.ptr, command.c_str(), &result);
    if (status != WF_OK) return fail(status);

    const char* rendered = wf_result_render(result, format.c_str());
    if (!rendered) {
        wf_result_free(result);
        return fail(WF_ERR_CONFIG);
    }

    int exit_code = 0;
    if (output_path.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out(output_path, std::ios::binary);
        if (!out) {
            std::cerr << "{\"error\":{\"code\":1,\"kind\":\"ConfigError\",\"message\":\"cannot open "
                      << json_escape(output_path) << "\"}}\n";
            exit_code = 1;
        } else {
            out << rendered;
        }
    }
    wf_result_free(result);
    return exit_code;
}
