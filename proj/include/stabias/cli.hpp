#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stabias/experiments.hpp"

namespace stabias {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitFailure = 2 };

namespace detail {

inline Overrides load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidParams, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

/// "lo:hi:step".
inline std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> parts;
    std::size_t pos = 0;
    while (true) {
        const auto colon = text.find(':', pos);
        const auto v = parse_decimal(std::string_view(text).substr(pos, colon - pos));
        if (!v) throw Error(ErrorKind::InvalidParams, "grid must be lo:hi:step, got '" + text + "'");
        parts.push_back(*v);
        if (colon == std::string::npos) break;
        pos = colon + 1;
    }
    if (parts.size() != 3) throw Error(ErrorKind::InvalidParams, "grid must be lo:hi:step, got '" + text + "'");
    return make_grid(parts[0], parts[1], parts[2]);
}

inline std::vector<double> parse_phi(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        const auto v = parse_decimal(std::string_view(text).substr(pos, comma - pos));
        if (!v) throw Error(ErrorKind::InvalidParams, "--phi expects v or v,v; got '" + text + "'");
        out.push_back(*v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError:
        case ErrorKind::UnknownKey:
        case ErrorKind::InvalidParams:
        case ErrorKind::InvalidModel: return kExitUsage;
        default: return kExitFailure;
    }
}

inline void print_solution(std::ostream& out, ModelId model_id, const std::string& policy,
                           const PolicySolution& sol, const LossReport& loss) {
    out.precision(12);
    out << "model = " << to_string(model_id) << "\n";
    out << "policy = " << policy << "\n";
    if (sol.rule_weights) {
        out << "phi =";
        for (Eigen::Index i = 0; i < sol.rule_weights->size(); ++i) out << ' ' << (*sol.rule_weights)(i);
        out << "\n";
    }
    out << "loss = " << loss.total << "\n";
    for (std::size_t i = 0; i < loss.by_target.size(); ++i)
        out << "loss." << loss.target_names[i] << " = " << loss.by_target[i] << "\n";
    out << "residual = " << sol.diagnostics.residual << "\n";
    if (sol.regime == Regime::Discretion) out << "iterations = " << sol.diagnostics.iterations << "\n";
}

}  // namespace detail

/// Entry point of the `stabias` tool. Returns 0 on success, 1 on usage or
/// input errors, 2 on solver or I/O failure.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Stabilisation-bias experiments for linear-quadratic monetary policy models", "stabias"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string model_name, policy, phi_text, config_path, param, grid_text, out_path, figure;

    auto* solve = app.add_subcommand("solve", "Solve one model under one policy regime and print its loss");
    solve->add_option("--model", model_name, "woodford | liu-pappa")->required()
        ->check(CLI::IsMember({"woodford", "liu-pappa", "liu_pappa"}));
    solve->add_option("--policy", policy, "commitment | discretion | rule")->required()
        ->check(CLI::IsMember({"commitment", "discretion", "rule"}));
    solve->add_option("--phi", phi_text, "Targeting weight(s) v or v,v; optimized when omitted");
    solve->add_option("--config", config_path, "key = value parameter file");

    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write a CSV of every regime");
    sweep->add_option("--model", model_name, "woodford | liu-pappa")->required()
        ->check(CLI::IsMember({"woodford", "liu-pappa", "liu_pappa"}));
    sweep->add_option("--param", param, "Parameter field name, e.g. rho")->required();
    sweep->add_option("--grid", grid_text, "lo:hi:step")->required();
    sweep->add_option("--config", config_path, "key = value parameter file");
    sweep->add_option("--out", out_path, "Output CSV path")->required();

    auto* repl = app.add_subcommand("replicate", "Write the CSVs behind a figure");
    repl->add_option("--figure", figure, "fig2 | fig3 | fig4 | lp-alpha | lp-phi | lp-w2 | all")->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4", "lp-alpha", "lp-phi", "lp-w2", "lp_alpha", "lp_phi",
                               "lp_w2", "all"}));
    repl->add_option("--out", out_path, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*solve) {
            const ModelId model_id = *parse_model_id(model_name);
            const Overrides params = detail::load_config(config_path);
            const LQREModel model = model_id == ModelId::Woodford ? build_woodford(woodford_params(params))
                                                                  : build_liu_pappa(liu_pappa_params(params));
            PolicySolution sol;
            if (policy == "commitment") {
                sol = solve_commitment(model);
            } else if (policy == "discretion") {
                sol = solve_discretion(model);
            } else if (!phi_text.empty()) {
                const std::vector<double> w = detail::parse_phi(phi_text);
                sol = solve_rule(model, Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
            } else {
                sol = optimize_rule(model, model_id == ModelId::LiuPappa ? 2 : 1).solution;
            }
            detail::print_solution(out, model_id, policy, sol, unconditional_loss(sol, model));
            return kExitOk;
        }

        if (*sweep) {
            SweepSpec spec;
            spec.model = *parse_model_id(model_name);
            spec.fixed = detail::load_config(config_path);
            for (auto it = spec.fixed.begin(); it != spec.fixed.end();)
                it = it->first.rfind(std::string(to_string(spec.model)) + ".", 0) == 0 ? std::next(it)
                                                                                         : spec.fixed.erase(it);
            if (!is_known_key(std::string(to_string(spec.model)) + "." + param))
                throw Error(ErrorKind::UnknownKey, "unknown parameter '" + param + "' for model " +
                                                       to_string(spec.model));
            spec.swept = {{param, detail::parse_grid(grid_text)}};
            spec.output_path = out_path;
            const SweepResultTable t = run_sweep(spec);
            write_text(out_path, sweep_to_csv(t));
            int failed = 0;
            for (const auto& r : t.rows)
                if (!r.ok()) ++failed;
            if (failed > 0) err << "warning: " << failed << " grid point(s) flagged; see status columns\n";
            out << out_path << "\n";
            return kExitOk;
        }

        std::vector<PresetId> ids;
        if (figure == "all")
            ids = all_presets();
        else
            ids = {*parse_preset_id(figure)};
        for (PresetId id : ids) {
            const std::filesystem::path dir =
                figure == "all" ? std::filesystem::path(out_path) / to_string(id) : std::filesystem::path(out_path);
            const ReplicationResult r = replicate(id, dir);
            for (const auto& f : r.files) out << f.string() << "\n";
            if (r.failed_points > 0)
                err << "warning: " << to_string(id) << ": " << r.failed_points << " grid point(s) flagged\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return detail::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace stabias
