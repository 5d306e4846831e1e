#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "stabias/config.hpp"
#include "stabias/models.hpp"
#include "stabias/solvers.hpp"
#include "stabias/welfare.hpp"

#ifndef STABIAS_VERSION
#define STABIAS_VERSION "1.0.0"
#endif

namespace stabias {

inline constexpr const char* kToolVersion = STABIAS_VERSION;

enum class PointStatus { Ok, Indeterminate, Unstable, Nonconvergent, Failed, NotRun };

inline const char* to_string(PointStatus s) {
    switch (s) {
        case PointStatus::Ok: return "ok";
        case PointStatus::Indeterminate: return "indeterminate";
        case PointStatus::Unstable: return "unstable";
        case PointStatus::Nonconvergent: return "nonconvergent";
        case PointStatus::Failed: return "failed";
        case PointStatus::NotRun: return "not_run";
    }
    return "failed";
}

inline PointStatus status_from(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Indeterminacy: return PointStatus::Indeterminate;
        case ErrorKind::NoStableSolution: return PointStatus::Unstable;
        case ErrorKind::NonConvergence:
        case ErrorKind::NonStationary: return PointStatus::Nonconvergent;
        default: return PointStatus::Failed;
    }
}

struct RegimeSelection {
    bool commitment = true;
    bool discretion = true;
    bool rule_opt = true;
    /// Fixed targeting weights (one, or one per country); replaces rule_opt when set.
    std::optional<std::vector<double>> rule_fixed;
};

struct SweepSpec {
    ModelId model = ModelId::Woodford;
    /// Parameter field names without the model prefix; the first varies slowest.
    std::vector<std::pair<std::string, std::vector<double>>> swept;
    Overrides fixed;
    RegimeSelection regimes;
    std::string output_path;
};

struct ResultRow {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<double> values;
    double loss_commitment = nan;
    double loss_discretion = nan;
    double loss_rule = nan;
    double phi_opt = nan;
    double phi_star_opt = nan;
    double bias = nan;
    double bias_ratio = nan;
    double inflation_equivalent = nan;
    PointStatus commitment = PointStatus::NotRun;
    PointStatus discretion = PointStatus::NotRun;
    PointStatus rule = PointStatus::NotRun;
    std::string message;

    bool ok() const {
        for (PointStatus s : {commitment, discretion, rule})
            if (s != PointStatus::Ok && s != PointStatus::NotRun) return false;
        return true;
    }
};

struct SweepResultTable {
    ModelId model = ModelId::Woodford;
    std::vector<std::string> param_names;
    std::vector<ResultRow> rows;
};

/// Throws UnknownKey for unknown swept or fixed names and InvalidParams for bad grids.
inline void validate_spec(const SweepSpec& spec) {
    const std::string prefix = to_string(spec.model);
    for (const auto& [key, value] : spec.fixed) {
        (void)value;
        if (key.rfind(prefix + ".", 0) != 0 || !is_known_key(key))
            throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "' for model " + prefix);
    }
    for (const auto& [name, grid] : spec.swept) {
        if (!is_known_key(prefix + "." + name))
            throw Error(ErrorKind::UnknownKey, "unknown parameter '" + name + "' for model " + prefix);
        if (grid.empty()) throw Error(ErrorKind::InvalidParams, "grid for '" + name + "' is empty");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::isfinite(grid[i])) throw Error(ErrorKind::InvalidParams, "grid for '" + name + "' not finite");
            if (i > 0 && !(grid[i] > grid[i - 1]))
                throw Error(ErrorKind::InvalidParams, "grid for '" + name + "' is not strictly increasing");
        }
    }
    if (spec.swept.empty()) throw Error(ErrorKind::InvalidParams, "sweep has no swept parameters");
}

/// lo, lo + step, ... up to hi (inclusive within step * 1e-9). Values are lo + i * step.
inline std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
        throw Error(ErrorKind::InvalidParams, "grid needs lo <= hi and step > 0");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    if (n > 1000000) throw Error(ErrorKind::InvalidParams, "grid has too many points");
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

namespace detail {

template <class F>
PointStatus run_regime(ResultRow& row, const char* label, F&& body) {
    try {
        body();
        return PointStatus::Ok;
    } catch (const Error& e) {
        row.message += std::string(row.message.empty() ? "" : "; ") + label + ": " + e.what();
        return status_from(e.kind());
    } catch (const std::exception& e) {
        row.message += std::string(row.message.empty() ? "" : "; ") + label + ": " + e.what();
        return PointStatus::Failed;
    }
}

/// Woodford at w2 = 0 or 1: one sector is flexible and strict targeting of the
/// other attains zero loss under every regime.
inline ResultRow woodford_endpoint(double w2, const RegimeSelection& regimes) {
    ResultRow row;
    if (regimes.commitment) {
        row.loss_commitment = 0.0;
        row.commitment = PointStatus::Ok;
    }
    if (regimes.discretion) {
        row.loss_discretion = 0.0;
        row.discretion = PointStatus::Ok;
    }
    if (regimes.rule_fixed) {
        row.phi_opt = regimes.rule_fixed->front();
        const bool strict = row.phi_opt == (w2 == 0.0 ? 1.0 : 0.0);
        row.loss_rule = strict ? 0.0 : ResultRow::nan;
        row.rule = strict ? PointStatus::Ok : PointStatus::Failed;
        if (!strict) row.message = "rule: only strict targeting is defined at a flexible-price endpoint";
    } else if (regimes.rule_opt) {
        row.loss_rule = 0.0;
        row.phi_opt = w2 == 0.0 ? 1.0 : 0.0;
        row.rule = PointStatus::Ok;
    }
    if (regimes.commitment && regimes.discretion) {
        row.bias = 0.0;
        row.inflation_equivalent = 0.0;
    }
    return row;
}

}  // namespace detail

/// Solves the requested regimes at one parameter point. Never throws Error;
/// failures are recorded in the status flags.
inline ResultRow evaluate_point(ModelId model_id, const Overrides& params, const RegimeSelection& regimes) {
    if (model_id == ModelId::Woodford) {
        const auto it = params.find("woodford.w2");
        if (it != params.end() && (it->second == 0.0 || it->second == 1.0))
            return detail::woodford_endpoint(it->second, regimes);
    }

    ResultRow row;
    LQREModel model;
    try {
        model = model_id == ModelId::Woodford ? build_woodford(woodford_params(params))
                                              : build_liu_pappa(liu_pappa_params(params));
    } catch (const Error& e) {
        row.message = e.what();
        for (PointStatus* s : {&row.commitment, &row.discretion, &row.rule}) *s = PointStatus::Failed;
        if (!regimes.commitment) row.commitment = PointStatus::NotRun;
        if (!regimes.discretion) row.discretion = PointStatus::NotRun;
        if (!regimes.rule_opt && !regimes.rule_fixed) row.rule = PointStatus::NotRun;
        return row;
    }

    std::optional<LossReport> lc, ld;
    if (regimes.commitment)
        row.commitment = detail::run_regime(row, "commitment", [&] {
            lc = unconditional_loss(solve_commitment(model), model);
            row.loss_commitment = lc->total;
        });
    if (regimes.discretion)
        row.discretion = detail::run_regime(row, "discretion", [&] {
            ld = unconditional_loss(solve_discretion(model), model);
            row.loss_discretion = ld->total;
        });
    if (regimes.rule_fixed) {
        row.rule = detail::run_regime(row, "rule", [&] {
            const auto& w = *regimes.rule_fixed;
            const Vector phi = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
            row.loss_rule = unconditional_loss(solve_rule(model, phi), model).total;
            row.phi_opt = phi(0);
            if (phi.size() > 1) row.phi_star_opt = phi(1);
        });
    } else if (regimes.rule_opt) {
        row.rule = detail::run_regime(row, "rule", [&] {
            const int n_weights = model_id == ModelId::LiuPappa ? 2 : 1;
            const RuleOptimum opt = optimize_rule(model, n_weights);
            row.loss_rule = opt.loss;
            row.phi_opt = opt.phi(0);
            if (opt.phi.size() > 1) row.phi_star_opt = opt.phi(1);
        });
    }
    if (lc && ld) {
        const BiasReport b = stabilisation_bias(*ld, *lc);
        row.bias = b.bias;
        row.bias_ratio = b.bias_ratio ? *b.bias_ratio : ResultRow::nan;
        row.inflation_equivalent = b.inflation_equivalent;
    }
    return row;
}

/// Worker cap from STABIAS_THREADS (positive integer), else the available parallelism.
inline int sweep_workers() {
    if (const char* env = std::getenv("STABIAS_THREADS")) {
        const auto v = parse_decimal(env);
        if (v && *v >= 1.0 && *v == std::floor(*v) && *v <= 4096.0) return static_cast<int>(*v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Evaluates the Cartesian product of the swept grids. Rows come back in grid
/// order whatever the number of workers.
inline SweepResultTable run_sweep(const SweepSpec& spec, std::optional<int> workers = std::nullopt) {
    validate_spec(spec);
    const std::string prefix = to_string(spec.model);

    SweepResultTable table;
    table.model = spec.model;
    std::size_t total = 1;
    for (const auto& [name, grid] : spec.swept) {
        table.param_names.push_back(name);
        total *= grid.size();
    }

    std::vector<std::vector<double>> points(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rest = i;
        std::vector<double>& values = points[i];
        values.resize(spec.swept.size());
        for (std::size_t d = spec.swept.size(); d-- > 0;) {
            const auto& grid = spec.swept[d].second;
            values[d] = grid[rest % grid.size()];
            rest /= grid.size();
        }
    }

    table.rows.resize(total);
    auto work = [&](std::size_t i) {
        Overrides params = spec.fixed;
        for (std::size_t d = 0; d < spec.swept.size(); ++d) params[prefix + "." + spec.swept[d].first] = points[i][d];
        ResultRow row = evaluate_point(spec.model, params, spec.regimes);
        row.values = points[i];
        table.rows[i] = std::move(row);
    };

    const int n_workers = std::max(1, std::min<int>(workers.value_or(sweep_workers()), static_cast<int>(total)));
    if (n_workers == 1) {
        for (std::size_t i = 0; i < total; ++i) work(i);
        return table;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < total; i = next++) work(i);
        });
    for (auto& t : pool) t.join();
    return table;
}

/// Twelve significant digits; "nan" for missing values.
inline std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::string to_csv(const CsvTable& t) {
    std::string out;
    for (std::size_t j = 0; j < t.header.size(); ++j) out += (j ? "," : "") + t.header[j];
    out += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) out += (j ? "," : "") + format_value(r[j]);
        out += "\n";
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
}

/// Every column of a sweep, including per-regime status.
inline std::string sweep_to_csv(const SweepResultTable& t) {
    std::string out;
    for (const auto& n : t.param_names) out += n + ",";
    out += "loss_commitment,loss_discretion,loss_rule,phi_opt";
    if (t.model == ModelId::LiuPappa) out += ",phi_star_opt";
    out += ",bias,bias_ratio,infl_equiv,status_commitment,status_discretion,status_rule\n";
    for (const auto& r : t.rows) {
        for (double v : r.values) out += format_value(v) + ",";
        std::vector<double> cols = {r.loss_commitment, r.loss_discretion, r.loss_rule, r.phi_opt};
        if (t.model == ModelId::LiuPappa) cols.push_back(r.phi_star_opt);
        for (double v : {r.bias, r.bias_ratio, r.inflation_equivalent}) cols.push_back(v);
        for (double v : cols) out += format_value(v) + ",";
        out += std::string(to_string(r.commitment)) + "," + to_string(r.discretion) + "," + to_string(r.rule) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Replication presets

enum class PresetId { Fig2, Fig3, Fig4, LpAlpha, LpPhi, LpW2 };

inline const std::vector<PresetId>& all_presets() {
    static const std::vector<PresetId> ids = {PresetId::Fig2,    PresetId::Fig3,  PresetId::Fig4,
                                              PresetId::LpAlpha, PresetId::LpPhi, PresetId::LpW2};
    return ids;
}

inline const char* to_string(PresetId id) {
    switch (id) {
        case PresetId::Fig2: return "fig2";
        case PresetId::Fig3: return "fig3";
        case PresetId::Fig4: return "fig4";
        case PresetId::LpAlpha: return "lp_alpha";
        case PresetId::LpPhi: return "lp_phi";
        case PresetId::LpW2: return "lp_w2";
    }
    return "";
}

/// Accepts "lp_alpha" and "lp-alpha" spellings.
inline std::optional<PresetId> parse_preset_id(std::string s) {
    std::replace(s.begin(), s.end(), '-', '_');
    for (PresetId id : all_presets())
        if (s == to_string(id)) return id;
    return std::nullopt;
}

/// k / d for k = lo..hi, so grid values are the nearest doubles to the decimals.
inline std::vector<double> ratio_grid(int lo, int hi, int d) {
    std::vector<double> out;
    for (int k = lo; k <= hi; ++k) out.push_back(static_cast<double>(k) / d);
    return out;
}

inline const std::vector<double>& persistence_grid() {
    static const std::vector<double> g = {0.5, 0.8, 0.9, 0.95, 0.99};
    return g;
}

inline SweepSpec preset_spec(PresetId id) {
    SweepSpec s;
    switch (id) {
        case PresetId::Fig2:
            s.model = ModelId::Woodford;
            s.swept = {{"w2", ratio_grid(0, 20, 20)}};
            break;
        case PresetId::Fig3:
        case PresetId::Fig4:
            s.model = ModelId::Woodford;
            s.swept = {{"rho", persistence_grid()}, {"w2", ratio_grid(1, 19, 20)}};
            s.regimes.rule_opt = false;
            break;
        case PresetId::LpAlpha:
        case PresetId::LpPhi:
            s.model = ModelId::LiuPappa;
            s.swept = {{"alpha", ratio_grid(1, 9, 10)}, {"alpha_star", ratio_grid(1, 9, 10)}};
            s.regimes.discretion = false;
            break;
        case PresetId::LpW2:
            s.model = ModelId::LiuPappa;
            s.swept = {{"w2", ratio_grid(1, 19, 20)}, {"w2_star", ratio_grid(1, 19, 20)}};
            s.regimes.rule_opt = false;
            break;
    }
    return s;
}

namespace detail {

inline std::string join_values(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + round_trip(v[i]);
    return out;
}

inline std::string regime_list(const RegimeSelection& r) {
    std::string out;
    auto add = [&](const std::string& s) { out += (out.empty() ? "" : " ") + s; };
    if (r.commitment) add("commitment");
    if (r.discretion) add("discretion");
    if (r.rule_fixed)
        add("rule_fixed(" + join_values(*r.rule_fixed) + ")");
    else if (r.rule_opt)
        add("rule_opt");
    return out;
}

}  // namespace detail

/// Metadata as comment lines, then every parameter as a config line, so the
/// file can be fed back to parse_config.
inline std::string manifest_text(PresetId id, const SweepSpec& spec, const std::string& notes = {}) {
    std::string out = "# stabias replication manifest\n";
    out += "# tool_version = " + std::string(kToolVersion) + "\n";
    out += "# preset = " + std::string(to_string(id)) + "\n";
    out += "# model = " + std::string(to_string(spec.model)) + "\n";
    out += "# regimes = " + detail::regime_list(spec.regimes) + "\n";
    for (const auto& [name, grid] : spec.swept) out += "# grid " + name + " = " + detail::join_values(grid) + "\n";
    out += notes;
    out += format_params(spec.model, spec.fixed);
    return out;
}

inline std::vector<std::filesystem::path> write_preset(PresetId id, const SweepSpec& spec,
                                                       const SweepResultTable& t,
                                                       const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& file, const CsvTable& csv) {
        write_text(out_dir / file, to_csv(csv));
        written.push_back(out_dir / file);
    };
    std::string notes;

    switch (id) {
        case PresetId::Fig2: {
            double norm = ResultRow::nan;
            for (const auto& r : t.rows)
                if (r.values[0] == 0.5) norm = r.loss_commitment;
            CsvTable losses{{"w2", "loss_commitment", "loss_discretion", "loss_rule", "phi_opt"}, {}};
            CsvTable bias{{"w2", "bias", "bias_ratio"}, {}};
            for (const auto& r : t.rows) {
                losses.rows.push_back({r.values[0], r.loss_commitment / norm, r.loss_discretion / norm,
                                       r.loss_rule / norm, r.phi_opt});
                bias.rows.push_back({r.values[0], r.bias / norm, r.bias_ratio});
            }
            notes = "# normalization = commitment loss at w2 = 0.5 = " + round_trip(norm) +
                    " (divides losses and bias)\n";
            emit("fig2_losses.csv", losses);
            emit("fig2_bias.csv", bias);
            break;
        }
        case PresetId::Fig3: {
            CsvTable c{{"rho", "w2", "bias_ratio"}, {}};
            for (const auto& r : t.rows) c.rows.push_back({r.values[0], r.values[1], r.bias_ratio});
            emit("fig3_bias_ratio.csv", c);
            break;
        }
        case PresetId::Fig4: {
            CsvTable c{{"rho", "w2", "infl_equiv"}, {}};
            for (const auto& r : t.rows) c.rows.push_back({r.values[0], r.values[1], r.inflation_equivalent});
            emit("fig4_inflation_equivalent.csv", c);
            break;
        }
        case PresetId::LpAlpha: {
            CsvTable c{{"alpha", "alpha_star", "loss_commitment", "loss_rule"}, {}};
            for (const auto& r : t.rows) c.rows.push_back({r.values[0], r.values[1], r.loss_commitment, r.loss_rule});
            emit("lp_alpha_losses.csv", c);
            break;
        }
        case PresetId::LpPhi: {
            CsvTable c{{"alpha", "alpha_star", "phi_opt"}, {}};
            for (const auto& r : t.rows) c.rows.push_back({r.values[0], r.values[1], r.phi_opt});
            emit("lp_phi_opt.csv", c);
            break;
        }
        case PresetId::LpW2: {
            CsvTable c{{"w2", "w2_star", "bias"}, {}};
            for (const auto& r : t.rows) c.rows.push_back({r.values[0], r.values[1], r.bias});
            emit("lp_w2_bias.csv", c);
            break;
        }
    }
    write_text(out_dir / "manifest.txt", manifest_text(id, spec, notes));
    written.push_back(out_dir / "manifest.txt");
    return written;
}

struct ReplicationResult {
    std::vector<std::filesystem::path> files;
    /// Grid points whose status is not ok.
    int failed_points = 0;
};

/// Runs a preset and writes its CSVs and manifest.txt into out_dir.
inline ReplicationResult replicate(PresetId id, const std::filesystem::path& out_dir,
                                   std::optional<int> workers = std::nullopt) {
    const SweepSpec spec = preset_spec(id);
    const SweepResultTable t = run_sweep(spec, workers);
    ReplicationResult out;
    for (const auto& r : t.rows)
        if (!r.ok()) ++out.failed_points;
    out.files = write_preset(id, spec, t, out_dir);
    return out;
}

}  // namespace stabias
