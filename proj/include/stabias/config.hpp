#pragma once

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabias/errors.hpp"
#include "stabias/models.hpp"

namespace stabias {

enum class ModelId { Woodford, LiuPappa };

/// Config-file prefix of a model ("woodford", "liu_pappa").
inline const char* to_string(ModelId m) { return m == ModelId::Woodford ? "woodford" : "liu_pappa"; }

/// Accepts "woodford", "liu_pappa" and "liu-pappa".
inline std::optional<ModelId> parse_model_id(std::string_view s) {
    if (s == "woodford") return ModelId::Woodford;
    if (s == "liu_pappa" || s == "liu-pappa") return ModelId::LiuPappa;
    return std::nullopt;
}

/// Dotted key -> value, e.g. {"woodford.rho": 0.9}.
using Overrides = std::map<std::string, double>;

template <class P>
struct ParamField {
    std::string name;
    std::function<void(P&, double)> set;
    /// Empty when an optional field is unset.
    std::function<std::optional<double>(const P&)> get;
};

namespace detail {

template <class P>
ParamField<P> field(const char* name, double P::*member) {
    return {name, [member](P& p, double v) { p.*member = v; },
            [member](const P& p) { return std::optional<double>(p.*member); }};
}

template <class P>
ParamField<P> field(const char* name, std::optional<double> P::*member) {
    return {name, [member](P& p, double v) { p.*member = v; }, [member](const P& p) { return p.*member; }};
}

}  // namespace detail

inline const std::vector<ParamField<WoodfordParams>>& woodford_fields() {
    using P = WoodfordParams;
    using detail::field;
    static const std::vector<ParamField<P>> fields = {
        field("beta", &P::beta),         field("eta", &P::eta),       field("kappa", &P::kappa),
        field("n1", &P::n1),             field("lambda_x", &P::lambda_x), field("lambda_R", &P::lambda_R),
        field("rho", &P::rho),           field("w2", &P::w2),         field("c_rel", &P::c_rel),
        field("sigma_eps", &P::sigma_eps),
    };
    return fields;
}

inline const std::vector<ParamField<LiuPappaParams>>& liu_pappa_fields() {
    using P = LiuPappaParams;
    using detail::field;
    static const std::vector<ParamField<P>> fields = {
        field("beta", &P::beta),
        field("alpha", &P::alpha),
        field("alpha_star", &P::alpha_star),
        field("alpha_tilde", &P::alpha_tilde),
        field("alpha_tilde_star", &P::alpha_tilde_star),
        field("omega", &P::omega),
        field("theta", &P::theta),
        field("kappa_N", &P::kappa_N),
        field("kappa_T", &P::kappa_T),
        field("kappa_N_star", &P::kappa_N_star),
        field("kappa_F_star", &P::kappa_F_star),
        field("rho_a", &P::rho_a),
        field("sigma_a", &P::sigma_a),
        field("w2", &P::w2),
        field("w2_star", &P::w2_star),
        field("kappa_bar", &P::kappa_bar),
        field("kappa_bar_star", &P::kappa_bar_star),
    };
    return fields;
}

template <class P>
const ParamField<P>* find_field(const std::vector<ParamField<P>>& fields, std::string_view name) {
    for (const auto& f : fields)
        if (f.name == name) return &f;
    return nullptr;
}

/// True for "woodford.<field>" and "liu_pappa.<field>" keys.
inline bool is_known_key(std::string_view key) {
    const auto dot = key.find('.');
    if (dot == std::string_view::npos) return false;
    const auto model = parse_model_id(key.substr(0, dot));
    if (!model || key.substr(0, dot) == "liu-pappa") return false;
    const auto name = key.substr(dot + 1);
    return *model == ModelId::Woodford ? find_field(woodford_fields(), name) != nullptr
                                       : find_field(liu_pappa_fields(), name) != nullptr;
}

/// Parses a complete decimal literal; nullopt on trailing junk or non-finite values.
inline std::optional<double> parse_decimal(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::general);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Line-oriented `key = value` text. Blank lines and lines starting with '#'
/// are ignored; later lines override earlier ones.
inline Overrides parse_config(std::string_view text) {
    Overrides out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = detail::trim(text.substr(pos, end - pos));
        ++line_no;
        pos = end + 1;
        if (line.empty() || line.front() == '#') continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view raw = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key");
        const auto value = parse_decimal(raw);
        if (!value) throw ParseError(line_no, "'" + std::string(raw) + "' is not a decimal number");
        if (!is_known_key(key)) throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "' on line " +
                                                                       std::to_string(line_no));
        out[key] = *value;
    }
    return out;
}

template <class P>
void apply_overrides(P& params, const std::vector<ParamField<P>>& fields, const std::string& prefix,
                     const Overrides& overrides) {
    for (const auto& [key, value] : overrides) {
        if (key.rfind(prefix + ".", 0) != 0) continue;
        const auto* f = find_field(fields, std::string_view(key).substr(prefix.size() + 1));
        if (!f) throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "'");
        f->set(params, value);
    }
}

inline WoodfordParams woodford_params(const Overrides& o) {
    WoodfordParams p;
    apply_overrides(p, woodford_fields(), "woodford", o);
    return p;
}

inline LiuPappaParams liu_pappa_params(const Overrides& o) {
    LiuPappaParams p;
    apply_overrides(p, liu_pappa_fields(), "liu_pappa", o);
    return p;
}

/// Shortest decimal that parses back to exactly `v`.
inline std::string round_trip(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

template <class P>
std::string format_fields(const P& params, const std::vector<ParamField<P>>& fields, const std::string& prefix) {
    std::string out;
    for (const auto& f : fields) {
        const auto v = f.get(params);
        if (v) out += prefix + "." + f.name + " = " + round_trip(*v) + "\n";
    }
    return out;
}

}  // namespace detail

/// Config lines for every set parameter of `model` after overrides; parse_config reads them back exactly.
inline std::string format_params(ModelId model, const Overrides& o) {
    return model == ModelId::Woodford ? detail::format_fields(woodford_params(o), woodford_fields(), "woodford")
                                      : detail::format_fields(liu_pappa_params(o), liu_pappa_fields(), "liu_pappa");
}

}  // namespace stabias
