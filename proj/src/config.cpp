#include "sboa/config.hpp"

#include "sboa/error.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace sboa {

using nlohmann::json;

const std::vector<MonthDay>& default_holiday_candidates() {
    static const std::vector<MonthDay> c{{1, 12}, {4, 17}, {8, 1}, {9, 18}, {12, 11}, {12, 18}};
    return c;
}

PipelineConfig::PipelineConfig() {
    holiday.candidates = default_holiday_candidates();
    boa.feedback_delay = 2;
}

std::size_t PipelineConfig::lead_days() const {
    return selection.burn_in + selection.validation + static_cast<std::size_t>(boa.feedback_delay) - 1;
}

namespace {

json number(double v) {
    if (std::isinf(v) && v > 0) {
        return "inf";
    }
    return v;
}

double read_number(const json& j, std::string_view what) {
    if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "Inf")) {
        return std::numeric_limits<double>::infinity();
    }
    if (!j.is_number()) {
        throw ConfigError(fmt::format("'{}' must be a number", what));
    }
    return j.get<double>();
}

std::vector<double> read_numbers(const json& j, std::string_view what) {
    if (!j.is_array()) {
        throw ConfigError(fmt::format("'{}' must be a list", what));
    }
    std::vector<double> out;
    for (const auto& v : j) {
        out.push_back(read_number(v, what));
    }
    return out;
}

template <class T>
T read_as(const json& j, std::string_view what) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("'{}' has the wrong type", what));
    }
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!j.is_object()) {
        throw ConfigError(fmt::format("'{}' must be an object", where));
    }
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (auto a : allowed) {
            ok = ok || k == a;
        }
        if (!ok) {
            throw ConfigError(fmt::format("unknown config key '{}{}{}'", where, where.empty() ? "" : ".", k));
        }
    }
}

json holiday_json(const HolidayConfig& h) {
    json c = json::array();
    for (const auto& md : h.candidates) {
        c.push_back(format_month_day(md));
    }
    return {{"candidates", c},
            {"lag_min", h.lag_min},
            {"lag_max", h.lag_max},
            {"relu_probs", h.relu_probs},
            {"alpha_count", h.alpha_count},
            {"alpha_ratio", h.alpha_ratio},
            {"preserve_residuals", h.preserve_residuals},
            {"tol", h.lasso.tol},
            {"max_sweeps", h.lasso.max_sweeps}};
}

json pool_json(const PoolConfig& p) {
    json fam = json::array(), sc = json::array();
    for (auto f : p.families) {
        fam.push_back(std::string(family_name(f)));
    }
    for (auto s : p.scales) {
        sc.push_back(std::string(scale_name(s)));
    }
    json alphas = json::array();
    for (double a : p.lasso_hd.alphas) {
        alphas.push_back(a);
    }
    return {{"families", fam},
            {"windows", p.windows},
            {"scales", sc},
            {"ar_max_order", p.ar_max_order},
            {"log_response_scale", p.log_response_scale},
            {"alpha_grid", alphas},
            {"additive_basis", p.additive.n_basis},
            {"additive_ridge_grid", p.additive.ridge_grid},
            {"stl_seasonal_span", p.stl.seasonal_span},
            {"stl_trend_span", p.stl.trend_span}};
}

} // namespace

json to_json(const PipelineConfig& c) {
    json lambdas = json::array();
    for (double l : c.lambda_grid) {
        lambdas.push_back(number(l));
    }
    json j = {{"input", c.input},
              {"output_dir", c.output_dir},
              {"cache_dir", c.cache_dir},
              {"anchor_hour", c.anchor_hour},
              {"holiday", holiday_json(c.holiday)},
              {"pool", pool_json(c.pool)},
              {"lambda_grid", lambdas},
              {"rho", c.rho},
              {"burn_in", c.selection.burn_in},
              {"validation", c.selection.validation},
              {"max_experts", c.selection.max_experts},
              {"eta_variant", std::string(eta_variant_name(c.boa.eta_variant))},
              {"weight_floor", c.boa.weight_floor},
              {"regret_forget", c.boa.regret_forget},
              {"simplex_repair", c.boa.simplex_repair},
              {"feedback_delay", c.boa.feedback_delay},
              {"first_issue_day", c.first_issue_day ? json(format_date(*c.first_issue_day)) : json(nullptr)},
              {"test_days", c.test_days},
              {"seed", c.seed},
              {"threads", c.threads}};
    return j;
}

PipelineConfig config_from_json(const json& j, PipelineConfig c) {
    check_keys(j,
               {"input", "output_dir", "cache_dir", "anchor_hour", "holiday", "pool", "lambda_grid", "rho", "burn_in",
                "validation", "max_experts", "eta_variant", "weight_floor", "regret_forget", "simplex_repair",
                "feedback_delay", "first_issue_day", "test_days", "seed", "threads"},
               "");
    auto get = [&](const char* key, auto& target) {
        if (j.contains(key)) {
            target = read_as<std::decay_t<decltype(target)>>(j[key], key);
        }
    };
    get("input", c.input);
    get("output_dir", c.output_dir);
    get("cache_dir", c.cache_dir);
    get("anchor_hour", c.anchor_hour);
    if (j.contains("holiday")) {
        const auto& h = j["holiday"];
        check_keys(h, {"candidates", "lag_min", "lag_max", "relu_probs", "alpha_count", "alpha_ratio",
                       "preserve_residuals", "tol", "max_sweeps"},
                   "holiday");
        if (h.contains("candidates")) {
            c.holiday.candidates.clear();
            for (const auto& s : h["candidates"]) {
                c.holiday.candidates.push_back(parse_month_day(read_as<std::string>(s, "holiday.candidates")));
            }
        }
        if (h.contains("lag_min")) c.holiday.lag_min = read_as<int>(h["lag_min"], "holiday.lag_min");
        if (h.contains("lag_max")) c.holiday.lag_max = read_as<int>(h["lag_max"], "holiday.lag_max");
        if (h.contains("relu_probs")) c.holiday.relu_probs = read_numbers(h["relu_probs"], "holiday.relu_probs");
        if (h.contains("alpha_count")) c.holiday.alpha_count = read_as<int>(h["alpha_count"], "holiday.alpha_count");
        if (h.contains("alpha_ratio")) c.holiday.alpha_ratio = read_number(h["alpha_ratio"], "holiday.alpha_ratio");
        if (h.contains("preserve_residuals"))
            c.holiday.preserve_residuals = read_as<bool>(h["preserve_residuals"], "holiday.preserve_residuals");
        if (h.contains("tol")) c.holiday.lasso.tol = read_number(h["tol"], "holiday.tol");
        if (h.contains("max_sweeps")) c.holiday.lasso.max_sweeps = read_as<long>(h["max_sweeps"], "holiday.max_sweeps");
    }
    if (j.contains("pool")) {
        const auto& p = j["pool"];
        check_keys(p, {"families", "windows", "scales", "ar_max_order", "log_response_scale", "alpha_grid",
                       "additive_basis", "additive_ridge_grid", "stl_seasonal_span", "stl_trend_span"},
                   "pool");
        if (p.contains("families")) {
            c.pool.families.clear();
            for (const auto& f : p["families"]) {
                c.pool.families.push_back(parse_family(read_as<std::string>(f, "pool.families")));
            }
        }
        if (p.contains("windows")) c.pool.windows = read_as<std::vector<int>>(p["windows"], "pool.windows");
        if (p.contains("scales")) {
            c.pool.scales.clear();
            for (const auto& s : p["scales"]) {
                c.pool.scales.push_back(parse_scale(read_as<std::string>(s, "pool.scales")));
            }
        }
        if (p.contains("ar_max_order")) c.pool.ar_max_order = read_as<int>(p["ar_max_order"], "pool.ar_max_order");
        if (p.contains("log_response_scale"))
            c.pool.log_response_scale = read_number(p["log_response_scale"], "pool.log_response_scale");
        if (p.contains("alpha_grid")) c.pool.lasso_hd.alphas = read_numbers(p["alpha_grid"], "pool.alpha_grid");
        if (p.contains("additive_basis"))
            c.pool.additive.n_basis = read_as<int>(p["additive_basis"], "pool.additive_basis");
        if (p.contains("additive_ridge_grid"))
            c.pool.additive.ridge_grid = read_numbers(p["additive_ridge_grid"], "pool.additive_ridge_grid");
        if (p.contains("stl_seasonal_span"))
            c.pool.stl.seasonal_span = read_as<int>(p["stl_seasonal_span"], "pool.stl_seasonal_span");
        if (p.contains("stl_trend_span"))
            c.pool.stl.trend_span = read_as<int>(p["stl_trend_span"], "pool.stl_trend_span");
    }
    if (j.contains("lambda_grid")) c.lambda_grid = read_numbers(j["lambda_grid"], "lambda_grid");
    if (j.contains("rho")) c.rho = read_number(j["rho"], "rho");
    get("burn_in", c.selection.burn_in);
    get("validation", c.selection.validation);
    get("max_experts", c.selection.max_experts);
    if (j.contains("eta_variant")) c.boa.eta_variant = parse_eta_variant(read_as<std::string>(j["eta_variant"], "eta_variant"));
    if (j.contains("weight_floor")) c.boa.weight_floor = read_number(j["weight_floor"], "weight_floor");
    if (j.contains("regret_forget")) c.boa.regret_forget = read_number(j["regret_forget"], "regret_forget");
    get("simplex_repair", c.boa.simplex_repair);
    get("feedback_delay", c.boa.feedback_delay);
    if (j.contains("first_issue_day")) {
        if (j["first_issue_day"].is_null()) {
            c.first_issue_day.reset();
        } else {
            c.first_issue_day = parse_date(read_as<std::string>(j["first_issue_day"], "first_issue_day"));
        }
    }
    get("test_days", c.test_days);
    get("seed", c.seed);
    get("threads", c.threads);
    return c;
}

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config file '{}'", path));
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config file '{}' is not valid JSON: {}", path, e.what()));
    }
    return config_from_json(j, std::move(base));
}

void validate(const PipelineConfig& c) {
    validate_anchor_hour(c.anchor_hour);
    if (c.lambda_grid.empty()) throw ConfigError("lambda_grid is empty");
    for (double l : c.lambda_grid) {
        if (!(l >= 0.0)) throw ConfigError("lambda_grid values must be nonnegative");
    }
    if (c.pool.families.empty() || c.pool.windows.empty() || c.pool.scales.empty()) {
        throw ConfigError("expert pool grids must be nonempty");
    }
    for (int w : c.pool.windows) {
        if (w < 1) throw ConfigError("calibration windows must be positive day counts");
    }
    if (c.pool.lasso_hd.alphas.empty()) throw ConfigError("alpha_grid is empty");
    if (c.pool.additive.ridge_grid.empty()) throw ConfigError("additive_ridge_grid is empty");
    if (!(c.rho >= 0.0 && c.rho < 1.0)) throw ConfigError("rho must be in [0, 1)");
    if (c.selection.validation == 0 || c.selection.max_experts == 0) {
        throw ConfigError("validation and max_experts must be positive");
    }
    if (c.boa.feedback_delay < 1) throw ConfigError("feedback_delay must be at least 1");
    if (c.test_days < 0) throw ConfigError("test_days must be nonnegative");
    if (!(c.boa.weight_floor >= 0.0 && c.boa.weight_floor < 1.0)) throw ConfigError("weight_floor must be in [0, 1)");
    if (!(c.boa.regret_forget >= 0.0 && c.boa.regret_forget < 1.0)) throw ConfigError("regret_forget must be in [0, 1)");
    if (c.holiday.alpha_count < 1 || !(c.holiday.alpha_ratio > 0.0 && c.holiday.alpha_ratio <= 1.0)) {
        throw ConfigError("holiday alpha path needs alpha_count >= 1 and alpha_ratio in (0, 1]");
    }
}

std::string canonical_text(const PipelineConfig& config) { return to_json(config).dump(); }

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
    for (unsigned char ch : bytes) {
        state ^= ch;
        state *= 1099511628211ULL;
    }
    return state;
}

std::uint64_t hash_series(const HourlySeries& series) {
    std::uint64_t h = fnv1a64(format_timestamp(series.start()));
    for (const auto& name : series.channel_names()) {
        h = fnv1a64(name, h);
        const auto v = series.channel(name);
        h = fnv1a64(std::string_view(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double)), h);
    }
    return h;
}

std::uint64_t panel_cache_key(const PipelineConfig& c, std::uint64_t data_hash) {
    json j = to_json(c);
    json shaping = {{"anchor_hour", j["anchor_hour"]},
                    {"holiday", j["holiday"]},
                    {"pool", j["pool"]},
                    {"first_issue_day", j["first_issue_day"]},
                    {"test_days", j["test_days"]},
                    {"lead_days", c.lead_days()}};
    std::uint64_t h = fnv1a64(shaping.dump());
    return fnv1a64(std::string_view(reinterpret_cast<const char*>(&data_hash), sizeof data_hash), h);
}

} // namespace sboa
