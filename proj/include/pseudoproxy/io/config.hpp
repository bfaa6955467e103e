#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudoproxy/harness.hpp"

namespace pseudoproxy::io {

/// Experiment configuration. Defaults reproduce the published setup.
struct RunConfig {
    std::uint64_t seed = 20110101;
    std::size_t replications = 1000;
    std::size_t series_length = 149;
    std::size_t train_length = 119;
    std::size_t interior_start = 60;
    std::vector<HoldoutKind> holdout{HoldoutKind::end};
    std::size_t n_predictors = 1138;
    double trend_slope = 0.25;
    double target_ar_coef = 0.4;
    double target_innovation_sd = 1.0;
    double predictor_innovation_sd = 1.0;
    std::vector<double> snr_levels{4.0, 2.0, 1.0, 0.5, 0.25, 0.125};
    std::vector<double> ar_levels{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    LassoParams lasso;
    std::size_t workers = 0;

    void validate() const
    {
        if (replications < 1 || series_length < 3 || train_length < 2 || n_predictors < 1) {
            throw std::invalid_argument("config: replications, series_length, train_length and n_predictors "
                                        "must be positive (train_length >= 2)");
        }
        if (train_length >= series_length) {
            throw std::invalid_argument("config: train_length must be smaller than series_length");
        }
        if (holdout.empty()) {
            throw std::invalid_argument("config: holdout list is empty");
        }
        if (snr_levels.empty() && ar_levels.empty()) {
            throw std::invalid_argument("config: no snr_levels or ar_levels");
        }
        for (const double s : snr_levels) {
            if (!(s > 0.0)) {
                throw std::invalid_argument("config: snr levels must be positive");
            }
        }
        for (const double a : ar_levels) {
            if (!(a >= 0.0 && a <= 1.0)) {
                throw std::invalid_argument("config: ar levels must lie in [0, 1]");
            }
        }
        lasso.validate();
        to_grid().params.target.validate();
        for (const auto& h : to_grid().holdouts) {
            h.validate();
        }
    }

    GridConfig to_grid() const
    {
        GridConfig g;
        g.seed = seed;
        g.replications = replications;
        g.snr_levels = snr_levels;
        g.ar_levels = ar_levels;
        g.holdouts.clear();
        const std::size_t test = series_length - train_length;
        for (const HoldoutKind k : holdout) {
            g.holdouts.push_back(k == HoldoutKind::end
                                     ? HoldoutScheme::end_block(series_length, test)
                                     : HoldoutScheme::interior_block(series_length, test, interior_start));
        }
        g.params.target = {series_length, trend_slope, target_ar_coef, target_innovation_sd};
        g.params.n_predictors = n_predictors;
        g.params.predictor_innovation_sd = predictor_innovation_sd;
        g.params.lasso = lasso;
        g.workers = workers;
        return g;
    }
};

namespace detail {

inline double level_from_json(const nlohmann::json& v, const std::string& key)
{
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "Infinity")) {
        return std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("config: " + key + " entries must be numbers or \"inf\"");
}

inline std::vector<double> levels_from_json(const nlohmann::json& v, const std::string& key)
{
    if (!v.is_array()) {
        throw std::invalid_argument("config: " + key + " must be a list");
    }
    std::vector<double> out;
    for (const auto& e : v) {
        out.push_back(level_from_json(e, key));
    }
    return out;
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key)
{
    try {
        return v.get<T>();
    }
    catch (const nlohmann::json::exception&) {
        throw std::invalid_argument("config: bad value for '" + key + "'");
    }
}

}  // namespace detail

/// Applies the keys present in `j` over `base`. Unknown keys are rejected.
inline RunConfig apply_config_json(RunConfig cfg, const nlohmann::json& j)
{
    using detail::get_as;
    if (!j.is_object()) {
        throw std::invalid_argument("config: top level must be an object");
    }
    for (const auto& [key, v] : j.items()) {
        if (key == "seed") cfg.seed = get_as<std::uint64_t>(v, key);
        else if (key == "replications") cfg.replications = get_as<std::size_t>(v, key);
        else if (key == "series_length") cfg.series_length = get_as<std::size_t>(v, key);
        else if (key == "train_length") cfg.train_length = get_as<std::size_t>(v, key);
        else if (key == "interior_start") cfg.interior_start = get_as<std::size_t>(v, key);
        else if (key == "n_predictors") cfg.n_predictors = get_as<std::size_t>(v, key);
        else if (key == "trend_slope") cfg.trend_slope = get_as<double>(v, key);
        else if (key == "target_ar_coef") cfg.target_ar_coef = get_as<double>(v, key);
        else if (key == "target_innovation_sd") cfg.target_innovation_sd = get_as<double>(v, key);
        else if (key == "predictor_innovation_sd") cfg.predictor_innovation_sd = get_as<double>(v, key);
        else if (key == "workers") cfg.workers = get_as<std::size_t>(v, key);
        else if (key == "snr_levels") cfg.snr_levels = detail::levels_from_json(v, key);
        else if (key == "ar_levels") cfg.ar_levels = detail::levels_from_json(v, key);
        else if (key == "holdout") {
            cfg.holdout.clear();
            if (v.is_string()) {
                cfg.holdout.push_back(parse_holdout(v.get<std::string>()));
            }
            else {
                for (const auto& h : v) {
                    cfg.holdout.push_back(parse_holdout(get_as<std::string>(h, key)));
                }
            }
        }
        else if (key == "lasso") {
            if (!v.is_object()) {
                throw std::invalid_argument("config: 'lasso' must be an object");
            }
            for (const auto& [lk, lv] : v.items()) {
                const std::string name = "lasso." + lk;
                if (lk == "lambda_fraction") cfg.lasso.lambda_fraction = get_as<double>(lv, name);
                else if (lk == "path_points") cfg.lasso.path_points = get_as<std::size_t>(lv, name);
                else if (lk == "tol") cfg.lasso.tol = get_as<double>(lv, name);
                else if (lk == "max_sweeps") cfg.lasso.max_sweeps = get_as<std::size_t>(lv, name);
                else if (lk == "standardize") cfg.lasso.standardize = get_as<bool>(lv, name);
                else if (lk == "fit_intercept") cfg.lasso.fit_intercept = get_as<bool>(lv, name);
                else if (lk == "exact_active_solve") cfg.lasso.exact_active_solve = get_as<bool>(lv, name);
                else throw std::invalid_argument("config: unknown key '" + name + "'");
            }
        }
        else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config file '" + path + "': " + e.what());
    }
    return apply_config_json(RunConfig{}, j);
}

}  // namespace pseudoproxy::io
