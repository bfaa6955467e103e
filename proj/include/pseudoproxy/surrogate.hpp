#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "pseudoproxy/matrix.hpp"
#include "pseudoproxy/random.hpp"

namespace pseudoproxy {

/// Linear trend plus AR(1) noise: y(t) = trend_slope * t + e(t), t = 1..length.
struct TargetSpec {
    std::size_t length = 149;
    double trend_slope = 0.25;
    double ar_coef = 0.4;
    double innovation_sd = 1.0;

    void validate() const
    {
        if (length < 2) {
            throw std::invalid_argument("TargetSpec: length must be at least 2");
        }
        if (!(ar_coef >= 0.0 && ar_coef < 1.0)) {
            throw std::invalid_argument("TargetSpec: ar_coef must lie in [0, 1)");
        }
        if (!(innovation_sd > 0.0) || !std::isfinite(innovation_sd)) {
            throw std::invalid_argument("TargetSpec: innovation_sd must be positive");
        }
        if (!std::isfinite(trend_slope)) {
            throw std::invalid_argument("TargetSpec: trend_slope must be finite");
        }
    }
};

struct TargetSeries {
    Vector values;
    double sample_sd = 0.0;  // population convention, trend included
};

/// Pseudo-proxies are target + white noise with sd = target.sample_sd / snr.
/// snr = +infinity means noiseless copies of the target.
struct ProxyEnsembleSpec {
    std::size_t n_series = 1138;
    double snr = 1.0;

    void validate() const
    {
        if (n_series < 1) {
            throw std::invalid_argument("ProxyEnsembleSpec: n_series must be at least 1");
        }
        if (!(snr > 0.0)) {
            throw std::invalid_argument("ProxyEnsembleSpec: snr must be positive");
        }
    }
};

struct Ar1EnsembleSpec {
    std::size_t n_series = 1138;
    std::size_t length = 149;
    double alpha = 0.0;
    double innovation_sd = 1.0;

    void validate() const
    {
        if (n_series < 1 || length < 1) {
            throw std::invalid_argument("Ar1EnsembleSpec: n_series and length must be positive");
        }
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw std::invalid_argument("Ar1EnsembleSpec: alpha must lie in [0, 1]");
        }
        if (!(innovation_sd > 0.0) || !std::isfinite(innovation_sd)) {
            throw std::invalid_argument("Ar1EnsembleSpec: innovation_sd must be positive");
        }
    }
};

/**
 * Writes one AR(1) path x(t) = alpha * x(t-1) + sd * z(t) into `out`.
 *
 * For alpha < 1 the first value is drawn from the stationary law
 * N(0, sd^2 / (1 - alpha^2)). For alpha == 1 the path is a random walk
 * pinned at 0 for its first value.
 */
template <class Out>
void fill_ar1_path(Out&& out, double alpha, double innovation_sd, NormalStream& stream)
{
    const Eigen::Index n = out.size();
    if (n == 0) {
        return;
    }
    if (alpha < 1.0) {
        out(0) = innovation_sd / std::sqrt(1.0 - alpha * alpha) * stream();
    }
    else {
        out(0) = 0.0;
    }
    for (Eigen::Index t = 1; t < n; ++t) {
        out(t) = alpha * out(t - 1) + innovation_sd * stream();
    }
}

inline TargetSeries gen_target(const TargetSpec& spec, NormalStream& stream)
{
    spec.validate();
    TargetSeries target;
    target.values.resize(static_cast<Eigen::Index>(spec.length));
    fill_ar1_path(target.values, spec.ar_coef, spec.innovation_sd, stream);
    for (Eigen::Index t = 0; t < target.values.size(); ++t) {
        target.values(t) += spec.trend_slope * static_cast<double>(t + 1);
    }
    target.sample_sd = population_sd(target.values);
    return target;
}

/// Column j draws its noise from stream.substream(j), so columns are
/// independent of n_series and of generation order.
inline PredictorMatrix gen_pseudo_proxies(const TargetSeries& target, const ProxyEnsembleSpec& spec,
                                          const NormalStream& stream)
{
    spec.validate();
    const Eigen::Index n = target.values.size();
    const Eigen::Index p = static_cast<Eigen::Index>(spec.n_series);
    const double noise_sd = std::isinf(spec.snr) ? 0.0 : target.sample_sd / spec.snr;

    PredictorMatrix proxies(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        auto column = proxies.col(j);
        column = target.values;
        if (noise_sd > 0.0) {
            NormalStream noise = stream.substream(static_cast<std::uint64_t>(j));
            for (Eigen::Index t = 0; t < n; ++t) {
                column(t) += noise_sd * noise();
            }
        }
    }
    return proxies;
}

inline PredictorMatrix gen_ar1_ensemble(const Ar1EnsembleSpec& spec, const NormalStream& stream)
{
    spec.validate();
    const Eigen::Index p = static_cast<Eigen::Index>(spec.n_series);
    PredictorMatrix ensemble(static_cast<Eigen::Index>(spec.length), p);
    for (Eigen::Index j = 0; j < p; ++j) {
        NormalStream column_stream = stream.substream(static_cast<std::uint64_t>(j));
        fill_ar1_path(ensemble.col(j), spec.alpha, spec.innovation_sd, column_stream);
    }
    return ensemble;
}

}  // namespace pseudoproxy
