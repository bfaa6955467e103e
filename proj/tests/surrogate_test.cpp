#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "pseudoproxy/surrogate.hpp"

using namespace pseudoproxy;

namespace {

NormalStream stream_for(std::uint32_t rep, Purpose purpose = Purpose::target)
{
    return derive_stream(make_key(123, 0, rep, purpose));
}

/// Subtracts the known trend slope * t.
Vector detrend(const TargetSeries& target, double slope)
{
    Vector r = target.values;
    for (Eigen::Index t = 0; t < r.size(); ++t) {
        r(t) -= slope * static_cast<double>(t + 1);
    }
    return r;
}

double lag1_autocorrelation(const Vector& x)
{
    const double m = x.mean();
    const Vector c = x.array() - m;
    return c.head(c.size() - 1).dot(c.tail(c.size() - 1)) / c.squaredNorm();
}

}  // namespace

TEST(GenTarget, TrendSpansThirtySevenOverTheSeries)
{
    TargetSpec with_trend;
    TargetSpec flat = with_trend;
    flat.trend_slope = 0.0;
    auto s1 = stream_for(0);
    auto s2 = stream_for(0);
    const Vector deterministic = gen_target(with_trend, s1).values - gen_target(flat, s2).values;
    EXPECT_NEAR(deterministic(148) - deterministic(0), 37.0, 1e-12);
    EXPECT_NEAR(deterministic(0), 0.25, 1e-12);
}

TEST(GenTarget, SampleSdMatchesValues)
{
    auto s = stream_for(1);
    const TargetSeries target = gen_target(TargetSpec{}, s);
    ASSERT_EQ(target.values.size(), 149);
    const double m = target.values.mean();
    const double sd = std::sqrt((target.values.array() - m).square().mean());
    EXPECT_NEAR(target.sample_sd, sd, 1e-12 * sd);
}

TEST(GenTarget, ResidualLagOneAutocorrelation)
{
    // Mean-centered lag-1 estimator is biased low by about (1 + 3 * 0.4) / 149 = 0.015.
    double sum = 0.0;
    for (std::uint32_t rep = 0; rep < 500; ++rep) {
        auto s = stream_for(rep);
        sum += lag1_autocorrelation(detrend(gen_target(TargetSpec{}, s), 0.25));
    }
    EXPECT_NEAR(sum / 500.0, 0.4, 0.03);
}

TEST(GenTarget, WhiteNoiseResidualVariance)
{
    TargetSpec spec;
    spec.ar_coef = 0.0;
    double sum = 0.0;
    for (std::uint32_t rep = 0; rep < 500; ++rep) {
        auto s = stream_for(rep);
        const Vector r = detrend(gen_target(spec, s), spec.trend_slope);
        sum += (r.array() - r.mean()).square().sum() / static_cast<double>(r.size() - 1);
    }
    EXPECT_NEAR(sum / 500.0, 1.0, 0.02);
}

TEST(GenTarget, RejectsNonStationaryNoise)
{
    auto s = stream_for(0);
    TargetSpec spec;
    spec.ar_coef = 1.0;
    EXPECT_THROW(gen_target(spec, s), std::invalid_argument);
    spec.ar_coef = -0.1;
    EXPECT_THROW(gen_target(spec, s), std::invalid_argument);
    spec = TargetSpec{};
    spec.length = 1;
    EXPECT_THROW(gen_target(spec, s), std::invalid_argument);
}

TEST(GenPseudoProxies, InfiniteSnrCopiesTarget)
{
    auto s = stream_for(0);
    const TargetSeries target = gen_target(TargetSpec{}, s);
    const PredictorMatrix x =
        gen_pseudo_proxies(target, {25, std::numeric_limits<double>::infinity()}, stream_for(0, Purpose::proxy_noise));
    for (Eigen::Index j = 0; j < x.n_cols(); ++j) {
        EXPECT_EQ(x.col(j), target.values);
    }
}

TEST(GenPseudoProxies, PooledNoiseSdMatchesSnr)
{
    auto s = stream_for(2);
    const TargetSeries target = gen_target(TargetSpec{}, s);
    for (const double snr : {4.0, 0.25}) {
        const PredictorMatrix x = gen_pseudo_proxies(target, {1138, snr}, stream_for(2, Purpose::proxy_noise));
        const Matrix noise = x.data().colwise() - target.values;
        const double pooled_sd = std::sqrt(noise.array().square().mean());
        EXPECT_NEAR(pooled_sd / (target.sample_sd / snr), 1.0, 0.01) << "snr " << snr;
    }
}

TEST(GenPseudoProxies, NoiseIsIndependentAcrossColumns)
{
    auto s = stream_for(3);
    const TargetSeries target = gen_target(TargetSpec{}, s);
    const PredictorMatrix x = gen_pseudo_proxies(target, {10, 4.0}, stream_for(3, Purpose::proxy_noise));
    const Vector a = x.col(0) - target.values;
    const Vector b = x.col(7) - target.values;
    const Vector ac = a.array() - a.mean();
    const Vector bc = b.array() - b.mean();
    EXPECT_LT(std::abs(ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm())), 0.17);
}

TEST(GenPseudoProxies, PrefixStable)
{
    auto s = stream_for(4);
    const TargetSeries target = gen_target(TargetSpec{}, s);
    const auto noise = stream_for(4, Purpose::proxy_noise);
    const PredictorMatrix small = gen_pseudo_proxies(target, {5, 0.5}, noise);
    const PredictorMatrix large = gen_pseudo_proxies(target, {40, 0.5}, noise);
    EXPECT_EQ(small.data(), large.data().leftCols(5));
}

TEST(GenAr1Ensemble, RandomWalkIncrements)
{
    const PredictorMatrix x = gen_ar1_ensemble({20, 149, 1.0, 1.0}, stream_for(0, Purpose::ar1_ensemble));
    // The +-0.25 mean bound is 3 sigma for one column; across all columns the
    // pooled mean gets the same 3 sigma bound at the pooled sample size.
    double pooled_sum = 0.0;
    for (Eigen::Index j = 0; j < x.n_cols(); ++j) {
        EXPECT_EQ(x.col(j)(0), 0.0);
        const Vector diff = x.col(j).tail(148) - x.col(j).head(148);
        const double mean = diff.mean();
        const double sd = std::sqrt((diff.array() - mean).square().sum() / 147.0);
        if (j == 0) {
            EXPECT_NEAR(mean, 0.0, 0.25);
        }
        EXPECT_NEAR(sd, 1.0, 0.25);
        pooled_sum += diff.sum();
    }
    EXPECT_NEAR(pooled_sum / (20.0 * 148.0), 0.0, 3.0 / std::sqrt(20.0 * 148.0));
}

TEST(GenAr1Ensemble, StationaryVarianceAcrossAlphas)
{
    // Pooled about the known zero mean: per-column centering would bias the
    // estimate low by roughly (1 + a) / ((1 - a) * 149), which is 6% at a = 0.8.
    for (const double alpha : {0.2, 0.4, 0.6, 0.8}) {
        const PredictorMatrix x = gen_ar1_ensemble({1138, 149, alpha, 1.0}, stream_for(9, Purpose::ar1_ensemble));
        const double pooled = x.data().array().square().mean();
        EXPECT_NEAR(pooled / (1.0 / (1.0 - alpha * alpha)), 1.0, 0.03) << "alpha " << alpha;
    }
}

TEST(GenAr1Ensemble, WhiteNoiseHasNoLagOneCorrelation)
{
    const PredictorMatrix x = gen_ar1_ensemble({1138, 149, 0.0, 1.0}, stream_for(10, Purpose::ar1_ensemble));
    const Matrix& m = x.data();
    const double cross = (m.topRows(148).array() * m.bottomRows(148).array()).sum();
    EXPECT_NEAR(cross / m.squaredNorm(), 0.0, 0.01);
}

TEST(GenAr1Ensemble, PrefixStableAndDeterministic)
{
    const auto s = stream_for(11, Purpose::ar1_ensemble);
    const PredictorMatrix a = gen_ar1_ensemble({3, 149, 0.6, 1.0}, s);
    const PredictorMatrix b = gen_ar1_ensemble({30, 149, 0.6, 1.0}, s);
    EXPECT_EQ(a.data(), b.data().leftCols(3));
    EXPECT_EQ(gen_ar1_ensemble({30, 149, 0.6, 1.0}, s).data(), b.data());
}

TEST(GenAr1Ensemble, RejectsAlphaOutsideUnitInterval)
{
    const auto s = stream_for(0, Purpose::ar1_ensemble);
    EXPECT_THROW(gen_ar1_ensemble({3, 10, 1.01, 1.0}, s), std::invalid_argument);
    EXPECT_THROW(gen_ar1_ensemble({3, 10, -0.01, 1.0}, s), std::invalid_argument);
}

TEST(PredictorMatrix, RejectsNonFiniteEntries)
{
    Matrix m = Matrix::Zero(3, 2);
    m(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(PredictorMatrix{m}, std::invalid_argument);
}
