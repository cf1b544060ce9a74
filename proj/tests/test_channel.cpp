#include "cogload/channel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cogload;

namespace {

ScenarioConfig small_config(int n)
{
    ScenarioConfig cfg;
    cfg.su.num_subcarriers = n;
    cfg.su.ber_threshold.assign(n, 1e-4);
    PuDescriptor aci;
    aci.kind = PuKind::adjacent;
    aci.distance = 1000;
    aci.bandwidth = 1.25e6;
    aci.center_offset = 625e3;
    aci.interference_cap = 1e-12;
    cfg.pus = {aci};
    return cfg;
}

// Independent reference: 61-point Gauss-Kronrod per unit lobe.
double reference_sinc2(double lo, double hi)
{
    auto f = [](double x) {
        if (x == 0.0) return 1.0;
        const double s = std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        return s * s;
    };
    double total = 0.0;
    for (double a = lo; a < hi;) {
        const double b = std::min(std::floor(a) + 1.0, hi);
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
        a = b;
    }
    return total;
}

}  // namespace

TEST(Channel, DeterministicForSeed)
{
    const auto cfg = small_config(16);
    Rng a(42), b(42);
    EXPECT_EQ(sample_su_channel(cfg, a).cnir, sample_su_channel(cfg, b).cnir);
}

TEST(Channel, ZeroLinkGainGivesZeroCnir)
{
    auto cfg = small_config(8);
    cfg.su.su_link_gain = 0.0;
    Rng rng(1);
    for (double c : sample_su_channel(cfg, rng).cnir)
        EXPECT_EQ(c, 0.0);
}

TEST(Channel, MeanCnirMatchesLinkBudget)
{
    auto cfg = small_config(64);
    cfg.su.su_link_gain = 2e-7;
    cfg.su.pu_interference = 1e-9;
    Rng rng(5);
    double s = 0.0;
    int count = 0;
    for (int t = 0; t < 2000; ++t)
        for (double c : sample_su_channel(cfg, rng).cnir) {
            s += c;
            ++count;
        }
    // E|H|^2 = 1, so E[C] = g / (σ² + J) = 100; standard error ~0.35.
    EXPECT_NEAR(s / count, 100.0, 2.0);
}

TEST(Channel, SpGainMean)
{
    Rng rng(9);
    double s = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k)
        s += sample_sp_gain(4.0, rng);
    EXPECT_NEAR(s / n, 0.25, 0.004);
    EXPECT_THROW(sample_sp_gain(0.0, rng), DomainError);
}

TEST(Channel, PerSubcarrierInterferenceOverride)
{
    auto cfg = small_config(3);
    cfg.su.pu_interference = 5.0;
    EXPECT_EQ(pu_interference_to_su(cfg), (std::vector<double>{5, 5, 5}));
    cfg.su.pu_interference_per_subcarrier = {1, 2, 3};
    EXPECT_EQ(pu_interference_to_su(cfg), (std::vector<double>{1, 2, 3}));
}

TEST(Channel, MainLobeIntegral)
{
    // ∫_{-1/2}^{1/2} sinc² at T_s f, i.e. a band of width 1/T_s centred on the subcarrier.
    const double ts = 102.4e-6;
    const double w = spectral_overlap_factor(0.0, 1.0 / ts, ts, 0.0);
    EXPECT_NEAR(w, 0.7736950099028162, 1e-12);
    EXPECT_NEAR(w, reference_sinc2(-0.5, 0.5), 1e-6);
}

TEST(Channel, AgreesWithGaussKronrodOnOffsetBands)
{
    const double ts = 102.4e-6;
    for (double fc : {3.3e4, 2.5e5, 6.25e5, -1.0e6})
        for (double bw : {1e4, 2e5, 1.25e6}) {
            const double lo = ts * (fc - bw / 2), hi = ts * (fc + bw / 2);
            const double ref = reference_sinc2(lo, hi);
            EXPECT_NEAR(spectral_overlap_factor(fc, bw, ts, 0.0) / ref, 1.0, 1e-8) << fc << " " << bw;
        }
}

TEST(Channel, WideBandLimitIsOne)
{
    const double ts = 102.4e-6;
    EXPECT_NEAR(spectral_overlap_factor(0.0, 2e4 / ts, ts, 0.0), 1.0, 1e-4);
}

TEST(Channel, OverlapIsSymmetricAndAdditive)
{
    const double ts = 102.4e-6;
    EXPECT_NEAR(spectral_overlap_factor(4e5, 1e5, ts, 0.0), spectral_overlap_factor(-4e5, 1e5, ts, 0.0), 1e-15);
    // [fc - B/2, fc + B/2] split into two halves.
    const double whole = spectral_overlap_factor(3e4, 4e4, ts, 0.0);
    const double left = spectral_overlap_factor(2e4, 2e4, ts, 0.0);
    const double right = spectral_overlap_factor(4e4, 2e4, ts, 0.0);
    EXPECT_NEAR((left + right) / whole, 1.0, 1e-9);
}

TEST(Channel, PathLossScalesOverlap)
{
    const double ts = 102.4e-6;
    EXPECT_NEAR(spectral_overlap_factor(1e5, 1e5, ts, 30.0) / spectral_overlap_factor(1e5, 1e5, ts, 0.0), 1e-3,
                1e-15);
}

TEST(Channel, RejectsBadQuadratureTolerance)
{
    EXPECT_THROW(spectral_overlap_factor(0.0, 1e4, 1e-4, 0.0, 0.1), DomainError);
    EXPECT_THROW(spectral_overlap_factor(0.0, 0.0, 1e-4, 0.0), DomainError);
}

TEST(Channel, SubcarrierDistanceGeometry)
{
    const auto cfg = small_config(4);
    const double df = cfg.su.subcarrier_spacing;
    PuDescriptor above = cfg.pus[0];
    above.center_offset = 1000.0;
    EXPECT_NEAR(subcarrier_to_pu_distance(3, cfg.su, above), 0.5 * df + 1000.0, 1e-9);
    EXPECT_NEAR(subcarrier_to_pu_distance(0, cfg.su, above), 3.5 * df + 1000.0, 1e-9);
    PuDescriptor below = above;
    below.center_offset = -1000.0;
    EXPECT_NEAR(subcarrier_to_pu_distance(0, cfg.su, below), 0.5 * df + 1000.0, 1e-9);
}

TEST(Channel, AciFactorsDecayAwayFromPu)
{
    const auto cfg = small_config(32);
    const auto f = aci_factors(cfg);
    ASSERT_EQ(f.num_pus(), 1u);
    ASSERT_EQ(f.weights[0].size(), 32u);
    // The PU sits above the band: the top subcarrier leaks the most.
    for (int i = 1; i < 32; ++i)
        EXPECT_GT(f.weights[0][i], f.weights[0][i - 1]);
}
