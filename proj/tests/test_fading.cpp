#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "ris_isl/fading.hpp"
#include "ris_isl/random.hpp"

using namespace ris_isl;

namespace {

double integrate_half_line(const auto& f) {
    boost::math::quadrature::tanh_sinh<double> q;
    const double edges[] = {0.0, 0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0, 8.0};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(edges); ++i) total += q.integrate(f, edges[i], edges[i + 1], 1e-14);
    return total;
}

const std::vector<double> k_values{0.0, 0.5, 1.0, 3.0, 7.0, 10.0, 50.0};

}  // namespace

// 40-digit reference values of e^{x/2}[(1-x)I0(-x/2) - x I1(-x/2)].
TEST(Laguerre, FrozenValues) {
    const std::vector<std::pair<double, double>> ref{
        {0.5, 1.235582057558263}, {1.0, 1.446491344083172}, {3.0, 2.126852598479410},
        {7.0, 3.094219340307583}, {10.0, 3.658671608148035}, {50.0, 8.018841116883911},
        {100.0, 11.31203668068241}};
    for (auto [k, l] : ref) EXPECT_NEAR(laguerre_half(-k) / l, 1.0, 1e-13) << "K = " << k;
    EXPECT_DOUBLE_EQ(laguerre_half(0.0), 1.0);
}

TEST(Laguerre, LargeArgumentAsymptote) {
    // L_{1/2}(-x) ~ 2 sqrt(x / pi) for large x.
    EXPECT_NEAR(laguerre_half(-100.0) / std::sqrt(400.0 / pi), 1.0025031488, 1e-10);
    EXPECT_NEAR(laguerre_half(-1e6) / std::sqrt(4e6 / pi), 1.0, 1e-6);
}

TEST(Laguerre, ContinuousAcrossAsymptoticSwitch) {
    // Scaled Bessel switches to the Hankel series at z = 500, i.e. x = -1000.
    const double below = laguerre_half(-999.999999);
    const double above = laguerre_half(-1000.000001);
    EXPECT_NEAR(above / below, 1.0, 1e-9);
    EXPECT_GT(above, below);
}

TEST(Laguerre, RejectsPositiveArgument) { EXPECT_THROW(laguerre_half(0.1), invalid_argument_error); }

TEST(Rician, FrozenMeans) {
    const std::vector<std::pair<double, double>> ref{
        {0.0, 0.886226925452758},  {0.5, 0.894068726958845}, {1.0, 0.906454025521969},
        {3.0, 0.942437019620809},  {7.0, 0.969507210790634}, {10.0, 0.977624390904611},
        {50.0, 0.995110849295484}, {100.0, 0.997527916371554}};
    for (auto [k, m] : ref) EXPECT_NEAR(rician_mean_and_ms({k}).mean, m, 1e-14) << "K = " << k;
}

TEST(Rician, MeanIdentityAgainstQuadrature) {
    for (double k : k_values) {
        const RicianConfig cfg{k};
        const double quad = integrate_half_line([&](double r) { return r * rician_pdf(cfg, r); });
        EXPECT_NEAR(quad, rician_mean_and_ms(cfg).mean, 1e-9) << "K = " << k;
    }
}

TEST(Rician, PdfNormalisedWithUnitPower) {
    for (double k : k_values) {
        const RicianConfig cfg{k};
        EXPECT_NEAR(integrate_half_line([&](double r) { return rician_pdf(cfg, r); }), 1.0, 1e-10);
        EXPECT_NEAR(integrate_half_line([&](double r) { return r * r * rician_pdf(cfg, r); }), 1.0, 1e-10);
    }
}

TEST(Rician, MeanRisesTowardOneWithK) {
    double previous = 0.0;
    for (double k = 0.0; k < 2000.0; k = k * 1.5 + 0.1) {
        const double m = rician_mean_and_ms({k}).mean;
        ASSERT_GT(m, previous) << "K = " << k;
        ASSERT_LT(m, 1.0);
        previous = m;
    }
    EXPECT_NEAR(rician_mean_and_ms({0.0}).mean, std::sqrt(pi) / 2.0, 1e-15);
}

TEST(Rician, SamplerChiSquareGoodnessOfFit) {
    for (double k : {0.0, 3.0, 10.0}) {
        const RicianConfig cfg{k};
        const int n = 200'000;
        const int bins = 60;
        const double hi = 2.5;
        std::vector<double> observed(bins + 1, 0.0);
        RngStream rng(99, static_cast<std::uint64_t>(k));
        for (int i = 0; i < n; ++i) {
            const double r = sample_rician(cfg, rng);
            const int b = r >= hi ? bins : static_cast<int>(r / hi * bins);
            observed[static_cast<std::size_t>(b)] += 1.0;
        }
        boost::math::quadrature::tanh_sinh<double> q;
        std::vector<double> expected(bins + 1);
        double inside = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double p = q.integrate([&](double r) { return rician_pdf(cfg, r); }, b * hi / bins,
                                         (b + 1) * hi / bins, 1e-12);
            expected[static_cast<std::size_t>(b)] = n * p;
            inside += p;
        }
        expected[bins] = n * (1.0 - inside);

        // Merge sparse bins into their neighbour.
        double stat = 0.0;
        int cells = 0;
        double obs_acc = 0.0, exp_acc = 0.0;
        for (int b = 0; b <= bins; ++b) {
            obs_acc += observed[static_cast<std::size_t>(b)];
            exp_acc += expected[static_cast<std::size_t>(b)];
            if (exp_acc >= 20.0 || b == bins) {
                if (exp_acc > 0.0) {
                    stat += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
                    ++cells;
                }
                obs_acc = exp_acc = 0.0;
            }
        }
        const boost::math::chi_squared dist(cells - 1);
        const double p_value = boost::math::cdf(boost::math::complement(dist, stat));
        EXPECT_GT(p_value, 0.01) << "K = " << k << " chi2 = " << stat << " cells = " << cells;
    }
}

TEST(Rician, SamplerMeanWithinThreeStandardErrors) {
    for (double k : k_values) {
        const RicianConfig cfg{k};
        const int n = 300'000;
        RngStream rng(2024, static_cast<std::uint64_t>(k * 10));
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = sample_rician(cfg, rng);
            s += r;
            s2 += r * r;
        }
        const double mean = s / n;
        const double se = std::sqrt((s2 / n - mean * mean) / n);
        EXPECT_LT(std::abs(mean - rician_mean_and_ms(cfg).mean), 3.0 * se) << "K = " << k;
        EXPECT_NEAR(s2 / n, 1.0, 0.01);
    }
}

TEST(Rician, RegimeBoundaries) {
    EXPECT_EQ(scintillation_regime(0.0), ScintillationRegime::Strong);
    EXPECT_EQ(scintillation_regime(0.01), ScintillationRegime::Transition);
    EXPECT_EQ(scintillation_regime(6.999), ScintillationRegime::Transition);
    EXPECT_EQ(scintillation_regime(7.0), ScintillationRegime::Weak);
    EXPECT_EQ(scintillation_regime(100.0), ScintillationRegime::Weak);
    EXPECT_EQ(to_string(ScintillationRegime::Weak), "weak");
    EXPECT_THROW(scintillation_regime(-1.0), invalid_argument_error);
}

TEST(Rician, RejectsNegativeK) { EXPECT_THROW(rician_mean_and_ms({-0.5}), invalid_argument_error); }
