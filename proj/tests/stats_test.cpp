#include "venuerisk/stats.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using namespace venuerisk;

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

struct Reference {
  double t, df, p;
};

// Welch statistic evaluated entirely in 50-digit arithmetic.
Reference welch_reference(const std::vector<double>& a, const std::vector<double>& b) {
  auto moments = [](const std::vector<double>& xs) {
    Big n = xs.size(), mean = 0, ss = 0;
    for (double x : xs) mean += Big(x);
    mean /= n;
    for (double x : xs) ss += (Big(x) - mean) * (Big(x) - mean);
    return std::tuple<Big, Big, Big>{n, mean, ss / (n - 1)};
  };
  const auto [na, ma, va] = moments(a);
  const auto [nb, mb, vb] = moments(b);
  const Big sa = va / na, sb = vb / nb;
  const Big t = (ma - mb) / sqrt(sa + sb);
  const Big df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1));
  const Big p = boost::math::ibeta(df / 2, Big(0.5), df / (df + t * t));
  return {t.convert_to<double>(), df.convert_to<double>(), p.convert_to<double>()};
}

double rel(double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Classify, Examples) {
  EXPECT_EQ(classify(1.5), Severity::severe);
  EXPECT_EQ(classify(0.3), Severity::mild);
  EXPECT_EQ(classify(1.0), Severity::mild);
  EXPECT_EQ(classify(0.0), Severity::mild);
  EXPECT_EQ(classify(3.1, 2.0), Severity::severe);
  EXPECT_EQ(classify(1.5, 2.0), Severity::mild);
}

TEST(Classify, Monotone) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    double x = u(rng), y = u(rng);
    if (x > y) std::swap(x, y);
    EXPECT_LE(static_cast<int>(classify(x)), static_cast<int>(classify(y)));
  }
}

TEST(Histogram, LinearHandBinned) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto h = histogram(v, 2, Scale::linear);
  EXPECT_EQ(h.bin_edges, (std::vector<double>{1, 2.5, 4}));
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(h.excluded, 0u);
}

TEST(Histogram, Log10HandBinned) {
  const std::vector<double> v{0.1, 1, 10};
  const auto h = histogram(v, 2, Scale::log10);
  ASSERT_EQ(h.bin_edges.size(), 3u);
  EXPECT_NEAR(h.bin_edges[0], 0.1, 1e-15);
  EXPECT_NEAR(h.bin_edges[1], 1.0, 1e-15);
  EXPECT_NEAR(h.bin_edges[2], 10.0, 1e-14);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 2}));
}

TEST(Histogram, DegenerateRange) {
  const std::vector<double> v{2.5, 2.5, 2.5};
  const auto h = histogram(v, 10, Scale::linear);
  ASSERT_EQ(h.counts.size(), 1u);
  EXPECT_EQ(h.counts[0], 3u);
  EXPECT_LT(h.bin_edges[0], 2.5);
  EXPECT_GT(h.bin_edges[1], 2.5);
}

TEST(Histogram, LogExcludesNonPositive) {
  const std::vector<double> v{0.0, 0.0, -1.0, 0.5, 2.0, std::numeric_limits<double>::quiet_NaN()};
  const auto h = histogram(v, 3, Scale::log10);
  EXPECT_EQ(h.excluded, 4u);
  EXPECT_EQ(h.total(), 2u);
}

TEST(Histogram, EmptyIsFlaggedNotError) {
  const std::vector<double> zeros{0.0, 0.0};
  const auto h = histogram(zeros, 5, Scale::log10);
  EXPECT_TRUE(h.empty());
  EXPECT_EQ(h.excluded, 2u);
  EXPECT_TRUE(histogram(std::vector<double>{}, 5, Scale::linear).empty());
  EXPECT_THROW(histogram(zeros, 0, Scale::linear), ArgumentError);
}

TEST(Histogram, Conservation) {
  std::mt19937_64 rng(12);
  std::lognormal_distribution<double> ln(0.0, 2.0);
  std::uniform_int_distribution<int> bins(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v;
    const int n = 1 + trial * 3;
    for (int i = 0; i < n; ++i) v.push_back(i % 5 == 0 ? 0.0 : ln(rng));
    for (auto scale : {Scale::linear, Scale::log10}) {
      const auto h = histogram(v, bins(rng), scale);
      EXPECT_EQ(h.total() + h.excluded, v.size());
      for (std::size_t i = 1; i < h.bin_edges.size(); ++i) EXPECT_LT(h.bin_edges[i - 1], h.bin_edges[i]);
    }
  }
}

TEST(Histogram, AlignedShareEdges) {
  const std::vector<double> a{0.01, 0.1, 0.2}, b{0.5, 3.0, 0.0};
  const auto [ha, hb] = aligned_histograms(a, b, 4, Scale::log10);
  EXPECT_EQ(ha.bin_edges, hb.bin_edges);
  EXPECT_EQ(ha.total(), 3u);
  EXPECT_EQ(hb.total(), 2u);
  EXPECT_EQ(hb.excluded, 1u);
}

TEST(IncompleteBeta, MatchesMpmath) {
  // (x, a, b, I_x(a, b)) from tests/oracles/compute_oracles.py.
  struct Case {
    double x, a, b, want;
  };
  for (const auto& c : {Case{0.3, 2, 3, 0.34829999999999998042}, Case{0.9, 0.5, 0.5, 0.79516723530086657191},
                        Case{0.001, 4, 0.5, 2.7354694340824056174e-13}, Case{0.999, 60, 0.5, 0.72951124144767347689},
                        Case{0.5, 200, 0.5, 3.5001024893205809111e-62}}) {
    EXPECT_LE(rel(regularized_incomplete_beta(c.a, c.b, c.x), c.want), 1e-10) << c.x << " " << c.a << " " << c.b;
  }
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 1.0), 1.0);
  EXPECT_THROW(regularized_incomplete_beta(0, 3, 0.5), ArgumentError);
  EXPECT_THROW(regularized_incomplete_beta(1, 3, 1.5), ArgumentError);
}

TEST(IncompleteBeta, AgreesWithBoostOverGrid) {
  for (double a : {0.5, 1.0, 2.5, 10.0, 75.0, 500.0, 1500.0}) {
    for (double x : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 0.999999}) {
      const double want = boost::math::ibeta(Big(a), Big(0.5), Big(x)).convert_to<double>();
      if (want < 1e-290) continue;
      EXPECT_LE(rel(regularized_incomplete_beta(a, 0.5, x), want), 1e-10) << a << " " << x;
    }
  }
}

TEST(WelchTTest, HandComputedExample) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
  const auto r = welch_t_test(a, b);
  EXPECT_DOUBLE_EQ(r.t_stat, -1.0);
  EXPECT_DOUBLE_EQ(r.degrees_of_freedom, 8.0);
  EXPECT_LE(rel(r.p_value, 0.34659350708733424783), 1e-10);
  EXPECT_EQ(r.mean_a, 3.0);
  EXPECT_EQ(r.mean_b, 4.0);
}

TEST(WelchTTest, IdenticalSamples) {
  const std::vector<double> a{0.2, 1.7, 3.3, 0.04, 9.1};
  const auto r = welch_t_test(a, a);
  EXPECT_EQ(r.t_stat, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(WelchTTest, SwapNegatesT) {
  const std::vector<double> a{0.5, 1.7, 2.2, 0.9}, b{3.1, 2.8, 4.4, 3.9, 5.0, 2.7};
  const auto ab = welch_t_test(a, b);
  const auto ba = welch_t_test(b, a);
  EXPECT_EQ(ab.t_stat, -ba.t_stat);
  EXPECT_EQ(ab.p_value, ba.p_value);
  EXPECT_EQ(ab.degrees_of_freedom, ba.degrees_of_freedom);
}

TEST(WelchTTest, FrozenMpmathReferences) {
  struct Case {
    std::vector<double> a, b;
    double t, df, p;
  };
  const std::vector<Case> cases{
      {{0.5, 1.7, 2.2, 0.9}, {3.1, 2.8, 4.4, 3.9, 5.0, 2.7}, -4.2943409978183740227, 7.4812048638972901668,
       0.0030789233244557386801},
      {{10.0, 10.5, 9.8}, {1.0, 30.0, 2.0, 18.0, 7.0}, -0.2724871694363330981, 4.0114480180674235408,
       0.79869886169244262596},
      {{0.01, 0.02, 0.5, 0.03, 0.2, 0.04}, {0.3, 1.2, 2.5, 0.8, 4.0, 0.9}, -2.6039871759355214878,
       5.195073206358494611, 0.046288546277837854247},
  };
  for (const auto& c : cases) {
    const auto r = welch_t_test(c.a, c.b);
    EXPECT_LE(rel(r.t_stat, c.t), 1e-12);
    EXPECT_LE(rel(r.degrees_of_freedom, c.df), 1e-12);
    EXPECT_LE(rel(r.p_value, c.p), 1e-10);
  }
}

TEST(WelchTTest, AgreesWithHighPrecisionOnSmallSamples) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 6);
  std::uniform_real_distribution<double> shift(-2.0, 2.0), spread(0.1, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(size(rng)), b(size(rng));
    const double sa = spread(rng), sb = spread(rng), mu = shift(rng);
    for (auto& x : a) x = sa * z(rng);
    for (auto& x : b) x = mu + sb * z(rng);
    const auto r = welch_t_test(a, b);
    const auto ref = welch_reference(a, b);
    EXPECT_NEAR(r.t_stat, ref.t, 1e-8 * std::max(1.0, std::abs(ref.t)));
    EXPECT_NEAR(r.degrees_of_freedom, ref.df, 1e-8 * ref.df);
    EXPECT_NEAR(r.p_value, ref.p, 1e-8);
  }
}

TEST(WelchTTest, LocationAndScaleInvariance) {
  std::mt19937_64 rng(31);
  std::lognormal_distribution<double> ln(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(30), b(45);
    for (auto& x : a) x = ln(rng);
    for (auto& x : b) x = 1.5 * ln(rng);
    const auto base = welch_t_test(a, b);
    for (double c : {-3.0, 0.5, 10.0}) {
      auto a2 = a, b2 = b;
      for (auto& x : a2) x += c;
      for (auto& x : b2) x += c;
      const auto r = welch_t_test(a2, b2);
      EXPECT_NEAR(r.t_stat, base.t_stat, 1e-10 * std::max(1.0, std::abs(base.t_stat)));
      EXPECT_NEAR(r.degrees_of_freedom, base.degrees_of_freedom, 1e-10 * base.degrees_of_freedom);
      EXPECT_NEAR(r.p_value, base.p_value, 1e-10);
    }
    for (double k : {0.01, 7.0}) {
      auto a2 = a, b2 = b;
      for (auto& x : a2) x *= k;
      for (auto& x : b2) x *= k;
      const auto r = welch_t_test(a2, b2);
      EXPECT_NEAR(r.t_stat, base.t_stat, 1e-10 * std::max(1.0, std::abs(base.t_stat)));
      EXPECT_NEAR(r.degrees_of_freedom, base.degrees_of_freedom, 1e-10 * base.degrees_of_freedom);
      EXPECT_NEAR(r.p_value, base.p_value, 1e-10);
    }
  }
}

TEST(WelchTTest, Errors) {
  const std::vector<double> one{1.0}, two{1.0, 2.0};
  EXPECT_THROW(welch_t_test(one, two), ArgumentError);
  EXPECT_THROW(welch_t_test(two, one), ArgumentError);
  const std::vector<double> c1{2.0, 2.0, 2.0}, c2{2.0, 2.0}, c3{5.0, 5.0};
  const auto r = welch_t_test(c1, c2);
  EXPECT_EQ(r.t_stat, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_THROW(welch_t_test(c1, c3), ArgumentError);
  // One constant sample is fine.
  EXPECT_NO_THROW(welch_t_test(c1, two));
}

TEST(PooledTTest, FrozenMpmathReference) {
  const std::vector<double> a{0.5, 1.7, 2.2, 0.9}, b{3.1, 2.8, 4.4, 3.9, 5.0, 2.7};
  const auto r = pooled_t_test(a, b);
  EXPECT_LE(rel(r.t_stat, -4.1105599736171342365), 1e-12);
  EXPECT_EQ(r.degrees_of_freedom, 8.0);
  EXPECT_LE(rel(r.p_value, 0.0033880161726771348909), 1e-10);
}

TEST(CompareSamples, SelfComparison) {
  const std::vector<double> a{0.01, 0.3, 2.0, 0.0, 5.5};
  const auto c = compare_samples(a, a, 8, Scale::log10);
  EXPECT_EQ(c.t_stat, 0.0);
  EXPECT_EQ(c.p_value, 1.0);
  EXPECT_EQ(c.histogram_a.counts, c.histogram_b.counts);
  EXPECT_EQ(c.histogram_a.bin_edges, c.histogram_b.bin_edges);
}

TEST(FitLogNormal, Examples) {
  const double e = std::numbers::e;
  const std::vector<double> constant{e, e, e};
  EXPECT_THROW(fit_log_normal(constant), ArgumentError);
  const std::vector<double> v{1.0, e * e};
  const auto f = fit_log_normal(v);
  EXPECT_NEAR(f.mu, 1.0, 1e-15);
  EXPECT_NEAR(f.sigma, 1.0, 1e-15);
  EXPECT_THROW(fit_log_normal(std::vector<double>{1.0}), ArgumentError);
  EXPECT_THROW(fit_log_normal(std::vector<double>{1.0, 0.0}), ArgumentError);
  EXPECT_THROW(fit_log_normal(std::vector<double>{1.0, -2.0}), ArgumentError);
}

TEST(FitLogNormal, RecoversParameters) {
  std::mt19937_64 rng(20201102);
  std::lognormal_distribution<double> ln(0.5, 0.8);
  std::vector<double> v(100000);
  for (auto& x : v) x = ln(rng);
  const auto f = fit_log_normal(v);
  EXPECT_NEAR(f.mu, 0.5, 0.02);
  EXPECT_NEAR(f.sigma, 0.8, 0.02);
}

TEST(FitLogNormal, ScaleEquivariance) {
  std::mt19937_64 rng(9);
  std::lognormal_distribution<double> ln(-2.0, 1.3);
  std::vector<double> v(500);
  for (auto& x : v) x = ln(rng);
  const auto base = fit_log_normal(v);
  for (double k : {0.001, 3.0, 1e4}) {
    auto w = v;
    for (auto& x : w) x *= k;
    const auto f = fit_log_normal(w);
    EXPECT_NEAR(f.mu, base.mu + std::log(k), 1e-12);
    EXPECT_NEAR(f.sigma, base.sigma, 1e-12);
  }
}
