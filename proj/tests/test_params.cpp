#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fdnoma/analytic.hpp"
#include "fdnoma/channel.hpp"
#include "fdnoma/params.hpp"
#include "fdnoma/rng.hpp"
#include "test_support.hpp"

using namespace fdnoma;

TEST(EffectiveRho, FullDuplexDefaults) {
  const SystemParams p;
  // Independent arithmetic: prod = 0.75 * 0.8 * 1 * 0.75, I_SI = 10^(-0.05).
  const double prod = 0.45;
  const double isi = std::pow(10.0, -0.05);
  EXPECT_NEAR(effective_rho(p, DuplexMode::FD), prod / (1.0 - prod * isi), 1e-15);
  EXPECT_NEAR(effective_rho(p, DuplexMode::FD), 0.75133, 5e-6);
}

TEST(EffectiveRho, HalfDuplexAndOmaDropRecycling) {
  const SystemParams p;
  EXPECT_DOUBLE_EQ(effective_rho(p, DuplexMode::HD), 0.45);
  EXPECT_DOUBLE_EQ(effective_rho(p, DuplexMode::OMA_TDMA), 0.45);
  SystemParams q = p;
  q.hd_self_energy_recycling = true;
  EXPECT_DOUBLE_EQ(effective_rho(q, DuplexMode::HD), effective_rho(q, DuplexMode::FD));
}

TEST(EffectiveRho, NoSelfInterferenceCollapsesToProduct) {
  SystemParams p;
  p.i_si = 0.0;
  EXPECT_DOUBLE_EQ(effective_rho(p, DuplexMode::FD), p.harvest_product());
}

TEST(EffectiveRho, MonotoneInEveryFactor) {
  const SystemParams base;
  const std::vector<double SystemParams::*> fields{&SystemParams::eta, &SystemParams::beta, &SystemParams::xi,
                                                    &SystemParams::psi, &SystemParams::i_si};
  for (auto field : fields) {
    double prev = -1.0;
    for (double f : {0.2, 0.4, 0.6, 0.8, 0.95}) {
      SystemParams p = base;
      p.*field = f;
      const double rho = effective_rho(p, DuplexMode::FD);
      EXPECT_GT(rho, prev);
      prev = rho;
    }
  }
}

TEST(SelfInterference, ZetaConversion) {
  EXPECT_NEAR(self_interference_from_zeta_db(-1.0), 0.8912509381337456, 1e-15);
  EXPECT_NEAR(SystemParams{}.i_si, self_interference_from_zeta_db(-1.0), 1e-15);
}

TEST(Validate, RejectsOutOfRangeFields) {
  auto rejects = [](auto mutate) {
    SystemParams p;
    mutate(p);
    EXPECT_THROW(validate(p), std::invalid_argument);
  };
  rejects([](SystemParams& p) { p.beta = 1.0; });
  rejects([](SystemParams& p) { p.beta = 0.0; });
  rejects([](SystemParams& p) { p.eta = 0.0; });
  rejects([](SystemParams& p) { p.psi = 1.0; });
  rejects([](SystemParams& p) { p.xi = 1.5; });
  rejects([](SystemParams& p) { p.n_sts = 0; });
  rejects([](SystemParams& p) { p.lambda_sr = -1.0; });
  rejects([](SystemParams& p) { p.target_rates = {0.5, 0.0, 0.5}; });
  rejects([](SystemParams& p) { p.target_rates = {0.5, 0.5}; });
  rejects([](SystemParams& p) { p.alpha = PowerAllocation({0.5, 0.5}); });
  // eta*beta*xi*psi*I_SI must stay below one.
  rejects([](SystemParams& p) {
    p.eta = 1.0;
    p.beta = 0.99;
    p.psi = 0.99;
    p.i_si = 1.2;
  });
  EXPECT_NO_THROW(validate(SystemParams{}));
}

TEST(PowerAllocation, Invariants) {
  EXPECT_NO_THROW(PowerAllocation({0.6, 0.3, 0.1}));
  EXPECT_NO_THROW(PowerAllocation({1.0, 0.0, 0.0}));
  EXPECT_THROW(PowerAllocation({0.3, 0.6, 0.1}), std::invalid_argument);
  EXPECT_THROW(PowerAllocation({0.6, 0.3, 0.2}), std::invalid_argument);
  EXPECT_THROW(PowerAllocation({1.2}), std::invalid_argument);
  EXPECT_THROW(PowerAllocation({0.5, -0.1}), std::invalid_argument);
  EXPECT_THROW(PowerAllocation(std::vector<double>{}), std::invalid_argument);
  const PowerAllocation a({0.6, 0.3, 0.1});
  EXPECT_DOUBLE_EQ(a.tail_sum(0), 0.4);
  EXPECT_DOUBLE_EQ(a.tail_sum(2), 0.0);
}

TEST(CounterRng, StreamsAreReproducibleAndDistinct) {
  CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    EXPECT_NE(va, c());
    EXPECT_NE(va, d());
  }
  EXPECT_EQ(a.draws(), 100u);
}

TEST(CounterRng, UniformNeverZero) {
  CounterRng r(1, 1);
  double lo = 1.0;
  for (int i = 0; i < 100000; ++i) lo = std::min(lo, r.uniform_open0());
  EXPECT_GT(lo, 0.0);
}

TEST(SampleRealization, SingleExponentialMean) {
  SystemParams p;
  p.n_sts = 1;
  p.n_antennas = 1;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += realization_for(p, 3, i).best_gain;
  const double mean = sum / n;
  // Exponential: sd = mean, so 4 standard errors.
  EXPECT_NEAR(mean, p.lambda_ps, 4.0 * p.lambda_ps / std::sqrt(n));
}

TEST(SampleRealization, BestGainMatchesClosedFormCdf) {
  const SystemParams p;  // K=3, N=5, lambda_ps=5
  const int n = 1000000;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = realization_for(p, 11, i).best_gain;
  const double d = test::ks_one_sample(x, [&](double v) { return best_channel_cdf(v, p.n_sts, p.n_antennas, p.lambda_ps); });
  EXPECT_LT(d, 0.005);
}

TEST(SampleRealization, WeakestGainIsMinOfThree) {
  const SystemParams p;  // M=2 -> three receiver gains
  const int n = 200000;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = realization_for(p, 5, i).sorted_gains[0];
  const double d = test::ks_one_sample(x, [&](double v) { return 1.0 - std::exp(-3.0 * v / p.lambda_sp); });
  EXPECT_LT(d, test::ks_critical_one_sample(n));
}

TEST(SampleRealization, MaxOfGammaDrawsAgreesWithStdGamma) {
  // Two-sample KS at alpha = 0.01 (asymptotic critical value 1.628).
  const SystemParams p;
  const int n = 100000;
  std::vector<double> ours(n), reference(n);
  std::mt19937_64 eng(2024);
  std::gamma_distribution<double> gamma(p.n_antennas, p.lambda_ps);
  for (int i = 0; i < n; ++i) {
    ours[static_cast<std::size_t>(i)] = realization_for(p, 99, i).best_gain;
    double best = 0.0;
    for (int k = 0; k < p.n_sts; ++k) best = std::max(best, gamma(eng));
    reference[static_cast<std::size_t>(i)] = best;
  }
  const double d = test::ks_two_sample(ours, reference);
  EXPECT_LT(d, 1.628 * std::sqrt(2.0 / n));
}

TEST(SampleRealization, SortedGainsArePermutationInvariant) {
  const SystemParams p;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    CounterRng rng(5, t);
    // Replay the sampler's draws by hand, in draw order, then sort.
    for (int k = 0; k < p.n_sts; ++k) (void)sample_gamma_gain(p.n_antennas, p.lambda_ps, rng);
    std::vector<double> raw{rng.exponential(p.lambda_sp)};
    for (int m = 0; m < p.n_srs; ++m) raw.push_back(rng.exponential(p.lambda_sr));
    std::vector<double> shuffled = raw;
    std::reverse(shuffled.begin(), shuffled.end());
    std::sort(raw.begin(), raw.end());
    std::sort(shuffled.begin(), shuffled.end());
    const ChannelRealization r = realization_for(p, 5, t);
    EXPECT_EQ(r.sorted_gains, raw);
    EXPECT_EQ(r.sorted_gains, shuffled);
    EXPECT_TRUE(std::is_sorted(r.sorted_gains.begin(), r.sorted_gains.end()));
  }
}
