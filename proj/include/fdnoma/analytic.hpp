#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdnoma/params.hpp"
#include "fdnoma/special_functions.hpp"
#include "fdnoma/throughput.hpp"

namespace fdnoma {

/// Coefficients of (sum_{n<N} x^n/n!)^l, so C_0 = 1 and C_1 = l.
struct CoefficientTable {
  std::vector<long double> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] long double operator[](std::size_t j) const { return values[j]; }
};

inline CoefficientTable c_coefficients(int l, int n_antennas) {
  if (l < 0 || n_antennas < 1) throw std::domain_error("c_coefficients: need l >= 0 and N >= 1");
  const int degree = l * (n_antennas - 1);
  CoefficientTable table;
  table.values.assign(static_cast<std::size_t>(degree) + 1, 0.0L);
  table.values[0] = 1.0L;
  for (int j = 1; j <= degree; ++j) {
    const int q = std::min(j, n_antennas - 1);
    long double acc = 0.0L;
    for (int p = 1; p <= q; ++p)
      acc += static_cast<long double>(p * l - j + p) / factorial(p) * table.values[static_cast<std::size_t>(j - p)];
    table.values[static_cast<std::size_t>(j)] = acc / j;
  }
  return table;
}

/// Knobs for the analytic evaluators. `corrupt_coefficients` is a negative
/// control used by the validation harness: it perturbs C_j so that the
/// closed forms visibly disagree with simulation.
struct AnalyticOptions {
  bool corrupt_coefficients = false;
};

namespace detail {

inline CoefficientTable coefficients_for(int l, int n_antennas, const AnalyticOptions& opt) {
  CoefficientTable t = c_coefficients(l, n_antennas);
  if (opt.corrupt_coefficients)
    for (std::size_t j = 1; j < t.size(); ++j) t.values[j] *= 1.5L;
  return t;
}

inline void require_nonnegative(double x, const char* what) {
  if (!(x >= 0)) throw std::domain_error(std::string(what) + ": x must be >= 0");
}

}  // namespace detail

/// CDF of the best-of-K Gamma(N, lambda_ps) channel gain.
inline double best_channel_cdf(double x, int n_sts, int n_antennas, double lambda_ps,
                               const AnalyticOptions& opt = {}) {
  detail::require_nonnegative(x, "best_channel_cdf");
  if (x == 0) return 0.0;
  const long double y = static_cast<long double>(x) / lambda_ps;
  std::vector<long double> terms;
  for (int l = 0; l <= n_sts; ++l) {
    const CoefficientTable c = detail::coefficients_for(l, n_antennas, opt);
    const long double outer = binomial(n_sts, l) * ((l % 2) ? -1.0L : 1.0L) * std::exp(-l * y);
    long double power = 1.0L;
    for (std::size_t j = 0; j < c.size(); ++j) {
      terms.push_back(outer * c[j] * power);
      power *= y;
    }
  }
  return static_cast<double>(compensated_sum(std::move(terms)));
}

/// Density of the best-of-K channel gain (derivative of best_channel_cdf).
inline double best_channel_pdf(double x, int n_sts, int n_antennas, double lambda_ps) {
  detail::require_nonnegative(x, "best_channel_pdf");
  const long double lx = x;
  std::vector<long double> terms;
  for (int l = 1; l <= n_sts; ++l) {
    const CoefficientTable c = c_coefficients(l, n_antennas);
    const long double outer = binomial(n_sts, l) * ((l % 2) ? -1.0L : 1.0L) * std::exp(-l * lx / lambda_ps);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const long double scale = c[j] / std::pow(static_cast<long double>(lambda_ps), static_cast<int>(j));
      const long double xj1 = j == 0 ? 0.0L : std::pow(lx, static_cast<int>(j) - 1);
      const long double xj = std::pow(lx, static_cast<int>(j));
      terms.push_back(outer * scale * (static_cast<long double>(j) * xj1 - l / static_cast<long double>(lambda_ps) * xj));
    }
  }
  return static_cast<double>(compensated_sum(std::move(terms)));
}

/// CDF of the q-th smallest of Q i.i.d. exponential gains with mean lambda,
/// via the double binomial expansion of the order-statistics integral.
inline double ordered_gain_cdf(double x, int q, int count, double lambda) {
  detail::require_nonnegative(x, "ordered_gain_cdf");
  if (q < 1 || q > count) throw std::domain_error("ordered_gain_cdf: q must lie in [1, Q]");
  const long double iota = factorial(count) / (factorial(q - 1) * factorial(count - q));
  std::vector<long double> terms;
  for (int c = 0; c <= count - q; ++c) {
    for (int n = 0; n <= q + c; ++n) {
      const long double sign = ((c + n) % 2) ? -1.0L : 1.0L;
      terms.push_back(iota * binomial(count - q, c) * binomial(q + c, n) * sign / (q + c) *
                      std::exp(-n * static_cast<long double>(x) / lambda));
    }
  }
  return std::clamp(static_cast<double>(compensated_sum(std::move(terms))), 0.0, 1.0);
}

/// Thresholds shared by the primary and secondary closed forms.
struct OutageInputs {
  std::vector<double> gamma_th;  // 2^(R/prelog) - 1 for every receiver
  double mu = 0.0;               // ST decoding threshold composite (inf when ST can never decode)
  std::vector<double> theta;     // per-stage decoding composite (inf when the stage is infeasible)
  double rho = 0.0;
  double i_si = 0.0;             // self-interference seen by the ST decoder (0 outside FD)
  double snr = 0.0;              // linear transmit SNR
};

inline OutageInputs make_outage_inputs(const SystemParams& p, DuplexMode mode) {
  if (mode == DuplexMode::OMA_TDMA) throw std::invalid_argument("closed forms cover the NOMA modes only");
  const double prelog = noma_prelog(mode);
  OutageInputs in;
  in.rho = effective_rho(p, mode);
  in.i_si = mode == DuplexMode::FD ? p.i_si : 0.0;
  in.snr = p.snr_linear();
  in.gamma_th.reserve(p.receivers());
  for (double r : p.target_rates) in.gamma_th.push_back(std::exp2(r / prelog) - 1.0);
  const double g0 = in.gamma_th[0];
  const double st_margin = 1.0 - g0 * in.rho * in.i_si;
  in.mu = st_margin > 0 ? g0 / ((1.0 - p.beta) * st_margin) : std::numeric_limits<double>::infinity();
  in.theta.reserve(p.receivers());
  for (std::size_t m = 0; m < p.receivers(); ++m) {
    const double margin = p.alpha[m] - p.alpha.tail_sum(m) * in.gamma_th[m];
    in.theta.push_back(margin > 0 ? in.gamma_th[m] / (in.rho * margin) : std::numeric_limits<double>::infinity());
  }
  return in;
}

struct AnalyticOutage {
  double probability = 1.0;  // clamped to [0, 1]
  double raw = 1.0;          // value of the closed form before clamping
  bool clamped = false;      // the large-argument approximation left [0, 1]
  bool guard_outage = false; // threshold guard forced certain outage
};

/// Phi_1 + Phi_2 for the receiver holding the q-th smallest of Q gains,
/// with receiver-link mean `lambda_recv` and decoding composite `theta`.
inline AnalyticOutage closed_form_outage(const OutageInputs& in, const SystemParams& p, int q, double lambda_recv,
                                         double theta, const AnalyticOptions& opt = {}) {
  AnalyticOutage out;
  if (!std::isfinite(in.mu) || !std::isfinite(theta)) {
    out.guard_outage = true;
    return out;
  }
  const int count = static_cast<int>(p.receivers());
  const int K = p.n_sts;
  const long double snr = in.snr;
  const long double lps = p.lambda_ps;
  const long double arg = in.mu / (lps * snr);  // mu / (lambda_ps * snr)
  const long double rate = static_cast<long double>(theta) / (static_cast<long double>(lambda_recv) * lps * snr);

  std::vector<CoefficientTable> tables;
  tables.reserve(static_cast<std::size_t>(K) + 1);
  for (int l = 0; l <= K; ++l) tables.push_back(detail::coefficients_for(l, p.n_antennas, opt));

  std::vector<long double> terms;
  // Phi_1: ST fails to decode x_0.
  for (int l = 0; l <= K; ++l) {
    const long double outer = binomial(K, l) * ((l % 2) ? -1.0L : 1.0L) * std::exp(-l * arg);
    long double power = 1.0L;
    for (std::size_t j = 0; j < tables[l].size(); ++j) {
      terms.push_back(outer * tables[l][j] * power);
      power *= arg;
    }
  }
  // Phi_2: ST decodes, receiver fails; e^{-a/x} ~ 1 - a/x inside the integral.
  const long double iota = factorial(count) / (factorial(q - 1) * factorial(count - q));
  for (int l = 1; l <= K; ++l) {
    const long double b = l * arg;
    const std::size_t degree = tables[l].size() - 1;
    std::vector<long double> gammas(degree + 2);
    for (std::size_t j = 0; j <= degree + 1; ++j) gammas[j] = upper_incomplete_gamma_int<long double>(static_cast<int>(j), b);
    for (int c = 0; c <= count - q; ++c) {
      for (int n = 0; n <= q + c; ++n) {
        const long double sign = ((c + n + l) % 2) ? -1.0L : 1.0L;
        const long double weight =
            iota * binomial(count - q, c) * binomial(q + c, n) * binomial(K, l) * sign / (q + c);
        const long double nt = n * rate * l;
        for (std::size_t j = 0; j <= degree; ++j) {
          const long double cj = tables[l][j] / std::pow(static_cast<long double>(l), static_cast<int>(j));
          long double bracket = (static_cast<long double>(j) + nt) * gammas[j] - gammas[j + 1];
          if (j > 0) bracket -= nt * static_cast<long double>(j) * gammas[j - 1];
          terms.push_back(weight * cj * bracket);
        }
      }
    }
  }
  out.raw = static_cast<double>(compensated_sum(std::move(terms)));
  out.probability = std::clamp(out.raw, 0.0, 1.0);
  out.clamped = out.probability != out.raw;
  return out;
}

/// True when the closed forms apply: NOMA modes with i.i.d. receiver links.
inline bool analytic_supported(const SystemParams& p, DuplexMode mode) {
  return mode != DuplexMode::OMA_TDMA && p.lambda_sp == p.lambda_sr;
}

/// Primary-network outage (PR holds the weakest gain, q = 1).
inline AnalyticOutage outage_primary_analytic(const SystemParams& p, DuplexMode mode = DuplexMode::FD,
                                              const AnalyticOptions& opt = {}) {
  validate(p);
  const OutageInputs in = make_outage_inputs(p, mode);
  return closed_form_outage(in, p, 1, p.lambda_sp, in.theta[0], opt);
}

/// Outage of SR_m, m in 1..M: every SIC stage 0..m must succeed, so the
/// binding composite is the largest theta among those stages.
inline AnalyticOutage outage_secondary_analytic(const SystemParams& p, int m, DuplexMode mode = DuplexMode::FD,
                                                const AnalyticOptions& opt = {}) {
  validate(p);
  if (m < 1 || m > p.n_srs) throw std::domain_error("outage_secondary_analytic: m must lie in [1, M]");
  const OutageInputs in = make_outage_inputs(p, mode);
  const double theta = *std::max_element(in.theta.begin(), in.theta.begin() + m + 1);
  return closed_form_outage(in, p, m + 1, p.lambda_sr, theta, opt);
}

/// All M+1 closed-form outage probabilities (PR first).
inline std::vector<double> outage_analytic_all(const SystemParams& p, DuplexMode mode = DuplexMode::FD,
                                               const AnalyticOptions& opt = {}) {
  std::vector<double> out{outage_primary_analytic(p, mode, opt).probability};
  for (int m = 1; m <= p.n_srs; ++m) out.push_back(outage_secondary_analytic(p, m, mode, opt).probability);
  return out;
}

inline Throughput throughput_analytic(const SystemParams& p, DuplexMode mode = DuplexMode::FD) {
  return throughput_from_outage(p, outage_analytic_all(p, mode));
}

}  // namespace fdnoma
