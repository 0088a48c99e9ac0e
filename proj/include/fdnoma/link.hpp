#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fdnoma/params.hpp"

namespace fdnoma {

/// Rate the selected ST achieves when decoding the primary symbol x_0.
inline double st_decode_rate(double best_gain, const SystemParams& p, DuplexMode mode) {
  const double snr = p.snr_linear();
  const double signal = (1.0 - p.beta) * snr * best_gain;
  switch (mode) {
    case DuplexMode::FD: {
      const double si = (1.0 - p.beta) * effective_rho(p, mode) * snr * p.i_si * best_gain;
      return std::log2(1.0 + signal / (si + 1.0));
    }
    case DuplexMode::HD: return 0.5 * std::log2(1.0 + signal);
    case DuplexMode::OMA_TDMA: return p.kappa * std::log2(1.0 + signal);
  }
  return 0.0;
}

/// Per-receiver NOMA view of one realization: effective gains
/// a_i = rho * snr * g * g_i, SINR thresholds for each message and the
/// rate prelog of the mode.
struct LinkBudget {
  std::vector<double> gains;
  std::vector<double> gamma_th;
  double prelog = 1.0;

  [[nodiscard]] std::size_t size() const noexcept { return gains.size(); }
};

inline LinkBudget make_link_budget(double best_gain, const std::vector<double>& sorted_gains, const SystemParams& p,
                                   DuplexMode mode) {
  LinkBudget b;
  b.prelog = noma_prelog(mode);
  const double scale = effective_rho(p, mode) * p.snr_linear() * best_gain;
  b.gains.reserve(sorted_gains.size());
  for (double g : sorted_gains) b.gains.push_back(scale * g);
  b.gamma_th.reserve(p.target_rates.size());
  for (double r : p.target_rates) b.gamma_th.push_back(std::exp2(r / b.prelog) - 1.0);
  return b;
}

/// SINR of message `message` at receiver `receiver` once every earlier
/// message has been cancelled; only the weaker-allocated tail interferes.
template <class Coeffs>
double sinr(const Coeffs& alpha, std::size_t size, double receiver_gain, std::size_t message) {
  double tail = 0.0;
  for (std::size_t i = message + 1; i < size; ++i) tail += alpha[i];
  return alpha[message] * receiver_gain / (tail * receiver_gain + 1.0);
}

inline double sinr(const std::vector<double>& alpha, const LinkBudget& b, std::size_t receiver, std::size_t message) {
  return sinr(alpha, alpha.size(), b.gains[receiver], message);
}

}  // namespace fdnoma
