#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fdnoma {

enum class DuplexMode { FD, HD, OMA_TDMA };

inline std::string_view to_string(DuplexMode mode) {
  switch (mode) {
    case DuplexMode::FD: return "fd";
    case DuplexMode::HD: return "hd";
    case DuplexMode::OMA_TDMA: return "oma";
  }
  return "?";
}

inline DuplexMode parse_mode(std::string_view name) {
  if (name == "fd" || name == "FD") return DuplexMode::FD;
  if (name == "hd" || name == "HD") return DuplexMode::HD;
  if (name == "oma" || name == "OMA" || name == "oma_tdma" || name == "OMA_TDMA")
    return DuplexMode::OMA_TDMA;
  throw std::invalid_argument("unknown duplex mode '" + std::string(name) + "'");
}

/// Rate prelog of the NOMA downlink: FD relays receive and forward in the
/// same slot, HD relays spend half the block listening.
inline double noma_prelog(DuplexMode mode) { return mode == DuplexMode::HD ? 0.5 : 1.0; }

/// How the ST powers each orthogonal downlink slot in the OMA-TDMA baseline.
enum class OmaSlotPower {
  Full,              // whole harvested transmit power in every slot
  NomaCoefficients,  // slot i gets alpha_i of the transmit power
};

/// NOMA power coefficients alpha_0 >= alpha_1 >= ... >= alpha_M, sum <= 1.
class PowerAllocation {
 public:
  static constexpr double kTolerance = 1e-9;

  PowerAllocation() = default;
  explicit PowerAllocation(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty()) throw std::invalid_argument("power allocation needs at least one coefficient");
    double total = 0.0;
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
      const double a = coefficients_[i];
      if (!std::isfinite(a) || a < -kTolerance || a > 1.0 + kTolerance)
        throw std::invalid_argument("power coefficient alpha_" + std::to_string(i) + " outside [0,1]");
      if (i > 0 && a > coefficients_[i - 1] + kTolerance)
        throw std::invalid_argument("power coefficients must be nonincreasing (alpha_" + std::to_string(i - 1) +
                                    " < alpha_" + std::to_string(i) + ")");
      total += a;
    }
    if (total > 1.0 + kTolerance) throw std::invalid_argument("power coefficients sum to more than 1");
  }

  [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  [[nodiscard]] std::size_t size() const noexcept { return coefficients_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return coefficients_[i]; }

  /// Sum of alpha_i for i > index (the residual NOMA interference weight).
  [[nodiscard]] double tail_sum(std::size_t index) const {
    return std::accumulate(coefficients_.begin() + static_cast<std::ptrdiff_t>(index) + 1, coefficients_.end(), 0.0);
  }

  friend bool operator==(const PowerAllocation&, const PowerAllocation&) = default;

 private:
  std::vector<double> coefficients_;
};

/// One fading draw seen by the selected secondary transmitter.
struct ChannelRealization {
  double best_gain = 0.0;             // ||h_ps_b||^2 after best-ST selection
  std::vector<double> sorted_gains;   // PR gain first, then SR_1..SR_M, ascending
};

/// Every scalar of the overlay FD-NOMA/SWIPT model.
struct SystemParams {
  int n_antennas = 5;
  int n_sts = 3;
  int n_srs = 2;
  double lambda_ps = 5.0;
  double lambda_sp = 50.0;
  double lambda_sr = 50.0;
  double beta = 0.8;
  double eta = 0.75;
  double xi = 1.0;
  double psi = 0.75;
  double i_si = 0.8912509381337456;  // sqrt(10^(-1/10)), zeta = -1 dB
  double snr_db = -9.0;
  std::vector<double> target_rates{0.5, 0.5, 0.5};
  PowerAllocation alpha{std::vector<double>{0.6, 0.3, 0.1}};
  double kappa = 0.5;

  // Model knobs for the baselines; defaults follow the documented choices.
  bool hd_self_energy_recycling = false;
  OmaSlotPower oma_slot_power = OmaSlotPower::Full;

  [[nodiscard]] double snr_linear() const { return std::pow(10.0, snr_db / 10.0); }
  [[nodiscard]] std::size_t receivers() const { return static_cast<std::size_t>(n_srs) + 1; }
  [[nodiscard]] double harvest_product() const { return eta * beta * xi * psi; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Residual self-interference gain from the suppression level zeta in dB.
inline double self_interference_from_zeta_db(double zeta_db) { return std::sqrt(std::pow(10.0, zeta_db / 10.0)); }

/// Throws std::invalid_argument naming the first violated field.
inline void validate(const SystemParams& p) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (p.n_antennas < 1) fail("n_antennas", "must be a positive integer");
  if (p.n_sts < 1) fail("n_sts", "must be a positive integer");
  if (p.n_srs < 1) fail("n_srs", "must be a positive integer");
  if (!(p.lambda_ps > 0)) fail("lambda_ps", "must be positive");
  if (!(p.lambda_sp > 0)) fail("lambda_sp", "must be positive");
  if (!(p.lambda_sr > 0)) fail("lambda_sr", "must be positive");
  if (!(p.beta > 0 && p.beta < 1)) fail("beta", "must lie strictly inside (0,1)");
  if (!(p.eta > 0 && p.eta <= 1)) fail("eta", "must lie in (0,1]");
  if (!(p.xi >= 0 && p.xi <= 1)) fail("xi", "must lie in [0,1]");
  if (!(p.psi > 0 && p.psi < 1)) fail("psi", "must lie strictly inside (0,1)");
  if (!(p.i_si >= 0) || !std::isfinite(p.i_si)) fail("i_si", "must be a nonnegative real");
  if (!std::isfinite(p.snr_db)) fail("snr_db", "must be finite");
  if (!(p.kappa > 0 && p.kappa < 1)) fail("kappa", "must lie strictly inside (0,1)");
  if (p.target_rates.size() != p.receivers())
    fail("target_rates", "expected " + std::to_string(p.receivers()) + " entries (n_srs + 1), got " +
                             std::to_string(p.target_rates.size()));
  for (double r : p.target_rates)
    if (!(r > 0) || !std::isfinite(r)) fail("target_rates", "every target rate must be positive");
  if (p.alpha.size() != p.receivers())
    fail("alpha", "expected " + std::to_string(p.receivers()) + " coefficients (n_srs + 1), got " +
                      std::to_string(p.alpha.size()));
  if (!(p.harvest_product() * p.i_si < 1.0))
    fail("i_si", "eta*beta*xi*psi*i_si must stay below 1 for a finite transmit power");
}

/// Transmit-power conversion factor: P_sb = rho * P_s * ||h_ps_b||^2.
///
/// In FD the relay also recycles its own self-interference energy, which
/// gives the 1/(1 - eta beta xi psi I_SI) gain. HD and OMA relays do not
/// listen while they transmit, so the term is dropped unless the
/// `hd_self_energy_recycling` override is set.
inline double effective_rho(const SystemParams& p, DuplexMode mode) {
  const double prod = p.harvest_product();
  const bool recycle = mode == DuplexMode::FD || p.hd_self_energy_recycling;
  if (!recycle) return prod;
  return prod / (1.0 - prod * p.i_si);
}

}  // namespace fdnoma
