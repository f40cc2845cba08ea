#pragma once

// Monte Carlo engine: one trial runs the full design -> quantize -> rate
// pipeline; sweeps average trials over an SNR grid; the verify_* functions
// turn the statistical claims about the scheme into pass/fail reports.
//
// Every random draw comes from a stream keyed by (master seed, trial index,
// purpose), so results do not depend on thread count or scheduling.

#include <algorithm>
#include <array>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

#include "iafb/quantization.hpp"
#include "iafb/rates.hpp"
#include "iafb/stats.hpp"

namespace iafb {

inline constexpr std::uint64_t kDefaultSeed = 20101;
inline constexpr double kDefaultInterferenceGain = 1.5;
inline constexpr double kKsSignificance = 0.01;

struct FixedBits {
  int bits = 10;
};

/// B = ceil((M-1) log2 SNR + (M-1) log2(a_sum / (tau-1))) at each SNR.
struct ScaledBits {
  double tau = 2.0;
  double a_sum = 3 * kDefaultInterferenceGain;
};

using BitPolicy = std::variant<FixedBits, ScaledBits>;

struct SimConfig {
  SystemDims dims;
  std::vector<double> snr_grid_db{0, 10, 20, 30, 40, 50};
  BitPolicy policy = ScaledBits{};
  int trials = 2000;
  std::uint64_t master_seed = kDefaultSeed;
  std::array<std::array<double, 3>, kUsers> a_constants = [] {
    std::array<std::array<double, 3>, kUsers> a{};
    for (auto& row : a) row.fill(kDefaultInterferenceGain);
    return a;
  }();
  // Codebooks up to 2^exhaustive_max_bits entries are searched explicitly;
  // larger ones use the exact-in-law sampler.
  int exhaustive_max_bits = 14;
  // 0 = one worker per hardware thread.
  unsigned threads = 0;

  void validate() const {
    dims.validate();
    if (trials < 1) throw InvalidArgument("trials must be at least 1");
    if (snr_grid_db.empty()) throw InvalidArgument("SNR grid is empty");
    for (std::size_t k = 1; k < snr_grid_db.size(); ++k) {
      if (!(snr_grid_db[k] > snr_grid_db[k - 1])) {
        throw InvalidArgument("SNR grid must be strictly increasing");
      }
    }
    if (const auto* fixed = std::get_if<FixedBits>(&policy)) {
      if (fixed->bits < 0 || fixed->bits > kMaxCodebookBits) {
        throw TooManyBits(fixed->bits);
      }
    } else {
      const auto& scaled = std::get<ScaledBits>(policy);
      if (!(scaled.tau > 1.0)) throw InvalidTau(scaled.tau);
      if (!(scaled.a_sum > 0.0)) throw InvalidArgument("a_sum must be > 0");
    }
    if (exhaustive_max_bits < 0 || exhaustive_max_bits > kMaxCodebookBits) {
      throw InvalidArgument("exhaustive_max_bits must lie in [0, 24]");
    }
  }
};

inline int bits_for(const SimConfig& cfg, const SnrPoint& snr) {
  if (const auto* fixed = std::get_if<FixedBits>(&cfg.policy)) {
    return fixed->bits;
  }
  const auto& scaled = std::get<ScaledBits>(cfg.policy);
  return std::min(kMaxCodebookBits,
                  feedback_bits_required(snr, scaled.tau, cfg.dims.tx_antennas,
                                         scaled.a_sum));
}

/// Picks the explicit scan or the sampler according to the size limit.
inline QuantizationResult quantize_precoder(const CVec& v, int bits,
                                            int exhaustive_max_bits,
                                            Rng& rng) {
  if (bits <= exhaustive_max_bits) return quantize_rvq_streamed(v, bits, rng);
  if (bits > kMaxCodebookBits) throw TooManyBits(bits);
  return quantize_rvq_sampled(v, static_cast<double>(bits), rng);
}

/// Draws a channel and designs the network on it. A measure-zero failure of
/// the design triggers a fresh draw from the same stream.
inline std::pair<ChannelSet, NetworkDesign> draw_designed_network(
    const SystemDims& dims, Rng& rng) {
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0;; ++attempt) {
    ChannelSet ch = draw_channels(dims, rng);
    try {
      NetworkDesign design = design_network(ch);
      return {std::move(ch), std::move(design)};
    } catch (const ZeroVector&) {
      if (attempt + 1 == kMaxAttempts) throw;
    } catch (const AlignmentInfeasible&) {
      if (attempt + 1 == kMaxAttempts) throw;
    }
  }
}

struct TrialState {
  ChannelSet channels;
  NetworkDesign design;
  std::array<QuantizationResult, kUsers> quantized;
  RateReport report;
};

inline TrialState simulate_trial(const SimConfig& cfg, const SnrPoint& snr,
                                 int bits, std::uint64_t trial_index) {
  TrialState st;
  Rng channel_rng =
      Rng::for_stream(cfg.master_seed, trial_index, StreamTag::kChannel);
  std::tie(st.channels, st.design) =
      draw_designed_network(cfg.dims, channel_rng);

  std::array<CVec, kUsers> v_hat;
  for (int u = 0; u < kUsers; ++u) {
    Rng cb_rng = Rng::for_stream(cfg.master_seed, trial_index,
                                 StreamTag::kCodebook, static_cast<unsigned>(u));
    st.quantized[u] = quantize_precoder(st.design.precoders.v[u], bits,
                                        cfg.exhaustive_max_bits, cb_rng);
    v_hat[u] = st.quantized[u].v_hat;
  }

  std::array<double, kUsers> pfb{};
  std::array<double, kUsers> lfb{};
  for (int u = 0; u < kUsers; ++u) {
    pfb[u] = rate_perfect(st.channels, st.design.combiners,
                          st.design.precoders.v, u, snr);
    lfb[u] = rate_limited(st.channels, st.design.combiners, v_hat, u, snr);
  }
  st.report = RateReport::from_rates(pfb, lfb);
  return st;
}

inline RateReport run_trial(const SimConfig& cfg, const SnrPoint& snr,
                            int bits, std::uint64_t trial_index) {
  return simulate_trial(cfg, snr, bits, trial_index).report;
}

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads ? threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(
                             workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

inline std::vector<RateReport> collect_reports(const SimConfig& cfg,
                                               const SnrPoint& snr, int bits,
                                               int trials) {
  std::vector<RateReport> reports(static_cast<std::size_t>(trials));
  parallel_for(reports.size(), cfg.threads, [&](std::size_t t) {
    reports[t] = run_trial(cfg, snr, bits, t);
  });
  return reports;
}

struct SweepRow {
  double snr_db = 0.0;
  int bits = 0;
  double mean_sum_pfb = 0.0;
  double mean_sum_lfb = 0.0;
  double mean_sum_delta = 0.0;
  double stderr_sum_lfb = 0.0;
};

template <typename Field>
stats::Summary summarize_field(const std::vector<RateReport>& reports,
                               Field field) {
  std::vector<double> xs(reports.size());
  std::transform(reports.begin(), reports.end(), xs.begin(), field);
  return stats::summarize(xs);
}

inline SweepRow aggregate_row(double snr_db, int bits,
                              const std::vector<RateReport>& reports) {
  SweepRow row;
  row.snr_db = snr_db;
  row.bits = bits;
  row.mean_sum_pfb =
      summarize_field(reports, [](const RateReport& r) { return r.sum_pfb; })
          .mean;
  const auto lfb =
      summarize_field(reports, [](const RateReport& r) { return r.sum_lfb; });
  row.mean_sum_lfb = lfb.mean;
  row.stderr_sum_lfb = lfb.stderr_mean;
  row.mean_sum_delta =
      summarize_field(reports, [](const RateReport& r) { return r.sum_delta; })
          .mean;
  return row;
}

inline std::vector<SweepRow> run_sweep(const SimConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;
  rows.reserve(cfg.snr_grid_db.size());
  for (double db : cfg.snr_grid_db) {
    const SnrPoint snr = SnrPoint::from_db(db);
    const int bits = bits_for(cfg, snr);
    rows.push_back(
        aggregate_row(db, bits, collect_reports(cfg, snr, bits, cfg.trials)));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Verification

struct VerificationReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  // How statistic is compared with threshold for a pass: "<=" or ">".
  std::string relation = "<=";
  bool passed = false;
  int trials = 0;
  std::string detail;
};

inline VerificationReport make_report(std::string name, double statistic,
                                      std::string relation, double threshold,
                                      int trials, std::string detail = {}) {
  VerificationReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.relation = std::move(relation);
  r.passed = r.relation == ">" ? statistic > threshold : statistic <= threshold;
  r.trials = trials;
  r.detail = std::move(detail);
  return r;
}

enum class IsotropyTarget {
  kPrecoder,           // v_1, expected isotropic in C^2
  kCombiner,           // w_1, expected isotropic in C^3
  kEffectiveDirection, // g_{1,1} / ||g_{1,1}||, expected isotropic in C^2
  kCodeword,           // RVQ codeword, isotropic by construction
  kBiasedControl,      // always e_1; must be rejected
};

inline std::string to_string(IsotropyTarget which) {
  switch (which) {
    case IsotropyTarget::kPrecoder: return "isotropy-precoder";
    case IsotropyTarget::kCombiner: return "isotropy-combiner";
    case IsotropyTarget::kEffectiveDirection: return "isotropy-effective-dir";
    case IsotropyTarget::kCodeword: return "isotropy-codeword";
    case IsotropyTarget::kBiasedControl: return "isotropy-biased-control";
  }
  return "isotropy-unknown";
}

inline int isotropy_dimension(IsotropyTarget which) {
  return which == IsotropyTarget::kCombiner ? 3 : 2;
}

/// Samples of |u^H x|^2 with u the normalised all-ones vector.
inline std::vector<double> isotropy_samples(IsotropyTarget which, int trials,
                                            std::uint64_t seed) {
  const int dim = isotropy_dimension(which);
  const CVec u = CVec::Ones(dim) / std::sqrt(static_cast<double>(dim));
  const SystemDims dims;
  std::vector<double> out(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(t),
                              StreamTag::kVerification);
    CVec x;
    switch (which) {
      case IsotropyTarget::kPrecoder:
        x = draw_designed_network(dims, rng).second.precoders.v[0];
        break;
      case IsotropyTarget::kCombiner:
        x = draw_designed_network(dims, rng).second.combiners.w[0];
        break;
      case IsotropyTarget::kEffectiveDirection: {
        const auto [ch, design] = draw_designed_network(dims, rng);
        x = unit_normalize(
            effective_channel(design.combiners.w[0], ch.link(0, 0)));
        break;
      }
      case IsotropyTarget::kCodeword:
        x = generate_rvq_codebook(0, dim, rng).codewords.col(0);
        break;
      case IsotropyTarget::kBiasedControl:
        x = CVec::Unit(dim, 0);
        break;
    }
    out[static_cast<std::size_t>(t)] = std::norm(u.dot(x));
  }
  return out;
}

/// KS test of |u^H x|^2 against Beta(1, d-1); passes iff p > 0.01.
inline VerificationReport verify_isotropy(IsotropyTarget which, int trials,
                                          std::uint64_t seed) {
  if (trials < 1000) throw InvalidArgument("isotropy check needs >= 1000 trials");
  const int dim = isotropy_dimension(which);
  const auto ks = stats::ks_test(
      isotropy_samples(which, trials, seed),
      [dim](double t) { return stats::isotropic_coherence_cdf(t, dim); });
  std::ostringstream detail;
  detail << "KS distance " << ks.distance << " vs Beta(1," << dim - 1 << ")";
  return make_report(to_string(which), ks.p_value, ">", kKsSignificance,
                     trials, detail.str());
}

/// Empirical E[sin^2 theta] of RVQ (explicit scan) against 2^(-B/(M-1)).
inline VerificationReport verify_quantization_bound(int bits, int m,
                                                    int trials,
                                                    std::uint64_t seed) {
  std::vector<double> sin2(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng dir_rng = Rng::for_stream(seed, static_cast<std::uint64_t>(t),
                                  StreamTag::kDirection);
    const CVec v = unit_normalize(draw_complex_gaussian_vector(m, dir_rng));
    Rng cb_rng = Rng::for_stream(seed, static_cast<std::uint64_t>(t),
                                 StreamTag::kCodebook);
    sin2[static_cast<std::size_t>(t)] =
        quantize_rvq_streamed(v, bits, cb_rng).sin2;
  }
  const auto s = stats::summarize(sin2);
  const double bound = std::exp2(-static_cast<double>(bits) / (m - 1));
  std::ostringstream detail;
  detail << "mean sin^2 " << s.mean << ", bound 2^(-B/(M-1)) " << bound
         << ", stderr " << s.stderr_mean;
  return make_report("quantization-bound-b" + std::to_string(bits), s.mean,
                     "<=", bound + 3.0 * s.stderr_mean, trials, detail.str());
}

/// The three interferers of `user`, in ascending user order.
inline std::array<int, 3> interferers_of(int user) {
  std::array<int, 3> out{};
  int k = 0;
  for (int m = 0; m < kUsers; ++m) {
    if (m != user) out[k++] = m;
  }
  return out;
}

inline bool same_cell(int a, int b) { return serving_cell(a) == serving_cell(b); }

struct InterferenceGains {
  // interferer[i][k]: E||g||^2 for decoding user i and interferer
  // interferers_of(i)[k].
  std::array<std::array<stats::Summary, 3>, kUsers> interferer{};
  std::array<stats::Summary, kUsers> desired{};

  std::array<double, 3> a(int user) const {
    return {interferer[user][0].mean, interferer[user][1].mean,
            interferer[user][2].mean};
  }
};

/// Empirical means of ||g_{k,m}||^2 = ||H_{k,m}^H w_i||^2 under the aligned
/// design, for every decoding user and each of its interferers.
inline InterferenceGains estimate_interference_gains(int trials,
                                                     std::uint64_t seed) {
  const SystemDims dims;
  std::array<std::array<std::vector<double>, 3>, kUsers> inter;
  std::array<std::vector<double>, kUsers> desired;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(t),
                              StreamTag::kChannel);
    const auto [ch, design] = draw_designed_network(dims, rng);
    for (int i = 0; i < kUsers; ++i) {
      const int cell = serving_cell(i);
      const CVec& w = design.combiners.w[i];
      desired[i].push_back(effective_channel(w, ch.link(cell, i)).squaredNorm());
      const auto others = interferers_of(i);
      for (int k = 0; k < 3; ++k) {
        inter[i][k].push_back(
            effective_channel(w, ch.link(cell, others[k])).squaredNorm());
      }
    }
  }
  InterferenceGains out;
  for (int i = 0; i < kUsers; ++i) {
    out.desired[i] = stats::summarize(desired[i]);
    for (int k = 0; k < 3; ++k) out.interferer[i][k] = stats::summarize(inter[i][k]);
  }
  return out;
}

inline constexpr double kIntraCellInterferenceGain = 1.0;

/// Interferer gains against their expected means: 1.5 for inter-cell links,
/// 1.0 for the intra-cell link (the combiner already nulls one of its two
/// dimensions). Passes when every link is within 0.1.
inline VerificationReport verify_interference_gains(int trials,
                                                    std::uint64_t seed) {
  const auto gains = estimate_interference_gains(trials, seed);
  double worst = 0.0;
  std::ostringstream detail;
  for (int i = 0; i < kUsers; ++i) {
    const auto others = interferers_of(i);
    for (int k = 0; k < 3; ++k) {
      const bool intra = same_cell(i, others[k]);
      const double mean = gains.interferer[i][k].mean;
      const double expected =
          intra ? kIntraCellInterferenceGain : kDefaultInterferenceGain;
      worst = std::max(worst, std::abs(mean - expected));
      detail << "g" << i + 1 << others[k] + 1 << "=" << mean
             << (intra ? "(intra) " : " ");
    }
  }
  return make_report("interference-gains", worst, "<=", 0.1, trials,
                     detail.str());
}

struct RateLossMeasurement {
  std::array<stats::Summary, kUsers> delta{};
  std::array<double, kUsers> bound{};
  stats::Summary sum_delta;
  int bits = 0;
};

inline RateLossMeasurement measure_rate_loss(const SimConfig& cfg,
                                             const SnrPoint& snr, int bits,
                                             int trials,
                                             const InterferenceGains& gains) {
  const auto reports = collect_reports(cfg, snr, bits, trials);
  RateLossMeasurement out;
  out.bits = bits;
  for (int i = 0; i < kUsers; ++i) {
    out.delta[i] = summarize_field(
        reports, [i](const RateReport& r) { return r.delta[i]; });
    BoundParams p;
    p.a = gains.a(i);
    p.m = cfg.dims.tx_antennas;
    p.bits = bits;
    out.bound[i] = rate_loss_bound(p, snr);
  }
  out.sum_delta =
      summarize_field(reports, [](const RateReport& r) { return r.sum_delta; });
  return out;
}

/// Bit count from the scaling law using the largest empirical A-sum of any
/// user, so every user's budget is met.
inline int scaled_bits_from_gains(const SnrPoint& snr, double tau, int m,
                                  const InterferenceGains& gains) {
  double a_sum = 0.0;
  for (int i = 0; i < kUsers; ++i) {
    const auto a = gains.a(i);
    a_sum = std::max(a_sum, a[0] + a[1] + a[2]);
  }
  return feedback_bits_required(snr, tau, m, a_sum);
}

/// Per-user mean rate loss against the bound (A_j estimated empirically);
/// passes iff mean_i <= bound_i + 3 stderr_i for every user. Without an
/// explicit bit count, B follows the scaling law for the policy's tau (2 for
/// a fixed policy) and the empirical A-sums.
inline VerificationReport verify_rate_loss_theorem(const SimConfig& cfg,
                                                   const SnrPoint& snr,
                                                   std::optional<int> bits,
                                                   int trials) {
  const auto gains = estimate_interference_gains(
      trials, derive_seed(cfg.master_seed, 0, StreamTag::kVerification, 1));
  if (!bits) {
    const auto* scaled = std::get_if<ScaledBits>(&cfg.policy);
    bits = scaled_bits_from_gains(snr, scaled ? scaled->tau : 2.0,
                                  cfg.dims.tx_antennas, gains);
  }
  const auto m = measure_rate_loss(cfg, snr, *bits, trials, gains);
  double worst = -1e300;
  std::ostringstream detail;
  detail << "B=" << *bits << " snr=" << snr.db() << "dB";
  for (int i = 0; i < kUsers; ++i) {
    worst = std::max(worst, m.delta[i].mean - m.bound[i] -
                                3.0 * m.delta[i].stderr_mean);
    detail << " dR" << i + 1 << "=" << m.delta[i].mean << "/" << m.bound[i];
  }
  return make_report("rate-loss", worst, "<=", 0.0, trials, detail.str());
}

struct SlopeMeasurement {
  double slope_pfb = 0.0;
  double slope_lfb = 0.0;
  std::vector<SweepRow> rows;  // rows used for the fit
};

/// Fits the sum-rate slope over the grid points within 20 dB of the top.
inline SlopeMeasurement measure_slopes(const SimConfig& cfg, int trials) {
  SimConfig run = cfg;
  run.trials = trials;
  const double top = run.snr_grid_db.back();
  std::erase_if(run.snr_grid_db, [top](double db) { return db < top - 20.0; });
  SlopeMeasurement out;
  out.rows = run_sweep(run);
  std::vector<std::pair<double, double>> pfb;
  std::vector<std::pair<double, double>> lfb;
  for (const auto& row : out.rows) {
    const double lin = SnrPoint::from_db(row.snr_db).linear();
    pfb.emplace_back(lin, row.mean_sum_pfb);
    lfb.emplace_back(lin, row.mean_sum_lfb);
  }
  out.slope_pfb = multiplexing_gain(pfb);
  out.slope_lfb = multiplexing_gain(lfb);
  return out;
}

inline constexpr double kMinSlope = 3.8;
inline constexpr double kMaxSlope = 4.2;

/// Harness entry: checks a slope estimate from caller-supplied points.
inline VerificationReport verify_multiplexing_gain_points(
    std::span<const std::pair<double, double>> points, int trials) {
  const double slope = multiplexing_gain(points);
  const double miss = std::max({0.0, kMinSlope - slope, slope - kMaxSlope});
  std::ostringstream detail;
  detail << "slope " << slope << " expected in [" << kMinSlope << ", "
         << kMaxSlope << "]";
  return make_report("multiplexing-gain", miss, "<=", 0.0, trials,
                     detail.str());
}

inline VerificationReport verify_multiplexing_gain(const SimConfig& cfg,
                                                   int trials) {
  if (cfg.snr_grid_db.empty() || cfg.snr_grid_db.back() < 50.0) {
    throw InvalidArgument("multiplexing-gain check needs a grid reaching 50 dB");
  }
  const auto m = measure_slopes(cfg, trials);
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : m.rows) {
    pts.emplace_back(SnrPoint::from_db(row.snr_db).linear(), row.mean_sum_pfb);
  }
  auto report = verify_multiplexing_gain_points(pts, trials);
  report.detail += "; limited-feedback slope " + std::to_string(m.slope_lfb);
  return report;
}

}  // namespace iafb
