#pragma once

// Command-line front end: sweep | verify | bound | bits.
// Exit codes: 0 success, 1 failed verification, 2 bad flags or inputs.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "iafb/experiments.hpp"

namespace iafb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::string_view kSweepHeader =
    "snr_db,bits,mean_sum_pfb,mean_sum_lfb,mean_sum_delta,stderr_sum_lfb";

/// Fixed notation, 6 decimals, '.' separator regardless of locale.
inline std::string format_fixed6(double x) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 6);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  if (used != text.size()) throw InvalidArgument("not a number: '" + text + "'");
  return value;
}

/// "start:stop:step" in dB, stop included when it lands on the grid; a lone
/// number is a one-point grid.
inline std::vector<double> parse_snr_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() == 1) return {parse_double(parts[0])};
  if (parts.size() != 3) {
    throw InvalidArgument("SNR grid must be start:stop:step, got '" + spec + "'");
  }
  const double start = parse_double(parts[0]);
  const double stop = parse_double(parts[1]);
  const double step = parse_double(parts[2]);
  if (!(step > 0.0) || stop < start) {
    throw InvalidArgument("SNR grid needs step > 0 and stop >= start");
  }
  const auto count =
      static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) grid.push_back(start + k * step);
  return grid;
}

inline std::array<double, 3> parse_gain_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    values.push_back(parse_double(item));
  }
  if (values.size() != 3) {
    throw InvalidArgument("--a expects three comma-separated values");
  }
  return {values[0], values[1], values[2]};
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << format_fixed6(r.snr_db) << ',' << r.bits << ','
       << format_fixed6(r.mean_sum_pfb) << ',' << format_fixed6(r.mean_sum_lfb)
       << ',' << format_fixed6(r.mean_sum_delta) << ','
       << format_fixed6(r.stderr_sum_lfb) << '\n';
  }
}

struct NamedCheck {
  std::string name;
  std::function<VerificationReport()> run;
};

/// The default verification suite. `trials` of 0 keeps each check's default
/// sample size.
inline std::vector<NamedCheck> verification_suite(std::uint64_t seed,
                                                  int trials,
                                                  unsigned threads) {
  const auto n = [trials](int fallback) { return trials > 0 ? trials : fallback; };
  const auto sub_seed = [seed](std::uint64_t k) {
    return derive_seed(seed, k, StreamTag::kVerification);
  };
  std::vector<NamedCheck> suite;
  std::uint64_t k = 0;
  for (auto which : {IsotropyTarget::kPrecoder, IsotropyTarget::kCombiner,
                     IsotropyTarget::kEffectiveDirection,
                     IsotropyTarget::kCodeword}) {
    suite.push_back({to_string(which), [=, s = sub_seed(k++)] {
                       return verify_isotropy(which, n(10000), s);
                     }});
  }
  for (int bits : {2, 4, 8, 12}) {
    suite.push_back({"quantization-bound-b" + std::to_string(bits),
                     [=, s = sub_seed(k++)] {
                       return verify_quantization_bound(bits, 2, n(10000), s);
                     }});
  }
  suite.push_back({"interference-gains", [=, s = sub_seed(k++)] {
                     return verify_interference_gains(n(10000), s);
                   }});
  suite.push_back({"rate-loss", [=, s = sub_seed(k++)] {
                     SimConfig cfg;
                     cfg.master_seed = s;
                     cfg.threads = threads;
                     return verify_rate_loss_theorem(
                         cfg, SnrPoint::from_db(20.0), std::nullopt, n(10000));
                   }});
  suite.push_back({"multiplexing-gain", [=, s = sub_seed(k++)] {
                     SimConfig cfg;
                     cfg.master_seed = s;
                     cfg.threads = threads;
                     cfg.snr_grid_db = {40, 50, 60};
                     cfg.policy = FixedBits{10};
                     return verify_multiplexing_gain(cfg, n(2000));
                   }});
  return suite;
}

inline void print_report(std::ostream& os, const VerificationReport& r) {
  std::ostringstream line;
  line << std::left << std::setw(26) << r.name << (r.passed ? "PASS" : "FAIL")
       << "  statistic=" << std::setprecision(6) << r.statistic << " "
       << r.relation << " " << r.threshold << "  trials=" << r.trials;
  if (!r.detail.empty()) line << "  [" << r.detail << "]";
  os << line.str() << '\n';
}

/// Runs one CLI invocation. argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Interference alignment with limited feedback: Monte Carlo "
               "simulator for the two-cell two-user MIMO uplink"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Mean sum rates over an SNR grid (CSV)");
  std::string snr_spec = "0:50:10";
  std::string policy = "scaled";
  int bits = 10;
  double tau = 2.0;
  double a_sum = 3 * kDefaultInterferenceGain;
  std::string a_list;
  int trials = 2000;
  int m = 2;
  int n = 3;
  std::string out_path;
  int exhaustive_max_bits = 14;
  sweep->add_option("--snr", snr_spec, "SNR grid start:stop:step in dB");
  sweep->add_option("--policy", policy, "Feedback-bit policy")
      ->check(CLI::IsMember({"fixed", "scaled"}));
  sweep->add_option("--bits", bits, "Bits per user for the fixed policy");
  sweep->add_option("--tau", tau, "Rate-loss budget factor (scaled policy)");
  sweep->add_option("--a-sum", a_sum, "Sum of interferer gains A_j");
  sweep->add_option("--a", a_list, "Interferer gains A_j as a,b,c");
  sweep->add_option("--trials", trials, "Monte Carlo trials per SNR point");
  sweep->add_option("--seed", seed, "Master seed");
  sweep->add_option("--m", m, "Transmit antennas per user");
  sweep->add_option("--n", n, "Receive antennas per base station");
  sweep->add_option("--out", out_path, "Write CSV here instead of stdout");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_option("--exhaustive-max-bits", exhaustive_max_bits,
                    "Largest B searched with an explicit codebook");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the statistical verification suite");
  std::string only;
  int verify_trials = 0;
  verify->add_option("--only", only, "Run a single named check");
  verify->add_option("--trials", verify_trials, "Override every check's sample size");
  verify->add_option("--seed", seed, "Master seed");
  verify->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // bits
  auto* bits_cmd = app.add_subcommand("bits", "Feedback bits needed for a log2(tau) rate loss");
  double snr_db = 0.0;
  double bits_tau = 2.0;
  double bits_a_sum = 3 * kDefaultInterferenceGain;
  int bits_m = 2;
  bits_cmd->add_option("--snr-db", snr_db, "SNR in dB")->required();
  bits_cmd->add_option("--tau", bits_tau, "Rate-loss budget factor");
  bits_cmd->add_option("--a-sum", bits_a_sum, "Sum of interferer gains A_j");
  bits_cmd->add_option("--m", bits_m, "Transmit antennas per user");
  bits_cmd->add_option("--seed", seed, "Accepted for uniformity; unused");

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "Per-user rate-loss upper bound");
  double bound_snr_db = 0.0;
  std::optional<double> bound_bits;
  double bound_tau = 2.0;
  std::string bound_a = "1.5,1.5,1.5";
  int bound_m = 2;
  bound_cmd->add_option("--snr-db", bound_snr_db, "SNR in dB")->required();
  bound_cmd->add_option("--bits", bound_bits,
                        "Feedback bits (default: real-valued scaling-law count)");
  bound_cmd->add_option("--tau", bound_tau, "Rate-loss budget factor");
  bound_cmd->add_option("--a", bound_a, "Interferer gains A_j as a,b,c");
  bound_cmd->add_option("--m", bound_m, "Transmit antennas per user");
  bound_cmd->add_option("--seed", seed, "Accepted for uniformity; unused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sweep->parsed()) {
      SimConfig cfg;
      cfg.dims = SystemDims{m, n};
      cfg.snr_grid_db = parse_snr_grid(snr_spec);
      if (!a_list.empty()) {
        const auto a = parse_gain_list(a_list);
        a_sum = a[0] + a[1] + a[2];
        for (auto& row : cfg.a_constants) row = a;
      }
      if (policy == "fixed") {
        cfg.policy = FixedBits{bits};
      } else {
        cfg.policy = ScaledBits{tau, a_sum};
      }
      cfg.trials = trials;
      cfg.master_seed = seed;
      cfg.threads = threads;
      cfg.exhaustive_max_bits = exhaustive_max_bits;
      cfg.validate();
      const auto rows = run_sweep(cfg);
      if (out_path.empty()) {
        write_sweep_csv(out, rows);
      } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
          err << "error: cannot open " << out_path << " for writing\n";
          return kExitUsage;
        }
        write_sweep_csv(file, rows);
      }
      return kExitOk;
    }

    if (verify->parsed()) {
      auto suite = verification_suite(seed, verify_trials, threads);
      if (!only.empty()) {
        std::erase_if(suite, [&](const NamedCheck& c) { return c.name != only; });
        if (suite.empty()) {
          err << "error: unknown check '" << only << "'\n";
          return kExitUsage;
        }
      }
      bool all_passed = true;
      for (const auto& check : suite) {
        const auto report = check.run();
        print_report(out, report);
        all_passed = all_passed && report.passed;
      }
      return all_passed ? kExitOk : kExitVerificationFailed;
    }

    if (bits_cmd->parsed()) {
      out << feedback_bits_required(SnrPoint::from_db(snr_db), bits_tau,
                                    bits_m, bits_a_sum)
          << '\n';
      return kExitOk;
    }

    if (bound_cmd->parsed()) {
      BoundParams p;
      p.tau = bound_tau;
      p.a = parse_gain_list(bound_a);
      p.m = bound_m;
      const SnrPoint snr = SnrPoint::from_db(bound_snr_db);
      p.bits = bound_bits ? *bound_bits
                          : std::max(0.0, feedback_bits_real(snr, p.tau, p.m,
                                                             p.a_sum()));
      out << format_fixed6(rate_loss_bound(p, snr)) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("iafb");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace iafb::cli
