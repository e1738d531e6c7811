#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace minshare {

// Excitation signals h : N -> R>=0. Amplitudes are non-negative and periods are
// positive integers; validate_signal() reports the first broken invariant.

struct Constant {
  double amplitude = 0.0;
  bool operator==(const Constant&) const = default;
};

/// amplitude * |sin(pi t / period)|
struct RectifiedSine {
  double amplitude = 0.0;
  std::uint32_t period = 1;
  bool operator==(const RectifiedSine&) const = default;
};

/// amplitude * max{0, sin(2 pi t / period)}
struct HalfWaveSine {
  double amplitude = 0.0;
  std::uint32_t period = 1;
  bool operator==(const HalfWaveSine&) const = default;
};

/// amplitude on the trailing `duty` fraction of every period, zero elsewhere.
struct SquareWave {
  double amplitude = 0.0;
  std::uint32_t period = 1;
  double duty = 1.0;
  bool operator==(const SquareWave&) const = default;
};

/// scale / (1 + t)
struct Vanishing {
  double scale = 1.0;
  bool operator==(const Vanishing&) const = default;
};

/// Finite sample table. A non-periodic table is zero past its last entry.
struct Table {
  std::vector<double> values;
  bool periodic = true;
  bool operator==(const Table&) const = default;
};

using SignalSpec = std::variant<Constant, RectifiedSine, HalfWaveSine, SquareWave, Vanishing, Table>;

std::string_view kind_name(const SignalSpec& spec);
std::optional<std::string> validate_signal(const SignalSpec& spec);

double evaluate(const SignalSpec& spec, std::uint64_t t);

/// Period of the sampled signal, or nullopt for aperiodic variants.
std::optional<std::uint64_t> period(const SignalSpec& spec);

/// limsup of the sampled signal: the period maximum for periodic variants and
/// zero for Vanishing and non-periodic tables.
double limsup_value(const SignalSpec& spec);

/// Nominal amplitude (A, or a for Vanishing, or the table maximum).
double amplitude(const SignalSpec& spec);

struct ExcitationCertificate {
  double h_lower = 0.0;
  std::uint64_t delta_window = 1;
  bool operator==(const ExcitationCertificate&) const = default;
};

/// (min over agents of the per-period maximum, max period + 1) when every
/// signal is periodic and not identically zero; nullopt otherwise.
std::optional<ExcitationCertificate> uniform_excitation_certificate(std::span<const SignalSpec> specs);

/// Row i holds h_i^t for t = t0..t_end (inclusive).
Eigen::MatrixXd sample_signals(std::span<const SignalSpec> specs, std::uint64_t t0, std::uint64_t t_end);

/// Finite check of sufficient excitation from t0: for each m in 1..m_max and
/// each agent some s in {t0+1+(m-1)D, ..., t0+mD} has h^s >= h_lower.
/// `h_values` column k holds time t0 + k.
bool check_sufficient_excitation(const Eigen::MatrixXd& h_values, std::uint64_t t0,
                                 const ExcitationCertificate& cert, std::uint64_t m_max);

}  // namespace minshare
