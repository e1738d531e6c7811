#include "minshare/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace minshare {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Decimal duty cycles such as 0.2 * 15 do not land exactly on integers.
constexpr double kDutySlack = 1e-9;

double per_period_max(const SignalSpec& spec, std::uint64_t p) {
  double best = 0.0;
  for (std::uint64_t t = 0; t < p; ++t) best = std::max(best, evaluate(spec, t));
  return best;
}

}  // namespace

std::string_view kind_name(const SignalSpec& spec) {
  return std::visit(overloaded{
                        [](const Constant&) { return std::string_view("constant"); },
                        [](const RectifiedSine&) { return std::string_view("rectified_sine"); },
                        [](const HalfWaveSine&) { return std::string_view("half_wave_sine"); },
                        [](const SquareWave&) { return std::string_view("square_wave"); },
                        [](const Vanishing&) { return std::string_view("vanishing"); },
                        [](const Table&) { return std::string_view("table"); },
                    },
                    spec);
}

std::optional<std::string> validate_signal(const SignalSpec& spec) {
  auto amp = [](double a) -> std::optional<std::string> {
    if (!(a >= 0.0) || !std::isfinite(a)) return "amplitude must be finite and >= 0";
    return std::nullopt;
  };
  auto per = [](std::uint32_t p) -> std::optional<std::string> {
    if (p < 1) return "period must be a positive integer";
    return std::nullopt;
  };
  return std::visit(
      overloaded{
          [&](const Constant& s) { return amp(s.amplitude); },
          [&](const RectifiedSine& s) {
            auto e = amp(s.amplitude);
            return e ? e : per(s.period);
          },
          [&](const HalfWaveSine& s) {
            auto e = amp(s.amplitude);
            return e ? e : per(s.period);
          },
          [&](const SquareWave& s) -> std::optional<std::string> {
            if (auto e = amp(s.amplitude)) return e;
            if (auto e = per(s.period)) return e;
            if (!(s.duty > 0.0 && s.duty <= 1.0)) return "duty cycle must lie in (0, 1]";
            return std::nullopt;
          },
          [](const Vanishing& s) -> std::optional<std::string> {
            if (!(s.scale > 0.0) || !std::isfinite(s.scale)) return "scale must be finite and > 0";
            return std::nullopt;
          },
          [](const Table& s) -> std::optional<std::string> {
            if (s.values.empty()) return "table must not be empty";
            for (double v : s.values) {
              if (!(v >= 0.0) || !std::isfinite(v)) return "table values must be finite and >= 0";
            }
            return std::nullopt;
          },
      },
      spec);
}

double evaluate(const SignalSpec& spec, std::uint64_t t) {
  return std::visit(
      overloaded{
          [](const Constant& s) { return s.amplitude; },
          [t](const RectifiedSine& s) {
            const double phase = static_cast<double>(t % s.period) / s.period;
            return s.amplitude * std::abs(std::sin(std::numbers::pi * phase));
          },
          [t](const HalfWaveSine& s) {
            const double phase = static_cast<double>(t % s.period) / s.period;
            return s.amplitude * std::max(0.0, std::sin(2.0 * std::numbers::pi * phase));
          },
          [t](const SquareWave& s) {
            const double T = s.period;
            const double phase = static_cast<double>(t % s.period);
            return phase >= (1.0 - s.duty) * T - kDutySlack * T ? s.amplitude : 0.0;
          },
          [t](const Vanishing& s) { return s.scale / (1.0 + static_cast<double>(t)); },
          [t](const Table& s) {
            if (s.periodic) return s.values[t % s.values.size()];
            return t < s.values.size() ? s.values[t] : 0.0;
          },
      },
      spec);
}

std::optional<std::uint64_t> period(const SignalSpec& spec) {
  return std::visit(overloaded{
                        [](const Constant&) -> std::optional<std::uint64_t> { return 1; },
                        [](const RectifiedSine& s) -> std::optional<std::uint64_t> { return s.period; },
                        [](const HalfWaveSine& s) -> std::optional<std::uint64_t> { return s.period; },
                        [](const SquareWave& s) -> std::optional<std::uint64_t> { return s.period; },
                        [](const Vanishing&) -> std::optional<std::uint64_t> { return std::nullopt; },
                        [](const Table& s) -> std::optional<std::uint64_t> {
                          if (!s.periodic) return std::nullopt;
                          return s.values.size();
                        },
                    },
                    spec);
}

double limsup_value(const SignalSpec& spec) {
  if (auto p = period(spec)) return per_period_max(spec, *p);
  return 0.0;
}

double amplitude(const SignalSpec& spec) {
  return std::visit(overloaded{
                        [](const Constant& s) { return s.amplitude; },
                        [](const RectifiedSine& s) { return s.amplitude; },
                        [](const HalfWaveSine& s) { return s.amplitude; },
                        [](const SquareWave& s) { return s.amplitude; },
                        [](const Vanishing& s) { return s.scale; },
                        [](const Table& s) {
                          return s.values.empty() ? 0.0 : *std::max_element(s.values.begin(), s.values.end());
                        },
                    },
                    spec);
}

std::optional<ExcitationCertificate> uniform_excitation_certificate(std::span<const SignalSpec> specs) {
  if (specs.empty()) return std::nullopt;
  double h_lower = std::numeric_limits<double>::infinity();
  std::uint64_t longest = 0;
  for (const auto& spec : specs) {
    auto p = period(spec);
    if (!p) return std::nullopt;
    const double peak = per_period_max(spec, *p);
    if (!(peak > 0.0)) return std::nullopt;
    h_lower = std::min(h_lower, peak);
    longest = std::max(longest, *p);
  }
  return ExcitationCertificate{h_lower, longest + 1};
}

Eigen::MatrixXd sample_signals(std::span<const SignalSpec> specs, std::uint64_t t0, std::uint64_t t_end) {
  if (t_end < t0) throw std::invalid_argument("sample_signals requires t_end >= t0");
  const auto cols = static_cast<Eigen::Index>(t_end - t0 + 1);
  Eigen::MatrixXd h(static_cast<Eigen::Index>(specs.size()), cols);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      h(i, k) = evaluate(specs[static_cast<std::size_t>(i)], t0 + static_cast<std::uint64_t>(k));
    }
  }
  return h;
}

bool check_sufficient_excitation(const Eigen::MatrixXd& h_values, std::uint64_t /*t0*/,
                                 const ExcitationCertificate& cert, std::uint64_t m_max) {
  if (!(cert.h_lower > 0.0) || cert.delta_window < 1) {
    throw std::invalid_argument("certificate requires h_lower > 0 and delta_window >= 1");
  }
  const std::uint64_t needed = m_max * cert.delta_window + 1;
  if (static_cast<std::uint64_t>(h_values.cols()) < needed) {
    throw std::invalid_argument("excitation samples cover " + std::to_string(h_values.cols()) +
                                " steps, need " + std::to_string(needed));
  }
  const std::uint64_t D = cert.delta_window;
  for (std::uint64_t m = 1; m <= m_max; ++m) {
    const auto first = static_cast<Eigen::Index>(1 + (m - 1) * D);
    const auto width = static_cast<Eigen::Index>(D);
    for (Eigen::Index i = 0; i < h_values.rows(); ++i) {
      if (!(h_values.row(i).segment(first, width).maxCoeff() >= cert.h_lower)) return false;
    }
  }
  return true;
}

}  // namespace minshare
