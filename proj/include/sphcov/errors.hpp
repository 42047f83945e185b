#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sphcov {

/// Failure categories raised by the numerical layer. The CLI maps all of
/// them to exit code 1; argument errors in the CLI itself exit with 2.
enum class Errc {
  InvalidArgument,
  NonConvergent,
  NegativeDensity,
  OutOfRange,
  TargetExhausted,
  NotDecreasing,
  NotAdmissible,
  MassTooLarge,
  BoundaryMismatch,
  MassMismatch,
  GeneratorFailed,
  AtPole,
  OrderOutOfRange,
  NoConvergence,
  RhoOutOfRange,
  SubharmonicRegime,
  Io,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::NegativeDensity: return "NegativeDensity";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::TargetExhausted: return "TargetExhausted";
    case Errc::NotDecreasing: return "NotDecreasing";
    case Errc::NotAdmissible: return "NotAdmissible";
    case Errc::MassTooLarge: return "MassTooLarge";
    case Errc::BoundaryMismatch: return "BoundaryMismatch";
    case Errc::MassMismatch: return "MassMismatch";
    case Errc::GeneratorFailed: return "GeneratorFailed";
    case Errc::AtPole: return "AtPole";
    case Errc::OrderOutOfRange: return "OrderOutOfRange";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::RhoOutOfRange: return "RhoOutOfRange";
    case Errc::SubharmonicRegime: return "SubharmonicRegime";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace sphcov
