#pragma once

#include <stdexcept>
#include <string>

namespace pgn {

enum class ErrorCode {
  invalid_param,
  table_miss,
  window_too_small,
  budget_exceeded,
  precision_loss,
  zero_first_block,
  non_negative_minimum,
  overlapping_excursions,
  cap_exceeded,
  not_decreasing,
  case_undecidable,
  tau_unknown,
  out_of_range,
  grid_mismatch,
  hint_infeasible,
  config_invalid,
  io_error,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_param: return "InvalidParam";
    case ErrorCode::table_miss: return "TableMiss";
    case ErrorCode::window_too_small: return "WindowTooSmall";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::precision_loss: return "PrecisionLoss";
    case ErrorCode::zero_first_block: return "ZeroFirstBlock";
    case ErrorCode::non_negative_minimum: return "NonNegativeMinimum";
    case ErrorCode::overlapping_excursions: return "OverlappingExcursions";
    case ErrorCode::cap_exceeded: return "CapExceeded";
    case ErrorCode::not_decreasing: return "NotDecreasing";
    case ErrorCode::case_undecidable: return "CaseUndecidable";
    case ErrorCode::tau_unknown: return "TauUnknown";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::grid_mismatch: return "GridMismatch";
    case ErrorCode::hint_infeasible: return "HintInfeasible";
    case ErrorCode::config_invalid: return "ConfigInvalid";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

// Library-wide error type. `index` carries the offending k / t / radius when
// the failure is tied to one element of a sequence.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, long long index = -1)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code),
        index_(index) {}

  ErrorCode code() const { return code_; }
  long long index() const { return index_; }

 private:
  ErrorCode code_;
  long long index_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what, long long index = -1) {
  throw Error(code, what, index);
}

}  // namespace pgn
