#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

enum class ErrCode {
  index_out_of_range,
  invalid_argument,
  not_unit,
  degenerate_spectrum,
  orthogonal_reference,
  antipodal_singularity,
  point_on_boundary,
  solve_failed,
  under_sampled,
  unsupported_domain,
  inactive_node,
  wrong_regime,
  singular_b0,
  not_conformal,
  bad_fit,
  io_failure,
};

/// Library-wide exception. Carries a machine-checkable code next to the
/// human-readable message so callers (CLI, tests) can map failures to
/// exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrCode code() const noexcept { return code_; }

 private:
  ErrCode code_;
};

[[noreturn]] inline void fail(ErrCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace nlc
