#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "invmeas/finfourier.hpp"

namespace invmeas {

// Registry of verification checks shared by the CLI `verify` command and the
// acceptance binary. Every row is a named claim with its tolerance pinned in
// the implementation; statistical rows draw three independent sub-seeds and
// pass when at least two agree, exact rows run once.
struct CheckContext {
  std::uint64_t seed = 11;
  std::size_t samples = 100000;
  double alpha = 0.01;
};

struct CheckResult {
  std::string id;
  std::string suite;
  std::string claim;
  double measured = 0.0;
  double reference = 0.0;
  bool pass = false;
  std::string error;    // nonempty when the check aborted with an exception
  double seconds = 0.0; // wall time; omitted from reports to keep them
                        // byte-reproducible
};

struct CheckSpec {
  std::string id;  // "suite/name"; reports sort rows by this key
  std::string suite;
  int criterion = 0;  // acceptance line this row belongs to (1-based)
  std::string claim;
  std::uint64_t stream_base = 0;  // fixed rng stream offset for determinism
  std::function<CheckResult(const CheckContext&, std::uint64_t)> run;
};

const std::vector<CheckSpec>& check_registry();

// Suites runnable from the CLI; excludes the pseudo-suite "all".
std::vector<std::string> suite_names();
bool is_suite(const std::string& name);

// Runs every row of `suite` ("all" for the union) in a worker pool capped by
// the INVMEAS_THREADS environment variable. Results come back sorted by id
// and do not depend on the thread schedule. Throws DomainError for an
// unknown suite.
std::vector<CheckResult> run_suite(const std::string& suite,
                                   const CheckContext& ctx);

// Rows backing one acceptance criterion, same execution rules.
std::vector<CheckResult> run_criterion(int criterion, const CheckContext& ctx);

// Character-table and Fourier-transform residual checks on a caller-supplied
// group (the CLI exposes this for group-spec JSON files).
std::vector<CheckResult> run_fourier_on_group(const FiniteGroup& g,
                                              const CheckContext& ctx);

// Deterministic JSON report ("schema": 1); excludes timing.
std::string report_to_json(const std::string& suite, const CheckContext& ctx,
                           const std::vector<CheckResult>& results);

}  // namespace invmeas
