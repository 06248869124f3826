#pragma once

#include <iosfwd>

namespace csma {

// Deterministic self-check grid: prints one line per check plus a summary
// and returns true when every check passes. Runs with fixed seeds and fixed
// formatting, so the output is byte-identical across runs of a binary.
[[nodiscard]] bool run_validation_suite(std::ostream& os);

}  // namespace csma
