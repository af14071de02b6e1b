#pragma once

#include "lops/char_analysis.hpp"
#include "lops/leray_system.hpp"
#include "lops/report.hpp"

#include <cstdint>

namespace lops {

struct AnalyzeOptions {
  Covector tau = time_covector();
  std::size_t samples = 1000;  // directions for the sampled root test
  double tol = 1e-9;
  std::uint64_t seed = 7;
};

/// Structure → symbol matrix → determinant → factorization (when the spec
/// has a factors block) → hyperbolicity of every factor at the spec's point →
/// Gevrey exponent → Leray condition.
///
/// Summary keys: "degree", "total order", "factor count", "sigma0" ("p/q" or
/// "sobolev"), "leray condition".
Report analyze_system(const LeraySystem& s, const AnalyzeOptions& opt = {});

/// Verdict for one factor, already evaluated at the parameter point. Linear and
/// quadratic factors use the closed forms, everything else the sampled method.
HyperbolicityVerdict factor_verdict(const Poly& factor, const Covector& tau, const AnalyzeOptions& opt);

}  // namespace lops
