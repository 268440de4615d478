#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdfilter/quadrature.hpp"
#include "sdfilter/tweedie.hpp"

namespace sdfilter {

enum class VerifySuite { Lemma1, Lemma2, Lemma3, Prop2, All };

VerifySuite verify_suite_from_name(const std::string& name);

/// Runs the identity battery. Each scenario sweeps a grid and reports the
/// worst point: lhs the identity value, rhs the quadrature oracle. When cfg
/// is absent every scenario uses the design defaults for its prior.
std::vector<IdentityReport> run_identity_suite(VerifySuite suite,
                                               const std::optional<QuadratureConfig>& cfg = {});

}  // namespace sdfilter
