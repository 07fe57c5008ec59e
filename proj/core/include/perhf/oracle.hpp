#pragma once

#include "perhf/scf.hpp"

namespace perhf {

struct OracleResult {
  double projector_min = 0.0; // over rank-one projectors |v><v|
  double relaxed_min = 0.0;   // over 0 <= gamma <= 1, tr gamma = 1
  CVector best_vector;
  int samples = 0;
};

/// Independent minimization of the discrete energy for a single k-point,
/// at most 7 plane waves and Z = 1. The rank-one search samples the complex
/// unit sphere and polishes the best samples by Riemannian gradient descent;
/// the relaxed search runs projected gradient descent from several starts.
/// Throws invalid-parameter outside that size.
OracleResult brute_force_oracle(const ScfConfig &config, const Model &model,
                                int samples = 4000, int starts = 6);

} // namespace perhf
