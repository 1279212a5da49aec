#pragma once

#include "ballgap/kernels.hpp"

namespace ballgap::kernels {

// Defined in the per-ISA translation units; return nullptr when the variant
// was not compiled for this target or the CPU lacks the feature.
const Ops* avx2_ops_detail();
const Ops* neon_ops_detail();

}  // namespace ballgap::kernels
