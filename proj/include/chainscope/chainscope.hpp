#pragma once

#include "chainscope/approximation.hpp"
#include "chainscope/chain_graph.hpp"
#include "chainscope/error.hpp"
#include "chainscope/fixtures.hpp"
#include "chainscope/harness.hpp"
#include "chainscope/metric_space.hpp"
#include "chainscope/moduli.hpp"
#include "chainscope/sequences.hpp"
#include "chainscope/sparse_vector.hpp"

namespace chainscope {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chainscope
