#pragma once

#include <string>
#include <vector>

#include "kiwi/numerics/tensor.hpp"

namespace kiwi::numerics {

// Parameter file layout (stable across releases; bump kParamFileVersion on
// any change). All integers and floats are little-endian:
//
//   bytes 0..7   magic "KIWIPRM\0"
//   u32          version (currently 1)
//   u32          parameter count P
//   P records:
//     u32        name length L
//     L bytes    parameter name (UTF-8)
//     u32        rank R
//     R x u64    dimensions
//     N x f64    values, row-major, N = product of dimensions
constexpr uint32_t kParamFileVersion = 1;

void save_parameters(const std::string& path,
                     const std::vector<TensorPtr>& params);

// Loads all parameters as named tensors (requires_grad = false).
std::vector<TensorPtr> load_parameters(const std::string& path);

// Loads into existing tensors, matched by name. Every stored parameter
// must match a tensor and vice versa; shapes must agree.
void load_parameters_into(const std::string& path,
                          const std::vector<TensorPtr>& params);

}  // namespace kiwi::numerics
