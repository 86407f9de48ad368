#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bcsmile {

using Rng = std::mt19937_64;

// Named sub-seed of a root seed, so one component's stream can be reproduced
// without replaying the others ("corpus", "split", "init", "shuffle", ...).
std::uint64_t derive_seed(std::uint64_t root, std::string_view name);

inline Rng make_rng(std::uint64_t root, std::string_view name) { return Rng(derive_seed(root, name)); }

}  // namespace bcsmile
