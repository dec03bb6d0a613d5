#pragma once

#include <cstdint>
#include <initializer_list>

namespace qwb {

/// splitmix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for a labelled path below `master`; distinct paths give
/// unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t label : path) h = mix64(h ^ mix64(label + 0x632be59bd9b4e019ULL));
  return h;
}

/// Counter-based uniform draw in [0, 1) for (key, node, round). The value
/// depends only on its arguments, never on the order draws are made in.
constexpr double counter_uniform(std::uint64_t key, std::uint64_t node, std::uint64_t round) {
  const std::uint64_t bits = derive_seed(key, {node, round});
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace qwb
