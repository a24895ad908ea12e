#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace coherency {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Key form used by the answer index and by banning: lowercase + trim.
std::string normalize_entity(std::string_view s);

// Trims and drops a single trailing period, so "Valletta." compares as "Valletta".
std::string clean_prediction(std::string_view s);

// Case-insensitive mutual containment of the trimmed strings. Empty never matches.
bool partial_match(std::string_view a, std::string_view b);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t fingerprint);

// Portable uniform draw in [0, n): rejection sampling on the raw engine output,
// so sequences do not depend on the standard library's distributions.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

// Portable uniform double in [0, 1).
double uniform_unit(std::mt19937_64& rng);

}  // namespace coherency
