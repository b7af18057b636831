#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace tcf {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

// Hash of a file's bytes; throws std::runtime_error when unreadable.
std::string file_fingerprint(const std::string& path);

}  // namespace tcf
