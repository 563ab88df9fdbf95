#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace corae::service {

// URL-safe base64 (no padding) of `bytes` random bytes from the OS entropy
// source. The default 16 bytes gives 128 bits.
std::string generate_token(std::size_t bytes = 16);

// True for strings of 16 or more characters from the token alphabet, so path segments can be
// rejected before any lookup or filesystem use.
bool is_token_shaped(std::string_view text) noexcept;

}  // namespace corae::service
