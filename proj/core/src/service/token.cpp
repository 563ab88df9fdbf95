#include "corae/service/token.hpp"

#include <random>
#include <vector>

namespace corae::service {

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
}

std::string generate_token(std::size_t bytes) {
  thread_local std::random_device entropy;
  std::vector<unsigned char> raw(bytes);
  for (std::size_t i = 0; i < bytes; i += 4) {
    const auto word = entropy();
    for (std::size_t j = 0; j < 4 && i + j < bytes; ++j) raw[i + j] = static_cast<unsigned char>(word >> (8 * j));
  }

  std::string out;
  out.reserve((bytes * 4 + 2) / 3);
  unsigned int buffer = 0;
  int bits = 0;
  for (unsigned char c : raw) {
    buffer = (buffer << 8) | c;
    bits += 8;
    while (bits >= 6) {
      bits -= 6;
      out += kAlphabet[(buffer >> bits) & 0x3f];
    }
  }
  if (bits > 0) out += kAlphabet[(buffer << (6 - bits)) & 0x3f];
  return out;
}

bool is_token_shaped(std::string_view text) noexcept {
  if (text.size() < 16 || text.size() > 128) return false;
  for (char c : text) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace corae::service
