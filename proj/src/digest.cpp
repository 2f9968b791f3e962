#include "bulb/digest.hpp"

#include <openssl/evp.h>

#include "bulb/errors.hpp"

namespace bulb {

Sha1 sha1(std::string_view bytes) {
  Sha1 out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha1(), nullptr) != 1 || len != out.size()) {
    throw Error("sha1: digest failed");
  }
  return out;
}

std::string to_hex(const Sha1& d) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(40);
  for (std::uint8_t b : d) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

Sha1 sha1_from_hex(std::string_view hex) {
  if (hex.size() != 40) throw DomainError("sha1: expected 40 hex digits");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw DomainError("sha1: bad hex digit");
  };
  Sha1 d{};
  for (std::size_t i = 0; i < 20; ++i) d[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) * 16 + nibble(hex[2 * i + 1]));
  return d;
}

std::string git_blob_hash(std::string_view content) {
  std::string framed = "blob " + std::to_string(content.size());
  framed.push_back('\0');
  framed.append(content);
  return to_hex(sha1(framed));
}

}  // namespace bulb
