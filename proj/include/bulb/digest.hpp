#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace bulb {

using Sha1 = std::array<std::uint8_t, 20>;

Sha1 sha1(std::string_view bytes);
std::string to_hex(const Sha1& d);
/// Throws DomainError unless `hex` is 40 hexadecimal digits.
Sha1 sha1_from_hex(std::string_view hex);

/// Content hash in the style of a git blob id: sha1("blob <size>\0" + content).
std::string git_blob_hash(std::string_view content);

}  // namespace bulb
