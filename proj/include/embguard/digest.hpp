#pragma once

#include <string>
#include <string_view>

namespace embguard {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_hex_file(const std::string& path);  // io_error on failure

// First 8 hex characters of the file digest; used as the key fingerprint in
// verification reports.
std::string short_fingerprint(const std::string& path);

}  // namespace embguard
