#include "embguard/digest.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "embguard/error.hpp"

namespace embguard {

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(errc::internal, "sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string sha256_hex_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open for digest: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(errc::io_error, "read failed: " + path);
  return sha256_hex(ss.str());
}

std::string short_fingerprint(const std::string& path) {
  return sha256_hex_file(path).substr(0, 8);
}

}  // namespace embguard
