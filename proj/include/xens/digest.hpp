#ifndef XENS_DIGEST_HPP
#define XENS_DIGEST_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace xens {

// SHA-256 of a byte buffer, lowercase hex.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& bytes);
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);

// SHA-256 of file contents. Throws Error if the file cannot be read.
std::string sha256_file_hex(const std::string& path);

// Raw 32-byte digest, for binary containers.
std::vector<std::uint8_t> sha256_raw(const void* data, std::size_t len);

// Incremental hasher for streamed container writing/verification.
class Sha256Stream {
 public:
  Sha256Stream();
  ~Sha256Stream();
  Sha256Stream(const Sha256Stream&) = delete;
  Sha256Stream& operator=(const Sha256Stream&) = delete;
  void update(const void* data, std::size_t len);
  std::vector<std::uint8_t> finish();

 private:
  void* ctx_;
};

std::string read_file_bytes(const std::string& path);

}  // namespace xens

#endif
