#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace facloc {

/// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
public:
    Sha256();

    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    /// Finish and return the 32-byte digest; the object must not be reused.
    std::array<std::uint8_t, 32> digest();

    /// Lowercase hex digest of a full buffer.
    static std::string hex(std::string_view data);

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::uint64_t total_len_ = 0;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffer_len_ = 0;
};

/// Hex SHA-256 of a file's bytes; throws ParseError when unreadable.
std::string sha256_file(const std::string& path);

}  // namespace facloc
