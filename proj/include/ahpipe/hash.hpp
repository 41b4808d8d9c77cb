#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace ahpipe {

// 64-bit FNV-1a. Used for input digests in run manifests and stage cache keys.
class Fnv1a {
public:
    void update(const void* data, size_t n);
    void update(std::string_view s) { update(s.data(), s.size()); }
    uint64_t value() const noexcept { return state_; }
    std::string hex() const;

private:
    uint64_t state_ = 14695981039346656037ull;
};

uint64_t fnv1a(std::string_view s);

// Digest of a file's contents; throws a data error if the file cannot be read.
std::string file_digest_hex(const std::string& path);

}  // namespace ahpipe
