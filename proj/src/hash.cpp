#include "ahpipe/hash.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "ahpipe/error.hpp"

namespace ahpipe {

void Fnv1a::update(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = state_;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    state_ = h;
}

std::string Fnv1a::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
    return buf;
}

uint64_t fnv1a(std::string_view s) {
    Fnv1a h;
    h.update(s);
    return h.value();
}

std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot read file: " + path);
    Fnv1a h;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update(buf.data(), static_cast<size_t>(in.gcount()));
    }
    return h.hex();
}

}  // namespace ahpipe
