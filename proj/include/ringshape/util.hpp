#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>

namespace ringshape {

// FNV-1a content hashing, used to key covariance caches and to fingerprint
// configs and code files in result sidecars.
class Fnv64 {
public:
    Fnv64& add_bytes(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001B3ull;
        }
        return *this;
    }

    template <typename T>
    Fnv64& add(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        return add_bytes(&v, sizeof(T));
    }

    Fnv64& add(const std::string& s) { return add_bytes(s.data(), s.size()); }

    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xCBF29CE484222325ull;
};

std::uint64_t fnv64_file(const std::string& path); // throws IoError if unreadable
std::string to_hex(std::uint64_t v);

} // namespace ringshape
