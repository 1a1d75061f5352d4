#include "ringshape/util.hpp"

#include <fstream>

#include "ringshape/errors.hpp"

namespace ringshape {

std::uint64_t fnv64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    Fnv64 h;
    char buf[1 << 14];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h.add_bytes(buf, static_cast<std::size_t>(in.gcount()));
        if (!in) break;
    }
    return h.value();
}

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

} // namespace ringshape
