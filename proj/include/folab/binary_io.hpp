#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace folab::binary {

inline void put_u64(std::ostream& os, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(buf, 8);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("truncated binary record");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace folab::binary
