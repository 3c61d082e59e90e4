#include "lrdstable/seeding.hpp"

#include <bit>

namespace lrdstable {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t state = mix64(master);
    for (const auto tag : tags) {
        state = mix64(state ^ mix64(tag + 0x632be59bd9b4e019ULL));
    }
    return state;
}

std::uint64_t tag_of(double value) { return std::bit_cast<std::uint64_t>(value); }

}  // namespace lrdstable
