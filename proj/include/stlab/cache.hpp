#ifndef STLAB_CACHE_HPP
#define STLAB_CACHE_HPP

// On-disk a_p tables. Layout, all little-endian:
//   "STAP" | u8 version = 1 | u64 p | p*p x i32 a_p, row-major by a then b,
// with INT32_MIN marking bad reduction.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curves.hpp"

namespace stlab {

class CacheError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::array<char, 4> kCacheMagic{'S', 'T', 'A', 'P'};
inline constexpr std::uint8_t kCacheVersion = 1;
inline constexpr std::int32_t kBadSentinel = std::numeric_limits<std::int32_t>::min();

namespace detail {

    template <class U>
    void put_le(std::ostream& os, U v)
    {
        for (std::size_t i = 0; i < sizeof(U); ++i)
            os.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
    }

    template <class U>
    U get_le(std::istream& is)
    {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            const int c = is.get();
            if (c == std::char_traits<char>::eof())
                throw CacheError("cache: truncated file");
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
        }
        return static_cast<U>(v);
    }

} // namespace detail

inline void cache_write(std::ostream& os, const ApTable& table)
{
    os.write(kCacheMagic.data(), kCacheMagic.size());
    detail::put_le<std::uint8_t>(os, kCacheVersion);
    detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(table.p()));
    for (const auto& e : table.entries())
        detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(e.good() ? e.ap : kBadSentinel));
    if (!os)
        throw CacheError("cache: write failed");
}

/// Reads and validates a table; bad entries are reclassified (node or cusp) from (a, b).
/// expected_p = 0 accepts any prime.
inline ApTable cache_read(std::istream& is, std::int64_t expected_p = 0)
{
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kCacheMagic)
        throw CacheError("cache: bad magic");
    const auto version = detail::get_le<std::uint8_t>(is);
    if (version != kCacheVersion)
        throw CacheError("cache: unsupported version " + std::to_string(version));
    const auto p = static_cast<std::int64_t>(detail::get_le<std::uint64_t>(is));
    if (p < 5 || p > (1 << 20) || !is_prime(p))
        throw CacheError("cache: invalid prime in header");
    if (expected_p != 0 && p != expected_p)
        throw CacheError("cache: file holds p = " + std::to_string(p) + ", expected " + std::to_string(expected_p));

    std::vector<TraceValue> entries(static_cast<std::size_t>(p * p));
    std::int64_t bad = 0;
    const std::int64_t hasse = 4 * p;
    for (std::int64_t a = 0; a < p; ++a) {
        for (std::int64_t b = 0; b < p; ++b) {
            const auto v = static_cast<std::int32_t>(detail::get_le<std::uint32_t>(is));
            auto& e = entries[static_cast<std::size_t>(a * p + b)];
            if (v == kBadSentinel) {
                ++bad;
                e = detail::singular_trace(a, b, p);
            } else {
                if (static_cast<std::int64_t>(v) * v > hasse)
                    throw CacheError("cache: value violates the Hasse bound");
                e = {Reduction::Good, v};
            }
        }
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw CacheError("cache: trailing bytes");
    if (bad != p)
        throw CacheError("cache: expected " + std::to_string(p) + " bad entries, found " + std::to_string(bad));
    return ApTable(p, std::move(entries));
}

/// Directory from $STLAB_CACHE_DIR, else ".stlab-cache".
inline std::filesystem::path default_cache_dir()
{
    if (const char* env = std::getenv("STLAB_CACHE_DIR"); env && *env)
        return env;
    return ".stlab-cache";
}

inline std::filesystem::path cache_path(const std::filesystem::path& dir, std::int64_t p)
{
    return dir / ("ap_" + std::to_string(p) + ".bin");
}

inline void cache_store(const std::filesystem::path& dir, const ApTable& table)
{
    std::filesystem::create_directories(dir);
    const auto path = cache_path(dir, table.p());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw CacheError("cache: cannot open " + tmp);
        cache_write(os, table);
    }
    std::filesystem::rename(tmp, path);
}

inline std::optional<ApTable> cache_load(const std::filesystem::path& dir, std::int64_t p)
{
    const auto path = cache_path(dir, p);
    std::ifstream is(path, std::ios::binary);
    if (!is)
        return std::nullopt;
    return cache_read(is, p);
}

/// Loads the table for p from dir, building and storing it on a miss.
inline ApTable cached_table(const std::filesystem::path& dir, std::int64_t p, std::int64_t cap = kDefaultApTableCap)
{
    if (auto t = cache_load(dir, p))
        return *t;
    ApTable t(p, cap);
    cache_store(dir, t);
    return t;
}

} // namespace stlab

#endif
