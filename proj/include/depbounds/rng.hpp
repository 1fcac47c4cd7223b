#pragma once

#include <cstdint>
#include <limits>

namespace depbounds {

// Role of a random stream inside one replication.
enum class StreamRole : std::uint64_t { path = 1, ghost = 2, signs = 3, auxiliary = 4 };

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based generator: output k of stream `key` is a hash of (key, k).
// Streams are derived from (experiment seed, replication, role), so every
// replication owns independent streams without shared state.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) noexcept : key_(splitmix64(key)) {}

    static CounterRng stream(std::uint64_t seed, std::uint64_t replication, StreamRole role) noexcept {
        std::uint64_t k = splitmix64(seed);
        k = splitmix64(k ^ (replication * 0xd1342543de82ef95ULL));
        k = splitmix64(k ^ (static_cast<std::uint64_t>(role) * 0xa0761d6478bd642fULL));
        return CounterRng(k);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        return splitmix64(key_ ^ splitmix64(counter_++));
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace depbounds
