// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qsl {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Desk-scale resource caps. Statevectors above kMaxQubits, dense matrices
// above kDenseCap and Clifford sampling above kCliffordCap are refused.
inline constexpr int kMaxQubits = 14;
inline constexpr int kDenseCap = 10;
inline constexpr int kCliffordCap = 8;
inline constexpr int kSupportCap = 12;

inline constexpr double kNormTol = 1e-10;

/// Bad arguments or malformed inputs. CLI exit code 1.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Corrupt or inconsistent persisted data. CLI exit code 3.
struct IntegrityError : std::runtime_error {
  explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Request exceeds a configured size cap. CLI exit code 4.
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values or broken numerical invariants.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Splittable counter scheme: the stream for item `index` depends only on
// (master, index), never on how many items were drawn before it. This is
// what keeps parallel sampling identical to sequential sampling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x51ed270b8a2f4c11ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index = 0) {
  return Rng(derive_seed(master, index));
}

namespace detail {
inline std::atomic<int>& thread_count_slot() {
  static std::atomic<int> count{0};  // 0 = auto
  return count;
}
}  // namespace detail

/// 0 means auto (hardware concurrency). Thread count never changes results;
/// it only changes how index ranges are partitioned.
inline void set_thread_count(int count) { detail::thread_count_slot() = count; }

inline int effective_thread_count() {
  int c = detail::thread_count_slot().load();
  if (c > 0) return c;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count). Each index must write only to its own
/// slot of any shared output; chunking is static so partitioning is
/// deterministic (though irrelevant to results by the slot discipline).
template <class F>
void parallel_for(std::size_t count, F&& fn) {
  const int threads = effective_thread_count();
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

/// FNV-1a, used for stable content digests in records and manifests.
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                           std::uint64_t seed = 1469598103934665603ULL) {
  std::uint64_t h = seed;
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s,
                           std::uint64_t seed = 1469598103934665603ULL) {
  return fnv1a(s.data(), s.size(), seed);
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace qsl
