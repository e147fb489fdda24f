// Finite words, occurrence counting, factor sets, periods and window scans.
//
// A Word stores alphabet indices (not labels) in a std::string so that
// hashing, comparison and slicing stay cheap. Alphabet converts to and from
// the printable form.
#pragma once

#include "wordlab/numeric.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wordlab {

using Word = std::string;

class Alphabet {
 public:
  explicit Alphabet(std::string labels) : labels_(std::move(labels)) {
    if (labels_.empty() || labels_.size() > 255) throw std::invalid_argument("alphabet size must be in [1,255]");
    index_.fill(-1);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      auto c = static_cast<unsigned char>(labels_[i]);
      if (index_[c] != -1) throw std::invalid_argument("duplicate alphabet label");
      index_[c] = static_cast<int>(i);
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& labels() const { return labels_; }
  char label(std::size_t i) const { return labels_.at(i); }

  Word parse(std::string_view text) const {
    Word w(text.size(), '\0');
    for (std::size_t i = 0; i < text.size(); ++i) {
      int v = index_[static_cast<unsigned char>(text[i])];
      if (v < 0) throw std::invalid_argument(std::string("symbol not in alphabet: ") + text[i]);
      w[i] = static_cast<char>(v);
    }
    return w;
  }

  std::string render(std::string_view w) const {
    std::string out(w.size(), '?');
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = labels_.at(static_cast<unsigned char>(w[i]));
    return out;
  }

  bool valid(std::string_view w) const {
    return std::all_of(w.begin(), w.end(), [&](char c) { return static_cast<unsigned char>(c) < labels_.size(); });
  }

 private:
  std::string labels_;
  std::array<int, 256> index_{};
};

// ---------------------------------------------------------------------------
// Prefix function and occurrence counting

inline std::vector<std::size_t> prefix_function(std::string_view s) {
  std::vector<std::size_t> pi(s.size(), 0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && s[i] != s[k]) k = pi[k - 1];
    if (s[i] == s[k]) ++k;
    pi[i] = k;
  }
  return pi;
}

// Overlapping occurrences of u in w.
inline std::uint64_t count_occurrences(std::string_view u, std::string_view w) {
  if (u.empty()) throw std::invalid_argument("empty pattern");
  if (u.size() > w.size()) return 0;
  auto pi = prefix_function(u);
  std::uint64_t count = 0;
  std::size_t k = 0;
  for (char c : w) {
    while (k > 0 && (k == u.size() || c != u[k])) k = pi[k - 1];
    if (c == u[k]) ++k;
    if (k == u.size()) ++count;
  }
  return count;
}

inline Rational frequency(std::string_view u, std::string_view w) {
  if (w.empty()) throw std::invalid_argument("empty host");
  return Rational(count_occurrences(u, w), w.size());
}

// Smallest d in [1, d_max] that is a period of w, if any.
inline std::optional<std::size_t> min_period(std::string_view w, std::size_t d_max) {
  if (w.empty()) return std::nullopt;
  if (d_max > w.size() - 1) throw std::invalid_argument("d_max exceeds |w|-1");
  auto pi = prefix_function(w);
  std::size_t p = w.size() - pi.back();
  if (p >= 1 && p <= d_max) return p;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// 128-bit polynomial fingerprints: two independent lanes modulo 2^61-1.

struct Fp128 {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  friend bool operator==(const Fp128&, const Fp128&) = default;
  friend auto operator<=>(const Fp128&, const Fp128&) = default;
};

struct Fp128Hash {
  std::size_t operator()(const Fp128& f) const noexcept { return static_cast<std::size_t>(f.a ^ (f.b * 0x9E3779B97F4A7C15ULL)); }
};

namespace fp {

inline constexpr std::uint64_t kMod = (1ULL << 61) - 1;
inline constexpr std::uint64_t kBaseA = 1000003ULL * 7919ULL + 12345ULL;
inline constexpr std::uint64_t kBaseB = 2305843009213693921ULL % kMod;

inline std::uint64_t mulmod(std::uint64_t x, std::uint64_t y) {
  unsigned __int128 p = static_cast<unsigned __int128>(x) * y;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kMod);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t r = lo + hi;
  if (r >= kMod) r -= kMod;
  return r;
}

inline std::uint64_t addmod(std::uint64_t x, std::uint64_t y) {
  std::uint64_t r = x + y;
  if (r >= kMod) r -= kMod;
  return r;
}

inline std::uint64_t submod(std::uint64_t x, std::uint64_t y) { return x >= y ? x - y : x + kMod - y; }

inline std::uint64_t symbol_value(char c) { return static_cast<unsigned char>(c) + 1ULL; }

// Shared table of base powers, grown on demand. Not thread-safe to grow;
// callers reserve up front before sharding.
struct PowerTable {
  std::vector<std::uint64_t> pa{1};
  std::vector<std::uint64_t> pb{1};
  void reserve(std::size_t n) {
    while (pa.size() <= n) {
      pa.push_back(mulmod(pa.back(), kBaseA));
      pb.push_back(mulmod(pb.back(), kBaseB));
    }
  }
};

inline PowerTable& powers() {
  static PowerTable table;
  return table;
}

}  // namespace fp

inline Fp128 fingerprint(std::string_view s) {
  Fp128 h;
  for (char c : s) {
    h.a = fp::addmod(fp::mulmod(h.a, fp::kBaseA), fp::symbol_value(c));
    h.b = fp::addmod(fp::mulmod(h.b, fp::kBaseB), fp::symbol_value(c));
  }
  return h;
}

// Prefix hashes of one host; window(i, n) is O(1).
class PrefixHash {
 public:
  PrefixHash() = default;
  explicit PrefixHash(std::string_view s) { assign(s); }

  void assign(std::string_view s) {
    fp::powers().reserve(s.size());
    ha_.assign(s.size() + 1, 0);
    hb_.assign(s.size() + 1, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ha_[i + 1] = fp::addmod(fp::mulmod(ha_[i], fp::kBaseA), fp::symbol_value(s[i]));
      hb_[i + 1] = fp::addmod(fp::mulmod(hb_[i], fp::kBaseB), fp::symbol_value(s[i]));
    }
  }

  Fp128 window(std::size_t i, std::size_t n) const {
    const auto& pw = fp::powers();
    return {fp::submod(ha_[i + n], fp::mulmod(ha_[i], pw.pa[n])), fp::submod(hb_[i + n], fp::mulmod(hb_[i], pw.pb[n]))};
  }

 private:
  std::vector<std::uint64_t> ha_;
  std::vector<std::uint64_t> hb_;
};

// ---------------------------------------------------------------------------
// Factor sets

enum class FactorMode { exact, fingerprint };

inline const char* mode_name(FactorMode m) { return m == FactorMode::exact ? "exact" : "fingerprint"; }

struct FactorOptions {
  std::uint64_t max_bytes = 2ULL << 30;
  // Above this many windows the count switches to audited fingerprints.
  std::uint64_t exact_window_limit = 4'000'000;
  std::optional<FactorMode> force_mode;
  std::uint64_t audit_seed = 0x5EED;
};

struct FactorSet {
  std::size_t n = 0;
  FactorMode mode = FactorMode::exact;
  std::uint64_t count = 0;
  std::vector<Word> members;  // sorted; exact mode only
  std::uint64_t audit_sampled = 0;
  std::uint64_t audit_mismatches = 0;

  bool contains(std::string_view u) const { return std::binary_search(members.begin(), members.end(), u); }
};

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::uint64_t window_count(std::span<const Word> hosts, std::size_t n) {
  std::uint64_t total = 0;
  for (const auto& h : hosts)
    if (h.size() >= n) total += h.size() - n + 1;
  return total;
}

struct LocatedFp {
  Fp128 fp;
  std::uint32_t host;
  std::uint32_t offset;
  friend bool operator<(const LocatedFp& x, const LocatedFp& y) { return x.fp < y.fp; }
};

inline std::string_view located_view(std::span<const Word> hosts, const LocatedFp& l, std::size_t n) {
  return std::string_view(hosts[l.host]).substr(l.offset, n);
}

// The audit sample is decided from the fingerprint itself so the same
// 1% of classes is checked regardless of enumeration order.
inline bool audit_selected(const Fp128& f, std::uint64_t seed) {
  std::uint64_t x = f.a ^ (f.b >> 7) ^ seed;
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return x % 100 == 0;
}

}  // namespace detail

// Counts distinct length-n windows. Exact mode keeps every window's location
// and compares contents inside equal-fingerprint groups. Fingerprint mode
// keeps only fingerprints plus locations for an audited 1% sample.
inline FactorSet count_factors(std::span<const Word> hosts, std::size_t n, const FactorOptions& opt = {}) {
  FactorSet fs;
  fs.n = n;
  if (n == 0) {
    fs.count = 1;
    fs.members = {Word()};
    return fs;
  }
  std::uint64_t windows = detail::window_count(hosts, n);
  FactorMode mode = opt.force_mode.value_or(windows <= opt.exact_window_limit ? FactorMode::exact : FactorMode::fingerprint);
  std::uint64_t need = mode == FactorMode::exact ? windows * sizeof(detail::LocatedFp) : windows * sizeof(Fp128);
  if (need > opt.max_bytes && mode == FactorMode::exact && !opt.force_mode) {
    mode = FactorMode::fingerprint;
    need = windows * sizeof(Fp128);
  }
  if (need > opt.max_bytes) throw BudgetError("budget");
  if (hosts.size() > std::numeric_limits<std::uint32_t>::max()) throw BudgetError("budget");
  fs.mode = mode;

  PrefixHash ph;
  if (mode == FactorMode::exact) {
    std::vector<detail::LocatedFp> all;
    all.reserve(windows);
    for (std::size_t h = 0; h < hosts.size(); ++h) {
      if (hosts[h].size() < n) continue;
      ph.assign(hosts[h]);
      for (std::size_t i = 0; i + n <= hosts[h].size(); ++i)
        all.push_back({ph.window(i, n), static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(i)});
    }
    std::sort(all.begin(), all.end());
    std::vector<std::string_view> distinct;
    for (std::size_t i = 0; i < all.size();) {
      std::size_t j = i;
      while (j < all.size() && all[j].fp == all[i].fp) ++j;
      // Exact dedup inside the group; a fingerprint collision yields several.
      std::vector<std::string_view> group;
      for (std::size_t k = i; k < j; ++k) {
        auto v = detail::located_view(hosts, all[k], n);
        if (std::find(group.begin(), group.end(), v) == group.end()) group.push_back(v);
      }
      distinct.insert(distinct.end(), group.begin(), group.end());
      i = j;
    }
    std::sort(distinct.begin(), distinct.end());
    fs.count = distinct.size();
    fs.members.reserve(distinct.size());
    for (auto v : distinct) fs.members.emplace_back(v);
    return fs;
  }

  std::vector<Fp128> fps;
  std::vector<detail::LocatedFp> sample;
  fps.reserve(windows);
  for (std::size_t h = 0; h < hosts.size(); ++h) {
    if (hosts[h].size() < n) continue;
    ph.assign(hosts[h]);
    for (std::size_t i = 0; i + n <= hosts[h].size(); ++i) {
      Fp128 f = ph.window(i, n);
      fps.push_back(f);
      if (detail::audit_selected(f, opt.audit_seed))
        sample.push_back({f, static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(i)});
    }
  }
  std::sort(fps.begin(), fps.end());
  fs.count = static_cast<std::uint64_t>(std::unique(fps.begin(), fps.end()) - fps.begin());
  std::sort(sample.begin(), sample.end());
  for (std::size_t i = 0; i < sample.size();) {
    std::size_t j = i;
    auto rep = detail::located_view(hosts, sample[i], n);
    while (j < sample.size() && sample[j].fp == sample[i].fp) {
      if (detail::located_view(hosts, sample[j], n) != rep) ++fs.audit_mismatches;
      ++j;
    }
    ++fs.audit_sampled;
    i = j;
  }
  return fs;
}

// All distinct length-n windows of the hosts, as words. n = 0 gives {""}.
inline FactorSet factor_set(std::span<const Word> hosts, std::size_t n, FactorOptions opt = {}) {
  opt.force_mode = FactorMode::exact;
  return count_factors(hosts, n, opt);
}

inline std::uint64_t distinct_factor_count(std::span<const Word> hosts, std::size_t n, const FactorOptions& opt = {}) {
  return count_factors(hosts, n, opt).count;
}

// ---------------------------------------------------------------------------
// Sliding containment scan

struct ScanResult {
  bool all_contained = true;
  std::optional<std::size_t> failing_window;   // 0-based start of first bad window
  std::optional<std::size_t> missing_pattern;  // index into the scanner's pattern list
};

// Precomputes, for every host position, which pattern (if any) starts there,
// so that repeated scans with different K are a single pass each.
class ContainmentScanner {
 public:
  ContainmentScanner(const Word& host, std::vector<Word> patterns) : host_(host), patterns_(std::move(patterns)) {
    for (const auto& p : patterns_)
      if (p.empty()) throw std::invalid_argument("empty pattern");
    std::sort(patterns_.begin(), patterns_.end());
    patterns_.erase(std::unique(patterns_.begin(), patterns_.end()), patterns_.end());
    std::vector<std::size_t> lengths;
    for (const auto& p : patterns_) lengths.push_back(p.size());
    std::sort(lengths.begin(), lengths.end());
    lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
    for (auto p : lengths) max_len_ = std::max(max_len_, p);
    PrefixHash ph(host_);
    for (std::size_t len : lengths) {
      std::unordered_map<Fp128, std::vector<std::int32_t>, Fp128Hash> by_fp;
      for (std::size_t i = 0; i < patterns_.size(); ++i)
        if (patterns_[i].size() == len) by_fp[fingerprint(patterns_[i])].push_back(static_cast<std::int32_t>(i));
      Track t;
      t.len = len;
      t.id.assign(host_.size() >= len ? host_.size() - len + 1 : 0, -1);
      for (std::size_t i = 0; i + len <= host_.size(); ++i) {
        auto it = by_fp.find(ph.window(i, len));
        if (it == by_fp.end()) continue;
        for (auto pid : it->second) {
          if (std::memcmp(host_.data() + i, patterns_[pid].data(), len) == 0) {
            t.id[i] = pid;
            break;
          }
        }
      }
      tracks_.push_back(std::move(t));
    }
  }

  // Sorted and deduplicated; ScanResult::missing_pattern indexes this list.
  const std::vector<Word>& patterns() const { return patterns_; }

  // Patterns (by index) that never occur anywhere in the host.
  std::vector<std::size_t> absent_patterns() const {
    std::vector<char> seen(patterns_.size(), 0);
    for (const auto& t : tracks_)
      for (auto id : t.id)
        if (id >= 0) seen[id] = 1;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) out.push_back(i);
    return out;
  }

  ScanResult scan(std::size_t K, unsigned workers = 1) const {
    if (K < max_len_) throw std::invalid_argument("pattern longer than K");
    if (K > host_.size()) throw std::invalid_argument("K exceeds host length");
    std::size_t windows = host_.size() - K + 1;
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, windows / 4096))));
    if (workers == 1) return scan_range(K, 0, windows);
    std::vector<ScanResult> parts(workers);
    std::vector<std::thread> pool;
    std::size_t chunk = (windows + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(windows, lo + chunk);
      pool.emplace_back([&, w, lo, hi] { parts[w] = lo < hi ? scan_range(K, lo, hi) : ScanResult{}; });
    }
    for (auto& t : pool) t.join();
    for (const auto& p : parts)
      if (!p.all_contained) return p;  // shards are ordered, first failure wins
    return {};
  }

 private:
  struct Track {
    std::size_t len = 0;
    std::vector<std::int32_t> id;
  };

  // Windows with start in [lo, hi).
  ScanResult scan_range(std::size_t K, std::size_t lo, std::size_t hi) const {
    std::vector<std::uint32_t> cnt(patterns_.size(), 0);
    std::size_t present = 0;
    auto add = [&](std::int32_t id) {
      if (id >= 0 && cnt[id]++ == 0) ++present;
    };
    auto remove = [&](std::int32_t id) {
      if (id >= 0 && --cnt[id] == 0) --present;
    };
    // Occurrence at i of a length-l pattern lies in window s iff s <= i <= s+K-l.
    for (const auto& t : tracks_)
      for (std::size_t i = lo; i <= lo + K - t.len; ++i) add(t.id[i]);
    for (std::size_t s = lo; s < hi; ++s) {
      if (s > lo) {
        for (const auto& t : tracks_) {
          remove(t.id[s - 1]);
          add(t.id[s + K - t.len]);
        }
      }
      if (present != patterns_.size()) {
        ScanResult r;
        r.all_contained = false;
        r.failing_window = s;
        for (std::size_t i = 0; i < cnt.size(); ++i)
          if (cnt[i] == 0) {
            r.missing_pattern = i;
            break;
          }
        return r;
      }
    }
    return {};
  }

  const Word& host_;
  std::vector<Word> patterns_;
  std::vector<Track> tracks_;
  std::size_t max_len_ = 0;
};

// Does every length-K window of host contain every pattern?
inline ScanResult sliding_containment_scan(const Word& host, std::size_t K, const std::vector<Word>& patterns,
                                           unsigned workers = 1) {
  for (const auto& p : patterns)
    if (p.size() > K) throw std::invalid_argument("pattern longer than K");
  ContainmentScanner sc(host, patterns);
  return sc.scan(K, workers);
}

}  // namespace wordlab
