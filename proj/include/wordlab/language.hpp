// Factor-language oracles: membership, L(n) and completions of a core word.
#pragma once

#include "wordlab/words.hpp"

#include <map>
#include <mutex>
#include <unordered_set>
#include <vector>

namespace wordlab {

class LanguageOracle {
 public:
  virtual ~LanguageOracle() = default;

  virtual std::size_t alphabet_size() const = 0;
  // Largest n for which factors(n) can be answered exactly.
  virtual std::size_t max_length() const = 0;

  // Sorted L(n). References stay valid for the oracle's lifetime.
  const std::vector<Word>& factors(std::size_t n) const {
    return entry(n).sorted;
  }

  bool contains(const Word& w) const {
    if (w.empty()) return true;
    const auto& e = entry(w.size());
    return e.lookup.count(w) != 0;
  }

  // Words x in L(len) with x[offset, offset+|core|) == core.
  std::vector<Word> completions(const Word& core, std::size_t offset, std::size_t len) const {
    if (offset + core.size() > len) throw std::invalid_argument("core does not fit");
    std::vector<Word> out;
    for (const auto& x : factors(len))
      if (x.compare(offset, core.size(), core) == 0) out.push_back(x);
    return out;
  }

 protected:
  virtual std::vector<Word> compute_factors(std::size_t n) const = 0;

 private:
  struct Entry {
    std::vector<Word> sorted;
    std::unordered_set<Word> lookup;
  };

  const Entry& entry(std::size_t n) const {
    if (n > max_length()) throw std::out_of_range("length beyond oracle depth");
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    Entry e;
    e.sorted = compute_factors(n);
    std::sort(e.sorted.begin(), e.sorted.end());
    e.lookup.insert(e.sorted.begin(), e.sorted.end());
    return cache_.emplace(n, std::move(e)).first->second;
  }

  mutable std::mutex mu_;
  mutable std::map<std::size_t, Entry> cache_;  // node-based, so references survive inserts
};

// L(n) read off a fixed list of host words (all windows of length n).
class HostLanguage : public LanguageOracle {
 public:
  HostLanguage(std::vector<Word> hosts, std::size_t sigma, std::size_t max_len)
      : hosts_(std::move(hosts)), sigma_(sigma), max_len_(max_len) {}
  std::size_t alphabet_size() const override { return sigma_; }
  std::size_t max_length() const override { return max_len_; }

 protected:
  std::vector<Word> compute_factors(std::size_t n) const override { return factor_set(hosts_, n).members; }

 private:
  std::vector<Word> hosts_;
  std::size_t sigma_;
  std::size_t max_len_;
};

}  // namespace wordlab
