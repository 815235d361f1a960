// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "lcslis/core.hpp"

namespace lcslis {

enum class Source : std::uint8_t { None, Direct, Tuple, Nearby };

inline const char* to_string(Source s) {
  switch (s) {
    case Source::None: return "none";
    case Source::Direct: return "direct";
    case Source::Tuple: return "tuple";
    case Source::Nearby: return "nearby";
  }
  return "?";
}

struct TableEntry {
  std::uint32_t bound = 0;
  Source source = Source::None;
  double lambda_level = 0.0;
  Matching certificate;  // oriented from the smaller window id to the larger
};

// Symmetric k x k table of certified lower bounds. Only set off-diagonal entries are stored;
// the diagonal is implicitly exact.
class EstimateTable {
 public:
  EstimateTable() = default;
  explicit EstimateTable(std::vector<Index> lengths) : lengths_(std::move(lengths)) {}

  std::size_t k() const { return lengths_.size(); }
  const std::vector<Index>& lengths() const { return lengths_; }

  std::uint32_t bound(std::size_t i, std::size_t j) const {
    if (i == j) return lengths_.at(i);
    auto it = entries_.find(key(i, j));
    return it == entries_.end() ? 0 : it->second.bound;
  }

  Source source(std::size_t i, std::size_t j) const {
    if (i == j) return Source::Direct;
    auto it = entries_.find(key(i, j));
    return it == entries_.end() ? Source::None : it->second.source;
  }

  double lambda_level(std::size_t i, std::size_t j) const {
    if (i == j) return 1.0;
    auto it = entries_.find(key(i, j));
    return it == entries_.end() ? 0.0 : it->second.lambda_level;
  }

  bool has(std::size_t i, std::size_t j) const { return i == j || entries_.count(key(i, j)) > 0; }

  // Certificate oriented from window i to window j.
  Matching certificate(std::size_t i, std::size_t j) const {
    if (i == j) return identity_matching(lengths_.at(i));
    auto it = entries_.find(key(i, j));
    if (it == entries_.end()) return {};
    return i < j ? it->second.certificate : transpose(it->second.certificate);
  }

  // Keeps the larger bound; ties keep the incumbent. `cert` is oriented i -> j.
  bool offer(std::size_t i, std::size_t j, std::uint32_t bound, Source src, double lambda, Matching cert) {
    require(i < k() && j < k(), "EstimateTable: index out of range");
    if (i == j) return false;
    ensure(bound <= std::min(lengths_[i], lengths_[j]), "EstimateTable: bound exceeds window length");
    ensure(cert.size() >= bound, "EstimateTable: certificate smaller than bound");
    auto [it, inserted] = entries_.try_emplace(key(i, j));
    if (!inserted && it->second.bound >= bound) return false;
    it->second.bound = bound;
    it->second.source = src;
    it->second.lambda_level = lambda;
    it->second.certificate = i < j ? std::move(cert) : transpose(cert);
    return true;
  }

  std::size_t stored() const { return entries_.size(); }

  // Visits stored entries as (lo, hi, entry) with lo < hi.
  void for_each(const std::function<void(std::size_t, std::size_t, const TableEntry&)>& fn) const {
    for (const auto& [kk, e] : entries_) fn(std::size_t(kk >> 32), std::size_t(kk & 0xffffffffu), e);
  }

  bool operator==(const EstimateTable& o) const {
    if (lengths_ != o.lengths_ || entries_.size() != o.entries_.size()) return false;
    for (const auto& [kk, e] : entries_) {
      auto it = o.entries_.find(kk);
      if (it == o.entries_.end()) return false;
      const auto& f = it->second;
      if (e.bound != f.bound || e.source != f.source || e.certificate != f.certificate) return false;
    }
    return true;
  }

 private:
  static std::uint64_t key(std::size_t i, std::size_t j) {
    const std::uint64_t lo = std::min(i, j), hi = std::max(i, j);
    return (lo << 32) | hi;
  }
  std::vector<Index> lengths_;
  std::unordered_map<std::uint64_t, TableEntry> entries_;
};

inline void merge_into(EstimateTable& dst, const EstimateTable& src) {
  require(dst.lengths() == src.lengths(), "merge_tables: window universes differ");
  src.for_each([&](std::size_t i, std::size_t j, const TableEntry& e) {
    dst.offer(i, j, e.bound, e.source, e.lambda_level, e.certificate);
  });
}

// Entrywise max; the winning entry keeps its certificate.
inline EstimateTable merge_tables(const std::vector<EstimateTable>& tables) {
  if (tables.empty()) return {};
  EstimateTable out(tables.front().lengths());
  for (const auto& t : tables) merge_into(out, t);
  return out;
}

}  // namespace lcslis
