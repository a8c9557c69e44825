#pragma once

// Closed sequential pattern mining over single-item sequences.
//
// `mine_closed` follows BIDE+: depth-first prefix growth over pseudo-projected
// databases, with the forward/backward bidirectional closure check and
// BackScan pruning of prefixes that cannot lead to closed patterns.
// `brute_force_closed` enumerates subsequences outright and exists to check it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace macroplan {

using ItemId = std::uint32_t;

class GuardLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SequenceDatabase {
 public:
  SequenceDatabase() = default;

  explicit SequenceDatabase(const std::vector<std::vector<std::string>>& seqs) {
    for (const auto& s : seqs) add(s);
  }

  void add(const std::vector<std::string>& seq) {
    std::vector<ItemId> encoded;
    encoded.reserve(seq.size());
    for (const auto& item : seq) encoded.push_back(intern(item));
    sequences_.push_back(std::move(encoded));
  }

  void add_encoded(std::vector<ItemId> seq) {
    for (ItemId i : seq)
      if (i >= alphabet_.size()) throw std::out_of_range("item id outside alphabet");
    sequences_.push_back(std::move(seq));
  }

  ItemId intern(const std::string& item) {
    auto [it, inserted] = index_.emplace(item, static_cast<ItemId>(alphabet_.size()));
    if (inserted) alphabet_.push_back(item);
    return it->second;
  }

  std::optional<ItemId> find(const std::string& item) const {
    auto it = index_.find(item);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::vector<ItemId>>& sequences() const noexcept { return sequences_; }
  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return sequences_.size(); }
  bool empty() const noexcept { return sequences_.empty(); }

  std::size_t total_items() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sequences_) n += s.size();
    return n;
  }

  std::vector<std::string> decode(const std::vector<ItemId>& items) const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (ItemId i : items) out.push_back(alphabet_.at(i));
    return out;
  }

 private:
  std::vector<std::vector<ItemId>> sequences_;
  std::vector<std::string> alphabet_;
  std::unordered_map<std::string, ItemId> index_;
};

struct Pattern {
  std::vector<ItemId> items;
  std::size_t support = 0;
  friend bool operator==(const Pattern&, const Pattern&) = default;
  friend auto operator<=>(const Pattern&, const Pattern&) = default;
};

struct AbsoluteSupport {
  std::size_t count = 1;
};
struct RelativeSupport {
  double fraction = 0.1;
};

struct MinerConfig {
  std::variant<AbsoluteSupport, RelativeSupport> threshold = RelativeSupport{0.1};
  std::size_t min_length = 1;
  std::optional<std::size_t> max_length;

  void validate() const {
    if (auto* a = std::get_if<AbsoluteSupport>(&threshold); a && a->count < 1)
      throw std::invalid_argument("absolute support must be >= 1");
    if (auto* r = std::get_if<RelativeSupport>(&threshold); r && !(r->fraction > 0.0 && r->fraction <= 1.0))
      throw std::invalid_argument("relative support must be in (0, 1]");
    if (min_length < 1) throw std::invalid_argument("min_length must be >= 1");
    if (max_length && *max_length < min_length) throw std::invalid_argument("max_length < min_length");
  }

  // sigma for a database of `db_size` sequences; relative thresholds round up.
  std::size_t sigma(std::size_t db_size) const {
    if (auto* a = std::get_if<AbsoluteSupport>(&threshold)) return a->count;
    double f = std::get<RelativeSupport>(threshold).fraction;
    // Guard against 0.3 * 10 = 3.0000000000000004.
    auto s = static_cast<std::size_t>(std::ceil(f * static_cast<double>(db_size) - 1e-9));
    return std::max<std::size_t>(s, 1);
  }

  bool length_ok(std::size_t n) const noexcept { return n >= min_length && (!max_length || n <= *max_length); }
};

// Gapped, order-preserving containment.
inline bool is_subsequence(const std::vector<ItemId>& needle, const std::vector<ItemId>& hay) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < hay.size() && i < needle.size(); ++j)
    if (hay[j] == needle[i]) ++i;
  return i == needle.size();
}

inline std::size_t compute_support(const SequenceDatabase& db, const std::vector<ItemId>& alpha) {
  std::size_t n = 0;
  for (const auto& s : db.sequences())
    if (is_subsequence(alpha, s)) ++n;
  return n;
}

// String-level overload; an item missing from the alphabet means support 0
// unless alpha is empty.
inline std::size_t compute_support(const SequenceDatabase& db, const std::vector<std::string>& alpha) {
  std::vector<ItemId> enc;
  for (const auto& a : alpha) {
    auto id = db.find(a);
    if (!id) return 0;
    enc.push_back(*id);
  }
  return compute_support(db, enc);
}

inline void sort_patterns(std::vector<Pattern>& ps) { std::sort(ps.begin(), ps.end()); }

namespace detail {

// One pseudo-projection entry: the sequence and the position of the last
// prefix item in its leftmost (first-instance) embedding.
struct Projection {
  std::uint32_t seq;
  std::uint32_t pos;
};

class BideMiner {
 public:
  BideMiner(const SequenceDatabase& db, const MinerConfig& cfg) : db_(db), cfg_(cfg), sigma_(cfg.sigma(db.size())) {}

  std::vector<Pattern> run() {
    if (db_.empty() || sigma_ > db_.size()) return {};
    const auto& seqs = db_.sequences();
    std::map<ItemId, std::vector<Projection>> first;
    for (std::uint32_t s = 0; s < seqs.size(); ++s) {
      std::set<ItemId> seen;
      for (std::uint32_t p = 0; p < seqs[s].size(); ++p)
        if (seen.insert(seqs[s][p]).second) first[seqs[s][p]].push_back({s, p});
    }
    for (auto& [item, proj] : first) {
      if (proj.size() < sigma_) continue;
      prefix_.assign(1, item);
      grow(proj);
    }
    sort_patterns(out_);
    return std::move(out_);
  }

 private:
  const SequenceDatabase& db_;
  const MinerConfig& cfg_;
  std::size_t sigma_;
  std::vector<ItemId> prefix_;
  std::vector<Pattern> out_;

  // Leftmost embedding of prefix_ in seq (positions of each prefix item).
  std::vector<int> first_instance(const std::vector<ItemId>& seq) const {
    std::vector<int> pos(prefix_.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < prefix_.size(); ++i) {
      while (seq[j] != prefix_[i]) ++j;
      pos[i] = static_cast<int>(j++);
    }
    return pos;
  }

  // Rightmost embedding anchored so that item n-1 sits at or before `last`.
  std::vector<int> last_embedding(const std::vector<ItemId>& seq, int last) const {
    std::vector<int> pos(prefix_.size());
    int j = last;
    for (std::size_t k = prefix_.size(); k-- > 0;) {
      while (seq[j] != prefix_[k]) --j;
      pos[k] = j--;
    }
    return pos;
  }

  // For each prefix slot i, items that occur in the period between the end of
  // the first instance of prefix[0..i) and `bound[i]` of every sequence. With
  // last-in-last bounds these are maximum periods (backward extension check),
  // with last-in-first bounds semi-maximum periods (BackScan).
  bool common_item_in_periods(const std::vector<Projection>& proj, bool semi) const {
    const auto& seqs = db_.sequences();
    const std::size_t n = prefix_.size();
    std::vector<std::vector<ItemId>> common(n);
    std::vector<bool> alive(n, true);
    bool first_seq = true;
    for (const auto& pr : proj) {
      const auto& seq = seqs[pr.seq];
      auto fi = first_instance(seq);
      int anchor = semi ? fi[n - 1] : last_occurrence(seq, prefix_[n - 1]);
      auto bound = last_embedding(seq, anchor);
      bool any_alive = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        int lo = i == 0 ? 0 : fi[i - 1] + 1;
        int hi = bound[i];
        std::vector<ItemId> items;
        for (int p = lo; p < hi; ++p) items.push_back(seq[p]);
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        if (first_seq) {
          common[i] = std::move(items);
        } else {
          std::vector<ItemId> keep;
          std::set_intersection(common[i].begin(), common[i].end(), items.begin(), items.end(), std::back_inserter(keep));
          common[i] = std::move(keep);
        }
        if (common[i].empty()) alive[i] = false;
        any_alive = any_alive || alive[i];
      }
      first_seq = false;
      if (!any_alive) return false;
    }
    return std::find(alive.begin(), alive.end(), true) != alive.end();
  }

  static int last_occurrence(const std::vector<ItemId>& seq, ItemId item) {
    for (int p = static_cast<int>(seq.size()) - 1; p >= 0; --p)
      if (seq[p] == item) return p;
    return -1;
  }

  void grow(const std::vector<Projection>& proj) {
    const auto& seqs = db_.sequences();
    const std::size_t support = proj.size();

    if (common_item_in_periods(proj, /*semi=*/true)) return;  // BackScan

    std::map<ItemId, std::vector<Projection>> ext;
    for (const auto& pr : proj) {
      const auto& seq = seqs[pr.seq];
      std::set<ItemId> seen;
      for (std::uint32_t p = pr.pos + 1; p < seq.size(); ++p)
        if (seen.insert(seq[p]).second) ext[seq[p]].push_back({pr.seq, p});
    }
    bool forward = std::any_of(ext.begin(), ext.end(), [&](const auto& kv) { return kv.second.size() == support; });
    if (!forward && cfg_.length_ok(prefix_.size()) && !common_item_in_periods(proj, /*semi=*/false))
      out_.push_back(Pattern{prefix_, support});

    if (cfg_.max_length && prefix_.size() >= *cfg_.max_length) return;
    for (auto& [item, next] : ext) {
      if (next.size() < sigma_) continue;
      prefix_.push_back(item);
      grow(next);
      prefix_.pop_back();
    }
  }
};

}  // namespace detail

// Closed frequent patterns: support >= sigma, length within the configured
// bounds, and no strict super-sequence (of any length) with equal support.
// Output is sorted by (items, support).
inline std::vector<Pattern> mine_closed(const SequenceDatabase& db, const MinerConfig& cfg) {
  cfg.validate();
  return detail::BideMiner(db, cfg).run();
}

inline constexpr std::size_t kBruteForceItemLimit = 60;
inline constexpr std::size_t kBruteForceSequenceLimit = 20;

// Reference implementation: enumerate every distinct subsequence, count
// support directly, then filter by threshold, length and closure.
inline std::vector<Pattern> brute_force_closed(const SequenceDatabase& db, const MinerConfig& cfg) {
  cfg.validate();
  if (db.total_items() > kBruteForceItemLimit)
    throw GuardLimitExceeded("brute-force miner: " + std::to_string(db.total_items()) + " items exceeds limit of " +
                             std::to_string(kBruteForceItemLimit));
  for (const auto& s : db.sequences())
    if (s.size() > kBruteForceSequenceLimit)
      throw GuardLimitExceeded("brute-force miner: sequence of length " + std::to_string(s.size()) +
                               " exceeds limit of " + std::to_string(kBruteForceSequenceLimit));

  std::set<std::vector<ItemId>> candidates;
  for (const auto& s : db.sequences()) {
    const std::size_t n = s.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<ItemId> sub;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1u) sub.push_back(s[i]);
      candidates.insert(std::move(sub));
    }
  }

  const std::size_t sigma = cfg.sigma(db.size());
  std::vector<Pattern> frequent;
  for (const auto& c : candidates) {
    std::size_t sup = compute_support(db, c);
    if (sup >= sigma) frequent.push_back(Pattern{c, sup});
  }

  std::vector<Pattern> out;
  for (const auto& a : frequent) {
    if (!cfg.length_ok(a.items.size())) continue;
    bool closed = true;
    for (const auto& b : frequent) {
      if (b.items.size() > a.items.size() && b.support == a.support && is_subsequence(a.items, b.items)) {
        closed = false;
        break;
      }
    }
    if (closed) out.push_back(a);
  }
  sort_patterns(out);
  return out;
}

// SPMF sequence format: items are positive integers, `-1` closes an itemset
// and `-2` closes a sequence. Each item becomes its own itemset here.
inline std::string to_spmf(const SequenceDatabase& db) {
  std::ostringstream os;
  for (const auto& s : db.sequences()) {
    for (ItemId i : s) os << (i + 1) << " -1 ";
    os << "-2\n";
  }
  return os.str();
}

// Imports an SPMF file. Items are named by their integer text; itemsets with
// more than one item are rejected since plans are totally ordered.
inline SequenceDatabase from_spmf(std::string_view text) {
  SequenceDatabase db;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == '%' || line[first] == '@') continue;
    std::istringstream ls(line);
    std::vector<std::string> seq;
    std::size_t in_itemset = 0;
    bool terminated = false;
    long long tok;
    while (ls >> tok) {
      if (tok == -2) {
        terminated = true;
        break;
      }
      if (tok == -1) {
        in_itemset = 0;
        continue;
      }
      if (tok <= 0) throw std::runtime_error("spmf line " + std::to_string(line_no) + ": items must be positive");
      if (++in_itemset > 1)
        throw std::runtime_error("spmf line " + std::to_string(line_no) + ": multi-item itemsets are not supported");
      seq.push_back(std::to_string(tok));
    }
    if (!terminated) throw std::runtime_error("spmf line " + std::to_string(line_no) + ": missing -2 terminator");
    db.add(seq);
  }
  return db;
}

}  // namespace macroplan
