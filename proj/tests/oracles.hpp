#pragma once
// Independent reference implementations used to cross-check the library.
// They favour obviousness over speed and share no code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Fisher-Yates as documented: for i = n-1 down to 1, j uniform in [0, i]
// by rejection on raw 64-bit draws, swap(i, j).
inline std::vector<std::size_t> shuffle(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(i);
  for (std::size_t i = n; i-- > 1;) {
    const std::uint64_t bound = i + 1;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t reject_from = max - max % bound;
    std::uint64_t r = gen();
    while (r >= reject_from) r = gen();
    std::swap(v[i], v[r % bound]);
  }
  return v;
}

// Item a outranks item b: higher score, or equal score and smaller id.
inline bool outranks(double sa, const std::string& ia, double sb, const std::string& ib) {
  return sa > sb || (sa == sb && ia < ib);
}

inline double pr_auc(const std::vector<std::string>& ids, const std::vector<double>& s,
                     const std::vector<int>& y) {
  const std::size_t n = s.size();
  double total = 0.0;
  int positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!y[i]) continue;
    ++positives;
    int rank = 1, pos_at_or_above = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && outranks(s[j], ids[j], s[i], ids[i])) {
        ++rank;
        pos_at_or_above += y[j];
      }
    }
    total += static_cast<double>(pos_at_or_above) / rank;
  }
  return total / positives;
}

inline double roc_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1.0;
        if (s[i] > s[j]) wins += 1.0;
        else if (s[i] == s[j]) wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

struct Confusion {
  int tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Confusion confusion(const std::vector<double>& s, const std::vector<int>& y, double threshold) {
  Confusion c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool predicted = !(s[i] < threshold);
    if (predicted && y[i]) ++c.tp;
    if (predicted && !y[i]) ++c.fp;
    if (!predicted && y[i]) ++c.fn;
    if (!predicted && !y[i]) ++c.tn;
  }
  return c;
}

// Dense tf-idf with per-pair cosine, "REP" excluded.
inline std::vector<double> summed_cosine(const std::vector<std::vector<std::string>>& weak,
                                         const std::vector<std::vector<std::string>>& target) {
  std::vector<std::vector<std::string>> all = weak;
  all.insert(all.end(), target.begin(), target.end());
  std::map<std::string, int> df;
  for (const auto& doc : all) {
    std::set<std::string> seen;
    for (const auto& t : doc) {
      if (t != "REP") seen.insert(t);
    }
    for (const auto& t : seen) ++df[t];
  }
  std::vector<std::string> vocab;
  for (const auto& [t, c] : df) vocab.push_back(t);
  const double n = static_cast<double>(all.size());
  auto dense = [&](const std::vector<std::string>& doc) {
    std::vector<double> v(vocab.size(), 0.0);
    for (std::size_t k = 0; k < vocab.size(); ++k) {
      const double count = static_cast<double>(std::count(doc.begin(), doc.end(), vocab[k]));
      v[k] = count * (std::log((1.0 + n) / (1.0 + df[vocab[k]])) + 1.0);
    }
    return v;
  };
  std::vector<double> scores;
  for (const auto& w : weak) {
    const auto a = dense(w);
    double total = 0.0;
    for (const auto& t : target) {
      const auto b = dense(t);
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t k = 0; k < vocab.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
      }
      if (na > 0.0 && nb > 0.0) total += dot / (std::sqrt(na) * std::sqrt(nb));
    }
    scores.push_back(total);
  }
  return scores;
}

struct Candidate {
  std::string id;
  int slots;
  double score;
};

// Filter, then k rounds of picking the best remaining candidate.
inline std::vector<std::string> select_top(std::vector<Candidate> pool, std::size_t k, int min_slots,
                                           int max_slots) {
  std::vector<Candidate> eligible;
  for (const auto& c : pool) {
    if (c.slots >= min_slots && c.slots <= max_slots) eligible.push_back(c);
  }
  std::vector<std::string> out;
  while (out.size() < k && !eligible.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < eligible.size(); ++i) {
      if (outranks(eligible[i].score, eligible[i].id, eligible[best].score, eligible[best].id)) best = i;
    }
    out.push_back(eligible[best].id);
    eligible.erase(eligible.begin() + static_cast<long>(best));
  }
  return out;
}

// Marks every token covered by some span [i, j) that equals a unigram
// (length 1) or a phrase (length >= 2).
inline std::vector<bool> ngram_scan(const std::vector<std::string>& tokens, const std::set<std::string>& unigrams,
                                    const std::set<std::vector<std::string>>& phrases) {
  std::vector<bool> hit(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = i + 1; j <= tokens.size(); ++j) {
      const std::vector<std::string> span(tokens.begin() + static_cast<long>(i), tokens.begin() + static_cast<long>(j));
      const bool match = span.size() == 1 ? unigrams.count(span[0]) > 0 : phrases.count(span) > 0;
      if (match) {
        for (std::size_t k = i; k < j; ++k) hit[k] = true;
      }
    }
  }
  return hit;
}

}  // namespace oracle
