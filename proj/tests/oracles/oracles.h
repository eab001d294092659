// Copyright 2026 The Fablegen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent reference implementations used by tests. None of them calls
// into the library code they check.

#ifndef FABLEGEN_TESTS_ORACLES_ORACLES_H_
#define FABLEGEN_TESTS_ORACLES_ORACLES_H_

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace fablegen::oracle {

using Tokens = std::vector<std::string>;

inline bool IsSubsequence(const Tokens &sub, const Tokens &seq) {
  size_t j = 0;
  for (size_t i = 0; i < seq.size() && j < sub.size(); ++i) {
    if (seq[i] == sub[j]) ++j;
  }
  return j == sub.size();
}

// Enumerates every subsequence of the shorter list. Exponential; keep the
// shorter side small.
inline int BruteForceLcs(const Tokens &a, const Tokens &b) {
  const Tokens &small = a.size() <= b.size() ? a : b;
  const Tokens &large = a.size() <= b.size() ? b : a;
  const uint32_t n = static_cast<uint32_t>(small.size());
  int best = 0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int bits = __builtin_popcount(mask);
    if (bits <= best) continue;
    Tokens sub;
    for (uint32_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sub.push_back(small[i]);
    }
    if (IsSubsequence(sub, large)) best = bits;
  }
  return best;
}

// Top-down memoised recursion on suffixes; used where enumeration is
// infeasible.
inline int RecursiveLcs(const Tokens &a, const Tokens &b) {
  std::vector<std::vector<int>> memo(a.size() + 1, std::vector<int>(b.size() + 1, -1));
  auto rec = [&](auto &&self, size_t i, size_t j) -> int {
    if (i == a.size() || j == b.size()) return 0;
    int &m = memo[i][j];
    if (m >= 0) return m;
    if (a[i] == b[j]) return m = 1 + self(self, i + 1, j + 1);
    return m = std::max(self(self, i + 1, j), self(self, i, j + 1));
  };
  return rec(rec, 0, 0);
}

struct Scored {
  std::string question;
  std::string answer;
  double score = 0;
  int rank_hint = 0;
};

// Keeps one entry per (question, answer): highest score, then lowest
// rank_hint. Orders by score desc, rank_hint asc, question asc, answer asc
// and keeps n.
inline std::vector<Scored> Reselect(const std::vector<Scored> &candidates, int n) {
  std::map<std::pair<std::string, std::string>, Scored> best;
  for (const auto &c : candidates) {
    auto key = std::make_pair(c.question, c.answer);
    auto it = best.find(key);
    if (it == best.end() || c.score > it->second.score ||
        (c.score == it->second.score && c.rank_hint < it->second.rank_hint)) {
      best[key] = c;
    }
  }
  std::vector<Scored> out;
  for (auto &[k, v] : best) out.push_back(v);
  std::sort(out.begin(), out.end(), [](const Scored &x, const Scored &y) {
    return std::make_tuple(-x.score, x.rank_hint, x.question, x.answer) <
           std::make_tuple(-y.score, y.rank_hint, y.question, y.answer);
  });
  if (static_cast<int>(out.size()) > n) out.resize(n);
  return out;
}

}  // namespace fablegen::oracle

#endif  // FABLEGEN_TESTS_ORACLES_ORACLES_H_
