#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>

#include "pagesplit/errors.hpp"
#include "pagesplit/metrics.hpp"
#include "pagesplit/text.hpp"

namespace pagesplit {
namespace {

// Bit-parallel LCS length (Allison-Dix / Hyyro), 64 pattern positions per
// word. V keeps a zero bit for every pattern position that extends the LCS.
std::size_t lcs_length(const std::u32string& pattern, const std::u32string& text) {
  const std::size_t m = pattern.size();
  if (m == 0 || text.empty()) return 0;
  const std::size_t words = (m + 63) / 64;

  std::unordered_map<char32_t, std::vector<std::uint64_t>> peq;
  for (std::size_t i = 0; i < m; ++i) {
    auto& mask = peq.try_emplace(pattern[i], words, 0).first->second;
    mask[i / 64] |= std::uint64_t{1} << (i % 64);
  }

  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (const char32_t c : text) {
    const auto it = peq.find(c);
    if (it == peq.end()) continue;  // U = 0 leaves V unchanged
    const auto& eq = it->second;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & eq[w];
      const std::uint64_t sum = v[w] + u;
      const std::uint64_t with_carry = sum + carry;
      carry = (sum < v[w] || with_carry < sum) ? 1 : 0;
      v[w] = with_carry | (v[w] & ~u);
    }
  }

  std::size_t ones = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t word = v[w];
    if (w + 1 == words && m % 64 != 0) word &= (std::uint64_t{1} << (m % 64)) - 1;
    ones += static_cast<std::size_t>(std::popcount(word));
  }
  return m - ones;
}

}  // namespace

std::size_t indel_distance(std::string_view a, std::string_view b) {
  const auto x = utf8_decode(a);
  const auto y = utf8_decode(b);
  const auto lcs = x.size() <= y.size() ? lcs_length(x, y) : lcs_length(y, x);
  return x.size() + y.size() - 2 * lcs;
}

double code_similarity(std::string_view a, std::string_view b) {
  const auto x = utf8_decode(a);
  const auto y = utf8_decode(b);
  const std::size_t total = x.size() + y.size();
  if (total == 0) return 1.0;
  const auto lcs = x.size() <= y.size() ? lcs_length(x, y) : lcs_length(y, x);
  return 1.0 - static_cast<double>(total - 2 * lcs) / static_cast<double>(total);
}

double dice_text(std::string_view a, std::string_view b) {
  const auto x = utf8_decode(a);
  const auto y = utf8_decode(b);
  if (x.empty() && y.empty()) return 1.0;
  std::unordered_map<char32_t, long> counts;
  for (const char32_t c : x) ++counts[c];
  std::size_t common = 0;
  for (const char32_t c : y) {
    auto it = counts.find(c);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(x.size() + y.size());
}

double iou(const Region& a, const Region& b) {
  if (a.area() <= 0 || b.area() <= 0) throw EvaluationError("iou of a zero-area box");
  const std::int64_t iw = std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const std::int64_t ih = std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const std::int64_t inter = iw * ih;
  return static_cast<double>(inter) / static_cast<double>(a.area() + b.area() - inter);
}

double iou(const NormBox& a, const NormBox& b) {
  if (!(a.area() > 0) || !(b.area() > 0)) throw EvaluationError("iou of a zero-area box");
  const double iw = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double ih = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

double evaluate_segmentation(const std::vector<NormBox>& predicted,
                             const std::vector<NormBox>& ground_truth) {
  if (predicted.empty()) throw EvaluationError("no predicted boxes");
  if (ground_truth.empty()) throw EvaluationError("no ground-truth boxes");
  double total = 0;
  for (const auto& p : predicted) {
    double best = 0;
    for (const auto& g : ground_truth) best = std::max(best, iou(p, g));
    total += best;
  }
  return total / static_cast<double>(predicted.size());
}

}  // namespace pagesplit
