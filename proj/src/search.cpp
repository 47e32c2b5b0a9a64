#include <algorithm>
#include <tuple>

#include "pgamech/error.hpp"
#include "pgamech/extraction.hpp"
#include "pgamech/transform.hpp"

namespace pgamech {

namespace {

// Instructions available at canonical position p of a sequence with the
// given shape. Jump counters cover each distinct target once.
std::vector<Instruction> choices_at(const SearchBounds& bounds, std::size_t n, std::size_t m,
                                    std::size_t p) {
  std::vector<Instruction> out;
  for (const std::string& a : bounds.alphabet) {
    out.push_back(Instruction::basic(a));
    out.push_back(Instruction::pos_test(a));
    out.push_back(Instruction::neg_test(a));
  }
  out.push_back(Instruction::termination());
  std::size_t max_counter = 0;
  if (m == 0) {
    max_counter = n - p;  // n - p already leaves the sequence
  } else if (p < n) {
    max_counter = n + m - 1 - p;
  } else {
    max_counter = m;
  }
  for (std::size_t k = 0; k <= max_counter; ++k) out.push_back(Instruction::jump(k));
  return out;
}

void enumerate_shape(const ThreadGraph& p, const SearchBounds& bounds, std::size_t n,
                     std::size_t m, std::vector<InstrSeq>& found) {
  const std::size_t total = n + m;
  std::vector<std::vector<Instruction>> choices;
  for (std::size_t i = 0; i < total; ++i) choices.push_back(choices_at(bounds, n, m, i));

  std::vector<std::size_t> digit(total, 0);
  std::vector<Instruction> prefix, cycle;
  for (;;) {
    prefix.clear();
    cycle.clear();
    for (std::size_t i = 0; i < n; ++i) prefix.push_back(choices[i][digit[i]]);
    for (std::size_t i = n; i < total; ++i) cycle.push_back(choices[i][digit[i]]);
    InstrSeq candidate = m == 0 ? InstrSeq(prefix) : InstrSeq(prefix, cycle);
    if (is_implementation(candidate, p)) found.push_back(std::move(candidate));

    std::size_t i = total;
    while (i > 0) {
      --i;
      if (++digit[i] < choices[i].size()) break;
      digit[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace

void SearchBounds::validate() const {
  if (max_prefix + max_cycle < 1)
    throw PreconditionError("search bounds admit no sequence (prefix and cycle both 0)");
  if (alphabet.empty()) throw PreconditionError("search alphabet is empty");
  for (const std::string& a : alphabet)
    if (!is_valid_action_name(a)) throw PreconditionError("invalid action name '" + a + "'");
}

std::vector<InstrSeq> search_implementations(const ThreadGraph& p, const SearchBounds& bounds) {
  bounds.validate();
  std::vector<InstrSeq> found;
  for (std::size_t n = 0; n <= bounds.max_prefix; ++n) {
    for (std::size_t m = 0; m <= bounds.max_cycle; ++m) {
      if (n + m == 0) continue;
      enumerate_shape(p, bounds, n, m, found);
    }
  }
  std::vector<std::tuple<std::size_t, std::size_t, std::string, std::size_t>> keys;
  keys.reserve(found.size());
  for (std::size_t i = 0; i < found.size(); ++i)
    keys.emplace_back(found[i].canonical_size(), found[i].prefix_length(),
                      print_pga(found[i]), i);
  std::sort(keys.begin(), keys.end());
  std::vector<InstrSeq> ordered;
  ordered.reserve(found.size());
  for (const auto& key : keys) ordered.push_back(found[std::get<3>(key)]);
  return ordered;
}

std::vector<InstrSeq> pareto_front(const std::vector<InstrSeq>& candidates) {
  // Bisimilar extractions share a minimal graph; compare classes, not members.
  std::vector<ThreadGraph> classes;
  std::vector<std::size_t> class_of;
  for (const InstrSeq& x : candidates) {
    ThreadGraph g = minimize(extract_mechanistic(x));
    const auto it = std::find(classes.begin(), classes.end(), g);
    class_of.push_back(static_cast<std::size_t>(it - classes.begin()));
    if (it == classes.end()) classes.push_back(std::move(g));
  }
  std::vector<char> dominated(classes.size(), 0);
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = 0; j < classes.size() && !dominated[i]; ++j)
      if (i != j && improves(classes[j], classes[i])) dominated[i] = 1;

  std::vector<InstrSeq> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (!dominated[class_of[i]]) out.push_back(candidates[i]);
  return out;
}

}  // namespace pgamech
