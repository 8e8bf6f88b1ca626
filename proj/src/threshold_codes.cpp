#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <stdexcept>

#include "zk/kernels.hpp"

namespace zk {

namespace {

// Integer weights in [-4, 4] realise every threshold function on at most four
// inputs; half-integer thresholds keep points off the hyperplane.
constexpr int kMaxLtcInputs = 4;
constexpr int kWeightRange = 4;

struct ThresholdTable {
  std::vector<std::uint32_t> truth;
  std::vector<std::vector<int>> weights;  // integer w
  std::vector<double> bias;               // half-integer b
};

ThresholdTable build_table(int m) {
  std::map<std::uint32_t, std::pair<std::vector<int>, double>> found;
  const int side = 2 * kWeightRange + 1;
  int combos = 1;
  for (int i = 0; i < m; ++i) combos *= side;
  const int bmax = m * kWeightRange + 1;
  std::vector<int> w(m);
  for (int code = 0; code < combos; ++code) {
    int c = code;
    for (int i = 0; i < m; ++i) {
      w[i] = c % side - kWeightRange;
      c /= side;
    }
    for (int b2 = -2 * bmax - 1; b2 <= 2 * bmax + 1; b2 += 2) {
      const double b = 0.5 * b2;
      std::uint32_t table = 0;
      for (std::uint32_t h = 0; h < (1u << m); ++h) {
        double s = b;
        for (int i = 0; i < m; ++i)
          if ((h >> i) & 1u) s += w[i];
        if (s > 0) table |= 1u << h;
      }
      found.emplace(table, std::make_pair(w, b));
    }
  }
  ThresholdTable out;
  for (auto& [t, wb] : found) {
    out.truth.push_back(t);
    out.weights.push_back(wb.first);
    out.bias.push_back(wb.second);
  }
  return out;
}

const ThresholdTable& table_for(int m) {
  if (m < 0 || m > kMaxLtcInputs) throw std::invalid_argument("threshold functions: m must be in [0, 4]");
  static std::array<ThresholdTable, kMaxLtcInputs + 1> tables;
  static std::array<std::once_flag, kMaxLtcInputs + 1> flags;
  std::call_once(flags[m], [m] { tables[m] = build_table(m); });
  return tables[m];
}

class ColumnSearch {
 public:
  ColumnSearch(const Code& code, int m, LtcOptions opt)
      : code_(code), m_(m), n_(code.dim()), opt_(opt), table_(table_for(m)), choice_(n_, 0) {}

  LtcDecision run() { return descend(0) ? LtcDecision::yes : (exhausted_ ? LtcDecision::unknown : LtcDecision::no); }
  std::uint64_t nodes() const { return nodes_; }
  const std::vector<std::size_t>& choice() const { return choice_; }

 private:
  // Image prefix of h on columns [0, j).
  StateIndex prefix(std::uint32_t h, int j) const {
    StateIndex s = 0;
    for (int c = 0; c < j; ++c)
      if ((table_.truth[choice_[c]] >> h) & 1u) s |= StateIndex{1} << c;
    return s;
  }

  bool consistent(int j) const {
    const StateIndex mask = (StateIndex{1} << j) - 1;
    std::vector<StateIndex> image;
    for (std::uint32_t h = 0; h < (1u << m_); ++h) image.push_back(prefix(h, j));
    std::sort(image.begin(), image.end());
    for (StateIndex c : code_.members()) {
      if (!std::binary_search(image.begin(), image.end(), c & mask)) return false;
    }
    if (opt_.strict) {
      std::vector<StateIndex> cp;
      for (StateIndex c : code_.members()) cp.push_back(c & mask);
      std::sort(cp.begin(), cp.end());
      for (StateIndex s : image)
        if (!std::binary_search(cp.begin(), cp.end(), s)) return false;
    }
    return true;
  }

  bool descend(int j) {
    if (j == n_) return true;
    for (std::size_t f = 0; f < table_.truth.size(); ++f) {
      if (++nodes_ > opt_.budget) {
        exhausted_ = true;
        return false;
      }
      choice_[j] = f;
      if (consistent(j + 1) && descend(j + 1)) return true;
      if (exhausted_) return false;
    }
    return false;
  }

  const Code& code_;
  int m_;
  int n_;
  LtcOptions opt_;
  const ThresholdTable& table_;
  std::vector<std::size_t> choice_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace

const std::vector<std::uint32_t>& threshold_functions(int m) { return table_for(m).truth; }

LtcResult is_linear_threshold_code(const Code& code, int m, LtcOptions options) {
  if (code.dim() > kMaxLtcInputs || m > kMaxLtcInputs || m < 0) {
    throw std::invalid_argument("is_linear_threshold_code: requires code length and m at most 4");
  }
  LtcResult result;
  const std::size_t points = std::size_t{1} << m;
  if (code.size() > points) {
    result.decision = LtcDecision::no;
    return result;
  }
  if (code.size() == 0) {
    result.decision = options.strict ? LtcDecision::no : LtcDecision::yes;
    if (!options.strict) {
      Eigen::VectorXd B = Eigen::VectorXd::Constant(code.dim(), -0.5);
      result.witness = ZonosetParams(Eigen::MatrixXd::Zero(m, code.dim()), B);
    }
    return result;
  }

  ColumnSearch search(code, m, options);
  result.decision = search.run();
  result.nodes = search.nodes();
  if (result.decision == LtcDecision::yes) {
    const auto& table = table_for(m);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, code.dim());
    Eigen::VectorXd B(code.dim());
    for (int j = 0; j < code.dim(); ++j) {
      const std::size_t f = search.choice()[j];
      for (int i = 0; i < m; ++i) W(i, j) = table.weights[f][i];
      B[j] = table.bias[f];
    }
    result.witness = ZonosetParams(std::move(W), std::move(B));
  }
  return result;
}

}  // namespace zk
