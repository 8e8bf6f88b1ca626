#include "zk/hypercube.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "zk/errors.hpp"

namespace zk {

namespace {

void check_dim(int n) {
  if (n < 0) throw std::invalid_argument("dimension must be non-negative");
  require_units(n, "state space");
}

void check_coord(int n, int coord) {
  if (coord < 0 || coord >= n) {
    throw std::out_of_range("coordinate " + std::to_string(coord) + " outside [0, " +
                            std::to_string(n) + ")");
  }
}

}  // namespace

BitState::BitState(int n, StateIndex index) : n_(n), index_(index) {
  if (n < 0 || n > 31) throw std::invalid_argument("BitState: unsupported dimension");
  if (n < 32 && (static_cast<std::uint64_t>(index) >> n) != 0) {
    throw std::out_of_range("BitState: index " + std::to_string(index) + " out of range for n=" +
                            std::to_string(n));
  }
}

BitState BitState::from_bits(std::span<const int> bits) {
  StateIndex idx = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw std::invalid_argument("BitState: bits must be 0/1");
    idx |= static_cast<StateIndex>(bits[i]) << i;
  }
  return BitState(static_cast<int>(bits.size()), idx);
}

BitState BitState::parse(std::string_view text) {
  const int n = static_cast<int>(text.size());
  StateIndex idx = 0;
  for (int k = 0; k < n; ++k) {
    const char c = text[k];
    if (c != '0' && c != '1') throw std::invalid_argument("BitState: malformed state text");
    if (c == '1') idx |= StateIndex{1} << (n - 1 - k);
  }
  return BitState(n, idx);
}

bool BitState::bit(int coord) const {
  check_coord(n_, coord);
  return (index_ >> coord) & 1u;
}

std::vector<int> BitState::bits() const {
  std::vector<int> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = (index_ >> i) & 1u;
  return out;
}

BitState BitState::flipped(int coord) const {
  check_coord(n_, coord);
  return BitState(n_, index_ ^ (StateIndex{1} << coord));
}

std::string BitState::str() const {
  std::string s(n_, '0');
  for (int i = 0; i < n_; ++i) {
    if ((index_ >> i) & 1u) s[n_ - 1 - i] = '1';
  }
  return s;
}

std::size_t state_count(int n) {
  check_dim(n);
  return std::size_t{1} << n;
}

std::vector<BitState> enumerate_states(int n) {
  const std::size_t count = state_count(n);
  std::vector<BitState> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(n, static_cast<StateIndex>(i));
  return out;
}

int hamming(const BitState& x, const BitState& y) {
  if (x.dim() != y.dim()) {
    throw DimensionError("hamming: dimensions " + std::to_string(x.dim()) + " and " +
                         std::to_string(y.dim()) + " differ");
  }
  return hamming(x.index(), y.index());
}

CubeFace::CubeFace(int n, std::vector<int> fixed_coords, std::vector<int> fixed_values)
    : n_(n), mask_(0), values_(0) {
  check_dim(n);
  if (fixed_coords.size() != fixed_values.size()) {
    throw std::invalid_argument("CubeFace: coordinate/value count mismatch");
  }
  for (std::size_t k = 0; k < fixed_coords.size(); ++k) {
    const int c = fixed_coords[k];
    check_coord(n, c);
    const StateIndex bit = StateIndex{1} << c;
    if (mask_ & bit) throw std::invalid_argument("CubeFace: coordinate fixed twice");
    if (fixed_values[k] != 0 && fixed_values[k] != 1) {
      throw std::invalid_argument("CubeFace: fixed values must be 0/1");
    }
    mask_ |= bit;
    if (fixed_values[k]) values_ |= bit;
  }
}

CubeFace CubeFace::whole(int n) { return CubeFace(n, {}, {}); }

CubeFace CubeFace::from_masks(int n, StateIndex fixed_mask, StateIndex values) {
  std::vector<int> coords;
  std::vector<int> vals;
  for (int i = 0; i < 32; ++i) {
    if ((fixed_mask >> i) & 1u) {
      coords.push_back(i);
      vals.push_back((values >> i) & 1u);
    }
  }
  if ((values & ~fixed_mask) != 0) throw std::invalid_argument("CubeFace: value bit outside mask");
  return CubeFace(n, std::move(coords), std::move(vals));
}

int CubeFace::dimension() const noexcept { return n_ - __builtin_popcount(mask_); }

std::vector<int> CubeFace::fixed_coords() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if ((mask_ >> i) & 1u) out.push_back(i);
  return out;
}

std::vector<int> CubeFace::free_coords() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (!((mask_ >> i) & 1u)) out.push_back(i);
  return out;
}

std::vector<StateIndex> CubeFace::member_indices() const {
  const auto free = free_coords();
  std::vector<StateIndex> out;
  out.reserve(std::size_t{1} << free.size());
  for (StateIndex k = 0; k < (StateIndex{1} << free.size()); ++k) {
    StateIndex x = values_;
    for (std::size_t j = 0; j < free.size(); ++j) {
      if ((k >> j) & 1u) x |= StateIndex{1} << free[j];
    }
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BitState> face_members(const CubeFace& face) {
  std::vector<BitState> out;
  for (StateIndex x : face.member_indices()) out.emplace_back(face.ambient_dim(), x);
  return out;
}

std::vector<CubeFace> all_faces(int n) {
  check_dim(n);
  std::vector<CubeFace> out;
  const StateIndex full = (StateIndex{1} << n) - 1;
  for (StateIndex mask = 0; mask <= full; ++mask) {
    // Enumerate submasks of `mask` in increasing order.
    std::vector<StateIndex> subs;
    for (StateIndex v = mask;; v = (v - 1) & mask) {
      subs.push_back(v);
      if (v == 0) break;
    }
    std::sort(subs.begin(), subs.end());
    for (StateIndex v : subs) out.push_back(CubeFace::from_masks(n, mask, v));
  }
  return out;
}

Path::Path(int n, std::vector<StateIndex> states) : n_(n), states_(std::move(states)) {
  check_dim(n);
  if (states_.empty()) throw std::invalid_argument("Path: empty");
  const StateIndex limit = StateIndex{1} << n;
  for (StateIndex s : states_) {
    if (s >= limit) throw std::out_of_range("Path: state out of range");
  }
  transitions_.reserve(states_.size() - 1);
  for (std::size_t t = 0; t + 1 < states_.size(); ++t) {
    const StateIndex diff = states_[t] ^ states_[t + 1];
    if (diff == 0) {
      transitions_.push_back(kNoChange);
    } else if ((diff & (diff - 1)) == 0) {
      transitions_.push_back(__builtin_ctz(diff));
    } else {
      throw std::invalid_argument("Path: states " + std::to_string(t) + " and " +
                                  std::to_string(t + 1) + " differ in more than one bit");
    }
  }
}

PathFamily::PathFamily(int n, std::vector<Path> paths) : n_(n), length_(0), paths_(std::move(paths)) {
  check_dim(n);
  if (paths_.empty()) throw std::invalid_argument("PathFamily: no paths");
  length_ = paths_.front().length();
  for (const auto& p : paths_) {
    if (p.dim() != n) throw DimensionError("PathFamily: path dimension mismatch");
    if (p.length() != length_) throw std::invalid_argument("PathFamily: paths differ in length");
  }
}

std::vector<StateIndex> PathFamily::starting_states() const {
  std::vector<StateIndex> out;
  for (const auto& p : paths_) out.push_back(p.states().front());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<StateIndex> PathFamily::visited_states() const {
  std::set<StateIndex> seen;
  for (const auto& p : paths_) seen.insert(p.states().begin(), p.states().end());
  return {seen.begin(), seen.end()};
}

Path reflected_gray_code(int n) {
  if (n < 0) throw std::invalid_argument("reflected_gray_code: n must be >= 0");
  const std::size_t count = state_count(n);
  std::vector<StateIndex> states(count);
  for (std::size_t t = 0; t < count; ++t) {
    states[t] = static_cast<StateIndex>(t ^ (t >> 1));
  }
  return Path(n, std::move(states));
}

FamilyCheck is_valid_path_family(const PathFamily& family, bool base_support_check) {
  const auto& paths = family.paths();
  for (int t = 0; t + 1 < family.length(); ++t) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const int ti = paths[i].transitions()[t];
      if (ti == kNoChange) continue;
      for (std::size_t j = i + 1; j < paths.size(); ++j) {
        if (paths[j].transitions()[t] != ti) continue;
        const StateIndex a = paths[i].states()[t];
        const StateIndex b = paths[j].states()[t];
        if (hamming(a, b) != 1) {
          return {false, "step " + std::to_string(t) + ": paths " + std::to_string(i) + " and " +
                             std::to_string(j) + " both flip bit " + std::to_string(ti) +
                             " at states " + BitState(family.dim(), a).str() + " and " +
                             BitState(family.dim(), b).str() + " (distance " +
                             std::to_string(hamming(a, b)) + ")"};
        }
      }
    }
  }
  if (base_support_check) {
    const auto starts = family.starting_states();
    const auto cover = min_edge_cover(family.dim(), starts);
    if (static_cast<int>(cover.size()) > family.dim() + 1) {
      return {false, "starting states need " + std::to_string(cover.size()) +
                         " edges, more than n+1 = " + std::to_string(family.dim() + 1)};
    }
  }
  return {};
}

std::vector<SupportComponent> min_edge_cover(int n, std::span<const StateIndex> states) {
  check_dim(n);
  std::vector<StateIndex> pts(states.begin(), states.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  // The cube is bipartite by parity: augment from even-weight states.
  std::map<StateIndex, StateIndex> match;  // state -> partner
  const std::set<StateIndex> present(pts.begin(), pts.end());
  std::function<bool(StateIndex, std::set<StateIndex>&)> augment =
      [&](StateIndex u, std::set<StateIndex>& seen) -> bool {
    for (int b = 0; b < n; ++b) {
      const StateIndex v = u ^ (StateIndex{1} << b);
      if (!present.count(v) || seen.count(v)) continue;
      seen.insert(v);
      auto it = match.find(v);
      if (it == match.end() || augment(it->second, seen)) {
        match[v] = u;
        match[u] = v;
        return true;
      }
    }
    return false;
  };
  for (StateIndex u : pts) {
    if (__builtin_popcount(u) % 2 != 0 || match.count(u)) continue;
    std::set<StateIndex> seen;
    augment(u, seen);
  }

  std::vector<SupportComponent> out;
  for (StateIndex u : pts) {
    auto it = match.find(u);
    if (it == match.end()) {
      out.push_back({u, std::nullopt});
    } else if (u < it->second) {
      out.push_back({u, __builtin_ctz(u ^ it->second)});
    }
  }
  return out;
}

}  // namespace zk
