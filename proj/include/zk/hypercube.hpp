#pragma once

// Binary state space {0,1}^n.
//
// Coordinate i (0-based in this API) of a state is bit i of its integer
// index, so index order is the lexicographic order of the strings
// h_{n-1} ... h_1 h_0. Every vector and matrix in the library is laid out
// in this order.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zk {

using StateIndex = std::uint32_t;

/// Transition marker for a path step that stays put.
inline constexpr int kNoChange = -1;

class BitState {
 public:
  BitState(int n, StateIndex index);

  /// bits[i] is coordinate i; entries must be 0 or 1.
  static BitState from_bits(std::span<const int> bits);
  /// Parses text written most significant coordinate first ("011" -> index 3).
  static BitState parse(std::string_view text);

  int dim() const noexcept { return n_; }
  StateIndex index() const noexcept { return index_; }
  bool bit(int coord) const;
  std::vector<int> bits() const;
  BitState flipped(int coord) const;
  std::string str() const;

  friend bool operator==(const BitState&, const BitState&) = default;
  friend auto operator<=>(const BitState&, const BitState&) = default;

 private:
  int n_;
  StateIndex index_;
};

/// 2^n after checking the enumeration cap.
std::size_t state_count(int n);

std::vector<BitState> enumerate_states(int n);

int hamming(const BitState& x, const BitState& y);

inline int hamming(StateIndex x, StateIndex y) noexcept {
  return __builtin_popcount(x ^ y);
}

/// Cylinder set {h : h_I = h*_I}.
class CubeFace {
 public:
  CubeFace(int n, std::vector<int> fixed_coords, std::vector<int> fixed_values);
  static CubeFace whole(int n);
  /// Face given by bit masks: coordinates in `fixed_mask` take the bits of `values`.
  static CubeFace from_masks(int n, StateIndex fixed_mask, StateIndex values);

  int ambient_dim() const noexcept { return n_; }
  int dimension() const noexcept;
  StateIndex fixed_mask() const noexcept { return mask_; }
  StateIndex fixed_values() const noexcept { return values_; }
  std::vector<int> fixed_coords() const;
  std::vector<int> free_coords() const;
  bool contains(StateIndex x) const noexcept { return (x & mask_) == values_; }
  std::vector<StateIndex> member_indices() const;

  friend bool operator==(const CubeFace&, const CubeFace&) = default;

 private:
  int n_;
  StateIndex mask_;
  StateIndex values_;
};

std::vector<BitState> face_members(const CubeFace& face);

/// All 3^n faces of the n-cube, ordered by fixed mask then fixed values.
std::vector<CubeFace> all_faces(int n);

/// A walk on the cube graph; consecutive states differ in at most one bit.
class Path {
 public:
  Path(int n, std::vector<StateIndex> states);

  int dim() const noexcept { return n_; }
  int length() const noexcept { return static_cast<int>(states_.size()); }
  const std::vector<StateIndex>& states() const noexcept { return states_; }
  /// transitions()[t] is the bit flipped between states t and t+1, or kNoChange.
  const std::vector<int>& transitions() const noexcept { return transitions_; }

  friend bool operator==(const Path&, const Path&) = default;

 private:
  int n_;
  std::vector<StateIndex> states_;
  std::vector<int> transitions_;
};

class PathFamily {
 public:
  PathFamily(int n, std::vector<Path> paths);

  int dim() const noexcept { return n_; }
  int length() const noexcept { return length_; }
  const std::vector<Path>& paths() const noexcept { return paths_; }
  std::vector<StateIndex> starting_states() const;
  /// Sorted union of every state visited by some path.
  std::vector<StateIndex> visited_states() const;

 private:
  int n_;
  int length_;
  std::vector<Path> paths_;
};

/// Reflected Gray code: state t is t ^ (t >> 1), so bit 0 flips first.
Path reflected_gray_code(int n);

struct FamilyCheck {
  bool valid = true;
  std::string diagnostic;
  explicit operator bool() const noexcept { return valid; }
};

/// Checks that two paths flip the same bit at the same step only while their
/// current states are Hamming neighbours. With `base_support_check`, also
/// requires the starting states to be covered by at most n+1 cube edges.
FamilyCheck is_valid_path_family(const PathFamily& family, bool base_support_check);

/// A single state, or the edge {anchor, anchor ^ (1 << edge_bit)}.
struct SupportComponent {
  StateIndex anchor;
  std::optional<int> edge_bit;
  friend bool operator==(const SupportComponent&, const SupportComponent&) = default;
};

/// Minimum cover of `states` by disjoint edges and single states. Edges are
/// taken from a maximum matching of the induced subgraph of the cube.
std::vector<SupportComponent> min_edge_cover(int n, std::span<const StateIndex> states);

}  // namespace zk
