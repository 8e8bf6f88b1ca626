#include "zk/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "zk/errors.hpp"

namespace zk {

namespace {

struct Mover {
  StateIndex source;
  int bit;
  StateIndex destination() const { return source ^ (StateIndex{1} << bit); }
};

// Distinct (source, bit) moves at step t, in first-seen order.
std::vector<Mover> movers_at(const PathFamily& family, int t) {
  std::vector<Mover> out;
  for (const auto& p : family.paths()) {
    const int b = p.transitions()[t];
    if (b == kNoChange) continue;
    const StateIndex x = p.states()[t];
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Mover& m) { return m.source == x && m.bit == b; });
    if (!dup) out.push_back({x, b});
  }
  return out;
}

std::string state_text(int n, StateIndex x) { return BitState(n, x).str(); }

}  // namespace

FamilyCheck sharing_compatible(const PathFamily& family) {
  const int n = family.dim();
  for (int t = 0; t + 1 < family.length(); ++t) {
    const auto movers = movers_at(family, t);
    std::set<StateIndex> sources;
    for (const auto& m : movers) {
      if (!sources.insert(m.source).second) {
        return {false, "step " + std::to_string(t) + ": two paths leave " + state_text(n, m.source) +
                           " along different bits"};
      }
    }
    std::map<int, std::vector<StateIndex>> by_bit;
    for (const auto& m : movers) {
      if (sources.count(m.destination())) {
        return {false, "step " + std::to_string(t) + ": a path moves into " + state_text(n, m.destination()) +
                           " while another path leaves it"};
      }
      by_bit[m.bit].push_back(m.source);
    }
    for (const auto& [bit, xs] : by_bit) {
      if (xs.size() > 2 || (xs.size() == 2 && hamming(xs[0], xs[1]) != 1)) {
        return {false, "step " + std::to_string(t) + ": paths flipping bit " + std::to_string(bit) +
                           " are not on a common edge"};
      }
    }
  }
  return {};
}

std::vector<Dist> backward_masses(const PathFamily& family, const Dist& target) {
  if (target.dim() != family.dim()) throw DimensionError("backward_masses: target dimension mismatch");
  const auto visited = family.visited_states();
  for (StateIndex x : target.support()) {
    if (!std::binary_search(visited.begin(), visited.end(), x)) {
      throw std::invalid_argument("backward_masses: target puts mass on " + state_text(family.dim(), x) +
                                  ", which no path visits");
    }
  }
  std::vector<Dist> out(static_cast<std::size_t>(family.length()), target);
  for (int t = family.length() - 2; t >= 0; --t) {
    const Dist& after = out[t + 1];
    std::vector<double> before = after.probs();
    std::set<StateIndex> claimed;
    for (const auto& m : movers_at(family, t)) {
      const StateIndex y = m.destination();
      if (!claimed.insert(y).second) continue;
      before[m.source] += after[y];
      before[y] = 0.0;
    }
    out[t] = Dist(family.dim(), std::move(before));
  }
  return out;
}

DbnParams layers_from_path_family(const PathFamily& family, const Dist& target, double omega) {
  const int n = family.dim();
  if (auto check = is_valid_path_family(family, false); !check) {
    throw std::invalid_argument("layers_from_path_family: " + check.diagnostic);
  }
  if (auto check = sharing_compatible(family); !check) {
    throw std::invalid_argument("layers_from_path_family: " + check.diagnostic);
  }
  const auto masses = backward_masses(family, target);
  const int L = family.length();
  const RbmParams top = rbm_for_sparse_support(masses.front(), n, omega);

  DbnParams dbn = DbnParams::zeros(std::vector<int>(static_cast<std::size_t>(L) + 1, n));
  dbn.weights[L - 1] = top.W;
  dbn.biases[L - 1] = top.B;
  dbn.biases[L] = top.C;

  for (int t = 0; t + 1 < L; ++t) {
    const Dist& before = masses[t];
    const Dist& after = masses[t + 1];
    std::set<StateIndex> claimed;
    std::map<int, std::vector<std::pair<StateIndex, double>>> by_bit;  // bit -> (source, P(v_bit = 1))
    for (const auto& m : movers_at(family, t)) {
      const StateIndex y = m.destination();
      double moved = 0.0;
      if (claimed.insert(y).second && before[m.source] > 0.0) {
        moved = std::clamp(after[y] / before[m.source], 0.0, 1.0);
      }
      const bool source_on = (m.source >> m.bit) & 1u;
      by_bit[m.bit].push_back({m.source, source_on ? 1.0 - moved : moved});
    }
    EdgeSharingSpec spec;
    spec.omega = omega;
    for (const auto& [bit, xs] : by_bit) {
      EdgeShare e;
      e.unit = bit;
      e.anchor = xs[0].first;
      e.p_anchor = xs[0].second;
      if (xs.size() == 2) {
        e.edge_bit = __builtin_ctz(xs[0].first ^ xs[1].first);
        e.p_partner = xs[1].second;
      }
      spec.entries.push_back(e);
    }
    const ZonosetParams layer = construct_edge_sharing_layer(spec, n);
    const int k = L - 1 - t;  // kernel from h^k down to h^(k-1)
    dbn.weights[k - 1] = layer.W;
    dbn.biases[k - 1] = layer.B;
  }
  return dbn;
}

std::optional<int> face_cover_order(int dimension) {
  for (int k = 0; k < 5; ++k) {
    const int d = (1 << k) + k + 1;
    if (d == dimension) return k;
    if (d > dimension) break;
  }
  return std::nullopt;
}

namespace {

// Local paths on a face, as bit patterns over its free coordinates (bit j of a
// pattern is free coordinate j). Pair p shares address bits 1..k and
// splits on address bit 0; its Gray walk is rotated by p.
std::vector<std::vector<StateIndex>> local_face_paths(int k) {
  const int gray = 1 << k;
  const int steps = 1 << gray;
  std::vector<std::vector<StateIndex>> out;
  for (int pair = 0; pair < gray; ++pair) {
    for (int a0 = 0; a0 < 2; ++a0) {
      std::vector<StateIndex> states;
      for (int t = 0; t < steps; ++t) {
        const StateIndex g = static_cast<StateIndex>(t ^ (t >> 1));
        StateIndex x = static_cast<StateIndex>(a0) | (static_cast<StateIndex>(pair) << 1);
        for (int b = 0; b < gray; ++b) {
          if ((g >> b) & 1u) x |= StateIndex{1} << (k + 1 + (b + pair) % gray);
        }
        states.push_back(x);
      }
      out.push_back(std::move(states));
    }
  }
  return out;
}

StateIndex embed(const CubeFace& face, const std::vector<int>& free, StateIndex local) {
  StateIndex x = face.fixed_values();
  for (std::size_t j = 0; j < free.size(); ++j)
    if ((local >> j) & 1u) x |= StateIndex{1} << free[j];
  return x;
}

}  // namespace

PathFamily face_cover_family(const std::vector<CubeFace>& faces, std::optional<int> length) {
  if (faces.empty()) throw std::invalid_argument("face_cover_family: no faces");
  const int n = faces.front().ambient_dim();
  StateIndex used = 0;
  std::vector<int> orders;
  int natural = 1;
  for (const auto& f : faces) {
    if (f.ambient_dim() != n) throw DimensionError("face_cover_family: faces live in different cubes");
    const StateIndex free_mask = ~f.fixed_mask() & static_cast<StateIndex>(state_count(n) - 1);
    if (free_mask & used) throw std::invalid_argument("face_cover_family: faces share a free coordinate");
    used |= free_mask;
    const auto k = face_cover_order(f.dimension());
    if (!k) {
      throw std::invalid_argument("face_cover_family: face dimension " + std::to_string(f.dimension()) +
                                  " is not of the form 2^k + k + 1");
    }
    orders.push_back(*k);
    natural = std::max(natural, 1 << (1 << *k));
  }
  const int total = length.value_or(natural);
  if (total < natural) {
    throw std::invalid_argument("face_cover_family: length " + std::to_string(total) + " is shorter than the " +
                                std::to_string(natural) + " states the cover needs");
  }

  // Faces meet in at most one state; an offset on each face's free
  // coordinates moves its schedule so that the meetings cause no conflict.
  std::vector<Path> accepted;
  std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
    if (i == faces.size()) return true;
    const auto free = faces[i].free_coords();
    const auto local = local_face_paths(orders[i]);
    for (StateIndex offset = 0; offset < (StateIndex{1} << free.size()); ++offset) {
      const std::size_t mark = accepted.size();
      for (const auto& lp : local) {
        std::vector<StateIndex> states;
        for (StateIndex s : lp) states.push_back(embed(faces[i], free, s ^ offset));
        states.resize(static_cast<std::size_t>(total), states.back());
        accepted.emplace_back(n, std::move(states));
      }
      const PathFamily fam(n, accepted);
      if (is_valid_path_family(fam, false) && sharing_compatible(fam) && place(i + 1)) return true;
      accepted.erase(accepted.begin() + static_cast<std::ptrdiff_t>(mark), accepted.end());
    }
    return false;
  };
  if (!place(0)) throw std::runtime_error("face_cover_family: no conflict-free schedule found");
  return PathFamily(n, std::move(accepted));
}

std::optional<DepthK> depth_to_K(int l) {
  if (l < 3) return std::nullopt;
  int k = 0;
  // 2^(2^(k+1)) fits comfortably for the k reachable from an int l.
  while (k < 4 && static_cast<long long>(l) - 1 >= (1LL << (1 << (k + 1)))) ++k;
  return DepthK{k, (1 << k) + k + 1};
}

long long min_layers_universal(int n) {
  if (n < 2) throw std::invalid_argument("min_layers_universal: n must be at least 2");
  const double value = std::ldexp(1.0, n) / (2.0 * (n - std::log2(static_cast<double>(n))));
  return static_cast<long long>(std::ceil(value - 1e-9));
}

double min_layers_universal_alt(int n) {
  if (n < 2) throw std::invalid_argument("min_layers_universal_alt: n must be at least 2");
  return std::ldexp(1.0, n - 1) * (n - std::log2(static_cast<double>(n)));
}

DbnParams realize_partition_model(int n, int l, const std::vector<int>& lambda, const std::vector<int>& Lambda,
                                  const std::vector<double>& block_weights, double omega) {
  const int K = static_cast<int>(lambda.size());
  if (static_cast<int>(Lambda.size()) != K) throw DimensionError("realize_partition_model: |lambda| != |Lambda|");
  if (block_weights.size() != state_count(K)) throw DimensionError("realize_partition_model: need 2^K block weights");
  if (l < 2) throw std::invalid_argument("realize_partition_model: need at least two hidden layers");
  const ZonosetParams bottom = construct_partition_rows(n, n, lambda, Lambda, omega);

  // Hidden target: block c sits at the state whose Lambda coordinates spell c.
  std::vector<double> mu(state_count(n), 0.0);
  std::vector<StateIndex> starts;
  for (std::size_t c = 0; c < block_weights.size(); ++c) {
    StateIndex h = 0;
    for (int j = 0; j < K; ++j)
      if ((c >> j) & 1u) h |= StateIndex{1} << Lambda[j];
    mu[h] = block_weights[c];
    starts.push_back(h);
  }
  const Dist target(n, std::move(mu));
  const int steps = l - 1;

  PathFamily family = [&] {
    if (K <= 1) {
      std::vector<Path> paths;
      for (StateIndex s : starts) paths.emplace_back(n, std::vector<StateIndex>(steps, s));
      return PathFamily(n, std::move(paths));
    }
    for (int k = 0; k < 5; ++k) {
      const int d = (1 << k) + k + 1;
      if (d < K) continue;
      if (d > n || (1LL << (1 << k)) > steps) break;
      std::vector<int> free = Lambda;
      for (int c = 0; c < n && static_cast<int>(free.size()) < d; ++c) {
        if (std::find(free.begin(), free.end(), c) == free.end()) free.push_back(c);
      }
      std::vector<int> fixed;
      for (int c = 0; c < n; ++c)
        if (std::find(free.begin(), free.end(), c) == free.end()) fixed.push_back(c);
      const CubeFace face(n, fixed, std::vector<int>(fixed.size(), 0));
      return face_cover_family({face}, steps);
    }
    throw std::invalid_argument("realize_partition_model: " + std::to_string(l) +
                                " hidden layers cannot spread mass over a " + std::to_string(K) + "-face");
  }();

  const DbnParams upper = layers_from_path_family(family, target, omega);
  DbnParams out = DbnParams::zeros(std::vector<int>(static_cast<std::size_t>(l) + 1, n));
  out.weights[0] = bottom.W;
  out.biases[0] = bottom.B;
  for (int k = 1; k <= upper.depth(); ++k) out.weights[k] = upper.weights[k - 1];
  for (int k = 0; k <= upper.depth(); ++k) out.biases[k + 1] = upper.biases[k];
  return out;
}

}  // namespace zk
