// Copyright 2026 The Phonlat Authors
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
//
// Pure operations on weighted transducers: composition, connection,
// arc sorting, and n-shortest-paths.  Inputs are never mutated.

#ifndef PHONLAT_FST_OPS_HPP_
#define PHONLAT_FST_OPS_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

#include "phonlat/fst.hpp"

namespace phonlat {

enum class SortBy { kIlabel, kOlabel };

// Composition with the three-state epsilon-sequencing filter.  The filter
// admits exactly one interleaving of any epsilon run shared between the two
// machines, so path weights are never double counted (which would corrupt
// log-semiring sums).  Filter states: 0 = free, 1 = committed to left-side
// epsilon moves, 2 = committed to right-side epsilon moves.  A synchronized
// epsilon move or a label match resets the filter to 0.
//
// Requires a.osymbols == b.isymbols; the result reads a's input symbols and
// writes b's output symbols.  Only accessible pair states are built.
inline Wfst compose(const Wfst& a, const Wfst& b) {
  if (a.ring() != b.ring()) {
    throw Error("compose: semiring mismatch: " + semiring_name(a.ring()) +
                " vs " + semiring_name(b.ring()));
  }
  if (a.osymbols != b.isymbols) {
    throw Error(
        "compose: left output symbol table does not match right input "
        "symbol table");
  }
  Wfst out(a.ring());
  out.isymbols = a.isymbols;
  out.osymbols = b.osymbols;
  if (a.start() == kNoState || b.start() == kNoState) return out;

  using Key = std::array<StateId, 3>;  // (left state, right state, filter)
  std::map<Key, StateId> ids;
  std::deque<Key> queue;

  auto state_of = [&](StateId sa, StateId sb, StateId f) {
    Key k{sa, sb, f};
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    StateId q = out.add_state();
    ids.emplace(k, q);
    queue.push_back(k);
    return q;
  };

  out.set_start(state_of(a.start(), b.start(), 0));
  while (!queue.empty()) {
    Key k = queue.front();
    queue.pop_front();
    auto [sa, sb, f] = k;
    StateId q = ids[k];

    for (const Arc& x : a.arcs(sa)) {
      if (x.olabel != kEpsilonLabel) {
        for (const Arc& y : b.arcs(sb)) {
          if (y.ilabel != x.olabel) continue;
          Arc arc;
          arc.ilabel = x.ilabel;
          arc.olabel = y.olabel;
          arc.weight = semiring_times(x.weight, y.weight);
          arc.next_state = state_of(x.next_state, y.next_state, 0);
          out.add_arc(q, arc);
        }
      } else {
        if (f == 0) {
          for (const Arc& y : b.arcs(sb)) {
            if (y.ilabel != kEpsilonLabel) continue;
            Arc arc;
            arc.ilabel = x.ilabel;
            arc.olabel = y.olabel;
            arc.weight = semiring_times(x.weight, y.weight);
            arc.next_state = state_of(x.next_state, y.next_state, 0);
            out.add_arc(q, arc);
          }
        }
        if (f != 2) {
          Arc arc;
          arc.ilabel = x.ilabel;
          arc.olabel = kEpsilonLabel;
          arc.weight = x.weight;
          arc.next_state = state_of(x.next_state, sb, 1);
          out.add_arc(q, arc);
        }
      }
    }
    if (f != 1) {
      for (const Arc& y : b.arcs(sb)) {
        if (y.ilabel != kEpsilonLabel) continue;
        Arc arc;
        arc.ilabel = kEpsilonLabel;
        arc.olabel = y.olabel;
        arc.weight = y.weight;
        arc.next_state = state_of(sa, y.next_state, 2);
        out.add_arc(q, arc);
      }
    }
    if (a.is_final(sa) && b.is_final(sb)) {
      out.set_final(q,
                    semiring_times(a.final_weight(sa), b.final_weight(sb)));
    }
  }
  return out;
}

// Keeps exactly the states that lie on some start-to-final path; state order
// is preserved.  The weighted relation is unchanged.
inline Wfst connect(const Wfst& f) {
  Wfst out(f.ring());
  out.isymbols = f.isymbols;
  out.osymbols = f.osymbols;
  if (f.start() == kNoState) return out;

  StateId n = f.num_states();
  std::vector<bool> forward(n, false);
  std::deque<StateId> queue{f.start()};
  forward[f.start()] = true;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const Arc& a : f.arcs(s)) {
      if (!forward[a.next_state]) {
        forward[a.next_state] = true;
        queue.push_back(a.next_state);
      }
    }
  }

  std::vector<std::vector<StateId>> reverse(n);
  for (StateId s = 0; s < n; ++s) {
    for (const Arc& a : f.arcs(s)) reverse[a.next_state].push_back(s);
  }
  std::vector<bool> backward(n, false);
  for (StateId s = 0; s < n; ++s) {
    if (f.is_final(s)) {
      backward[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (StateId p : reverse[s]) {
      if (!backward[p]) {
        backward[p] = true;
        queue.push_back(p);
      }
    }
  }

  std::vector<StateId> remap(n, kNoState);
  for (StateId s = 0; s < n; ++s) {
    if (forward[s] && backward[s]) remap[s] = out.add_state();
  }
  // If the start state is cut off, nothing survives: every kept state would
  // witness a start-to-final path, making start coaccessible.
  if (remap[f.start()] == kNoState) return out;
  out.set_start(remap[f.start()]);
  for (StateId s = 0; s < n; ++s) {
    if (remap[s] == kNoState) continue;
    for (const Arc& a : f.arcs(s)) {
      if (remap[a.next_state] == kNoState) continue;
      Arc arc = a;
      arc.next_state = remap[a.next_state];
      out.add_arc(remap[s], arc);
    }
    if (f.is_final(s)) out.set_final(remap[s], f.final_weight(s));
  }
  return out;
}

// Sorts every state's arcs by the chosen label; remaining fields break ties
// so the result is a fixed point of re-sorting.
inline Wfst arcsort(const Wfst& f, SortBy by) {
  Wfst out(f.ring());
  out.isymbols = f.isymbols;
  out.osymbols = f.osymbols;
  for (StateId s = 0; s < f.num_states(); ++s) out.add_state();
  if (f.start() != kNoState) out.set_start(f.start());
  auto key = [by](const Arc& a) {
    return by == SortBy::kIlabel
               ? std::make_tuple(a.ilabel, a.olabel, a.weight.value,
                                 a.next_state)
               : std::make_tuple(a.olabel, a.ilabel, a.weight.value,
                                 a.next_state);
  };
  for (StateId s = 0; s < f.num_states(); ++s) {
    std::vector<Arc> arcs = f.arcs(s);
    std::stable_sort(
        arcs.begin(), arcs.end(),
        [&](const Arc& x, const Arc& y) { return key(x) < key(y); });
    for (const Arc& a : arcs) out.add_arc(s, a);
    if (f.is_final(s)) out.set_final(s, f.final_weight(s));
  }
  return out;
}

inline bool is_acyclic(const Wfst& f) {
  StateId n = f.num_states();
  std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<std::pair<StateId, std::size_t>> stack;
  for (StateId root = 0; root < n; ++root) {
    if (color[root] != 0) continue;
    stack.emplace_back(root, 0);
    color[root] = 1;
    while (!stack.empty()) {
      auto& [s, i] = stack.back();
      if (i < f.arcs(s).size()) {
        StateId t = f.arcs(s)[i++].next_state;
        if (color[t] == 1) return false;
        if (color[t] == 0) {
          color[t] = 1;
          stack.emplace_back(t, 0);
        }
      } else {
        color[s] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

namespace detail {

// Exact cost from each state to termination (cheapest suffix path including
// the final weight), used as the A* heuristic.  +inf for states that cannot
// reach a final state.
inline std::vector<double> distance_to_final(const Wfst& f, bool acyclic) {
  StateId n = f.num_states();
  std::vector<double> h(n, kInfinity);
  if (acyclic) {
    // Reverse-topological relaxation via iterative DFS finish order.
    std::vector<StateId> order;
    order.reserve(n);
    std::vector<int> color(n, 0);
    std::vector<std::pair<StateId, std::size_t>> stack;
    for (StateId root = 0; root < n; ++root) {
      if (color[root] != 0) continue;
      stack.emplace_back(root, 0);
      color[root] = 1;
      while (!stack.empty()) {
        auto& [s, i] = stack.back();
        if (i < f.arcs(s).size()) {
          StateId t = f.arcs(s)[i++].next_state;
          if (color[t] == 0) {
            color[t] = 1;
            stack.emplace_back(t, 0);
          }
        } else {
          color[s] = 2;
          order.push_back(s);
          stack.pop_back();
        }
      }
    }
    for (StateId s : order) {  // finish order: successors first
      double best = f.is_final(s) ? f.final_weight(s).value : kInfinity;
      for (const Arc& a : f.arcs(s)) {
        best = std::min(best, a.weight.value + h[a.next_state]);
      }
      h[s] = best;
    }
  } else {
    // Dijkstra on the reverse graph; valid because all arc weights are
    // nonnegative in the cyclic case.
    struct Rev {
      StateId src;
      double w;
    };
    std::vector<std::vector<Rev>> reverse(n);
    for (StateId s = 0; s < n; ++s) {
      for (const Arc& a : f.arcs(s)) {
        reverse[a.next_state].push_back({s, a.weight.value});
      }
    }
    using Item = std::pair<double, StateId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (StateId s = 0; s < n; ++s) {
      if (f.is_final(s)) {
        double w = f.final_weight(s).value;
        if (w < h[s]) {
          h[s] = w;
          pq.emplace(w, s);
        }
      }
    }
    while (!pq.empty()) {
      auto [d, s] = pq.top();
      pq.pop();
      if (d > h[s]) continue;
      for (const Rev& r : reverse[s]) {
        double nd = d + r.w;
        if (nd < h[r.src]) {
          h[r.src] = nd;
          pq.emplace(nd, r.src);
        }
      }
    }
  }
  return h;
}

}  // namespace detail

// N lowest-weight accepted paths, ascending by total weight; ties broken by
// lexicographic output string, then input string.  Tropical machines only.
// A cyclic machine must have all arc weights >= 0; acyclic machines may
// carry negative weights.
inline std::vector<Path> shortest_path(const Wfst& f, std::size_t n) {
  if (f.ring() != Semiring::kTropical) {
    throw Error("shortest_path requires the tropical semiring");
  }
  std::vector<Path> results;
  if (n == 0 || f.start() == kNoState) return results;

  bool acyclic = is_acyclic(f);
  if (!acyclic) {
    for (StateId s = 0; s < f.num_states(); ++s) {
      for (const Arc& a : f.arcs(s)) {
        if (a.weight.value < 0.0) {
          throw Error(
              "shortest_path: cyclic machine with a negative arc weight "
              "(possible negative-weight cycle)");
        }
      }
    }
  }
  std::vector<double> h = detail::distance_to_final(f, acyclic);
  if (!std::isfinite(h[f.start()])) return results;

  // A* over partial paths; priority = cost so far + exact remaining cost.
  // Because h is exact, nodes pop in true completed-cost order, so the
  // first n distinct completions (plus weight ties) are optimal.
  struct Node {
    double g;
    StateId state;
    std::int64_t parent;  // index into nodes, -1 at root
    const Arc* via;
  };
  std::vector<Node> nodes;
  using Entry = std::tuple<double, std::uint64_t>;  // (priority, node index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;

  nodes.push_back({0.0, f.start(), -1, nullptr});
  pq.emplace(h[f.start()], 0);

  std::vector<std::size_t> pops(f.num_states(), 0);
  const std::size_t pop_cap = n + 64;
  const std::size_t expansion_cap = 4u << 20;
  std::size_t expansions = 0;

  std::vector<std::pair<double, std::uint64_t>> done;  // (weight, node)
  double cutoff = kInfinity;

  while (!pq.empty() && expansions < expansion_cap) {
    auto [prio, idx] = pq.top();
    if (done.size() >= n && prio > cutoff) break;
    pq.pop();
    ++expansions;
    const Node node = nodes[idx];

    if (pops[node.state] >= pop_cap) continue;
    ++pops[node.state];

    if (f.is_final(node.state)) {
      double total = node.g + f.final_weight(node.state).value;
      if (std::isfinite(total)) {
        done.emplace_back(total, idx);
        if (done.size() == n) {
          cutoff = total;
        }
      }
    }
    for (const Arc& a : f.arcs(node.state)) {
      if (a.weight.is_zero()) continue;
      double g = node.g + a.weight.value;
      if (!std::isfinite(h[a.next_state])) continue;
      double prio_next = g + h[a.next_state];
      if (done.size() >= n && prio_next > cutoff) continue;
      nodes.push_back({g, a.next_state, static_cast<std::int64_t>(idx), &a});
      pq.emplace(prio_next, nodes.size() - 1);
    }
  }

  // Materialize, then order deterministically.
  for (auto& [total, idx] : done) {
    Path p;
    p.total_weight = Weight(total, Semiring::kTropical);
    std::vector<const Arc*> rev;
    for (std::int64_t i = static_cast<std::int64_t>(idx); i >= 0;
         i = nodes[i].parent) {
      if (nodes[i].via != nullptr) rev.push_back(nodes[i].via);
    }
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
      p.arcs.push_back(**it);
      if ((*it)->ilabel != kEpsilonLabel) p.istring.push_back((*it)->ilabel);
      if ((*it)->olabel != kEpsilonLabel) p.ostring.push_back((*it)->olabel);
    }
    results.push_back(std::move(p));
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const Path& x, const Path& y) {
                     if (x.total_weight.value != y.total_weight.value) {
                       return x.total_weight.value < y.total_weight.value;
                     }
                     if (x.ostring != y.ostring) return x.ostring < y.ostring;
                     return x.istring < y.istring;
                   });
  if (results.size() > n) results.resize(n);
  return results;
}

}  // namespace phonlat

#endif  // PHONLAT_FST_OPS_HPP_
