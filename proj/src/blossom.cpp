#include "pra/blossom.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <map>
#include <stdexcept>

#include "pra/core.hpp"

namespace pra {

namespace {

constexpr std::int64_t kNoDelta = std::numeric_limits<std::int64_t>::max();

// Primal-dual blossom matcher. Vertices are 0..n-1, blossom slots n..2n-1.
// Labels: 0 free, 1 S (outer), 2 T (inner); 5 marks a scan breadcrumb.
// Edge k has directed endpoints 2k and 2k+1; endpoint p sits at vertex
// end_[p], and p^1 is the opposite endpoint of the same edge.
class Matcher {
public:
  Matcher(int n, const std::vector<WeightedEdge>& edges, bool max_cardinality)
      : n_(n), edges_(edges), max_cardinality_(max_cardinality) {
    const int m = static_cast<int>(edges_.size());
    std::int64_t max_weight = 0;
    end_.resize(2 * m);
    neighb_.resize(n_);
    for (int k = 0; k < m; ++k) {
      const WeightedEdge& e = edges_[k];
      if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_ || e.u == e.v)
        throw DataError("matching: bad edge endpoints");
      end_[2 * k] = e.u;
      end_[2 * k + 1] = e.v;
      neighb_[e.u].push_back(2 * k + 1);
      neighb_[e.v].push_back(2 * k);
      max_weight = std::max(max_weight, e.weight);
    }
    mate_.assign(n_, -1);
    label_.assign(2 * n_, 0);
    label_end_.assign(2 * n_, -1);
    in_blossom_.resize(n_);
    for (int v = 0; v < n_; ++v) in_blossom_[v] = v;
    blossom_parent_.assign(2 * n_, -1);
    blossom_childs_.assign(2 * n_, {});
    blossom_base_.assign(2 * n_, -1);
    for (int v = 0; v < n_; ++v) blossom_base_[v] = v;
    blossom_endps_.assign(2 * n_, {});
    best_edge_.assign(2 * n_, -1);
    blossom_best_edges_.assign(2 * n_, {});
    for (int b = 2 * n_ - 1; b >= n_; --b) unused_blossoms_.push_back(b);
    dual_.assign(2 * n_, 0);
    for (int v = 0; v < n_; ++v) dual_[v] = max_weight;
    allow_edge_.assign(m, false);
  }

  std::vector<int> run() {
    for (int round = 0; round < n_; ++round) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(best_edge_.begin(), best_edge_.end(), -1);
      for (int b = n_; b < 2 * n_; ++b) blossom_best_edges_[b].clear();
      std::fill(allow_edge_.begin(), allow_edge_.end(), false);
      queue_.clear();
      for (int v = 0; v < n_; ++v)
        if (mate_[v] == -1 && label_[in_blossom_[v]] == 0) assign_label(v, 1, -1);

      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          int v = queue_.back();
          queue_.pop_back();
          for (int p : neighb_[v]) {
            int k = p / 2;
            int w = end_[p];
            if (in_blossom_[v] == in_blossom_[w]) continue;
            std::int64_t kslack = 0;
            if (!allow_edge_[k]) {
              kslack = slack(k);
              if (kslack <= 0) allow_edge_[k] = true;
            }
            if (allow_edge_[k]) {
              if (label_[in_blossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[in_blossom_[w]] == 1) {
                int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                label_[w] = 2;
                label_end_[w] = p ^ 1;
              }
            } else if (label_[in_blossom_[w]] == 1) {
              int b = in_blossom_[v];
              if (best_edge_[b] == -1 || kslack < slack(best_edge_[b]))
                best_edge_[b] = k;
            } else if (label_[w] == 0) {
              if (best_edge_[w] == -1 || kslack < slack(best_edge_[w]))
                best_edge_[w] = k;
            }
          }
        }
        if (augmented) break;

        // Dual update: the smallest of (1) min free-vertex dual, (2) min
        // slack to a free blossom, (3) half min slack between S-blossoms,
        // (4) min dual of a top-level T-blossom.
        int delta_type = -1;
        std::int64_t delta = kNoDelta;
        int delta_edge = -1, delta_blossom = -1;
        if (!max_cardinality_) {
          delta_type = 1;
          delta = std::max<std::int64_t>(0, min_vertex_dual());
        }
        for (int v = 0; v < n_; ++v) {
          if (label_[in_blossom_[v]] == 0 && best_edge_[v] != -1) {
            std::int64_t d = slack(best_edge_[v]);
            if (delta_type == -1 || d < delta) {
              delta = d;
              delta_type = 2;
              delta_edge = best_edge_[v];
            }
          }
        }
        for (int b = 0; b < 2 * n_; ++b) {
          if (blossom_parent_[b] == -1 && label_[b] == 1 &&
              best_edge_[b] != -1) {
            std::int64_t kslack = slack(best_edge_[b]);
            if (kslack % 2 != 0)
              throw InvariantError("matching: odd S-S slack with integer weights");
            std::int64_t d = kslack / 2;
            if (delta_type == -1 || d < delta) {
              delta = d;
              delta_type = 3;
              delta_edge = best_edge_[b];
            }
          }
        }
        for (int b = n_; b < 2 * n_; ++b) {
          if (blossom_base_[b] >= 0 && blossom_parent_[b] == -1 &&
              label_[b] == 2 && (delta_type == -1 || dual_[b] < delta)) {
            delta = dual_[b];
            delta_type = 4;
            delta_blossom = b;
          }
        }
        if (delta_type == -1) {
          // No improving direction: matching is maximum cardinality.
          delta_type = 1;
          delta = std::max<std::int64_t>(0, min_vertex_dual());
        }

        for (int v = 0; v < n_; ++v) {
          int lbl = label_[in_blossom_[v]];
          if (lbl == 1)
            dual_[v] -= delta;
          else if (lbl == 2)
            dual_[v] += delta;
        }
        for (int b = n_; b < 2 * n_; ++b) {
          if (blossom_base_[b] >= 0 && blossom_parent_[b] == -1) {
            if (label_[b] == 1)
              dual_[b] += delta;
            else if (label_[b] == 2)
              dual_[b] -= delta;
          }
        }

        if (delta_type == 1) break;
        if (delta_type == 2) {
          allow_edge_[delta_edge] = true;
          int i = end_[2 * delta_edge];
          if (label_[in_blossom_[i]] == 0) i = end_[2 * delta_edge + 1];
          queue_.push_back(i);
        } else if (delta_type == 3) {
          allow_edge_[delta_edge] = true;
          queue_.push_back(end_[2 * delta_edge]);
        } else if (delta_type == 4) {
          expand_blossom(delta_blossom, false);
        }
      }
      if (!augmented) break;

      for (int b = n_; b < 2 * n_; ++b)
        if (blossom_parent_[b] == -1 && blossom_base_[b] >= 0 &&
            label_[b] == 1 && dual_[b] == 0)
          expand_blossom(b, true);
    }

    std::vector<int> result(n_, -1);
    for (int v = 0; v < n_; ++v)
      if (mate_[v] >= 0) result[v] = end_[mate_[v]];
    return result;
  }

private:
  std::int64_t slack(int k) const {
    return dual_[edges_[k].u] + dual_[edges_[k].v] - 2 * edges_[k].weight;
  }

  std::int64_t min_vertex_dual() const {
    std::int64_t m = kNoDelta;
    for (int v = 0; v < n_; ++v) m = std::min(m, dual_[v]);
    return m;
  }

  void blossom_leaves(int b, std::vector<int>& out) const {
    if (b < n_) {
      out.push_back(b);
      return;
    }
    for (int child : blossom_childs_[b]) blossom_leaves(child, out);
  }

  void assign_label(int w, int t, int p) {
    int b = in_blossom_[w];
    assert(label_[w] == 0 && label_[b] == 0);
    label_[w] = label_[b] = t;
    label_end_[w] = label_end_[b] = p;
    best_edge_[w] = best_edge_[b] = -1;
    if (t == 1) {
      std::vector<int> leaves;
      blossom_leaves(b, leaves);
      queue_.insert(queue_.end(), leaves.begin(), leaves.end());
    } else {
      int base = blossom_base_[b];
      assert(mate_[base] >= 0);
      assign_label(end_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  // Trace back from both ends of an allowed S-S edge; returns the base of
  // the first common blossom or -1 when the paths reach two distinct roots
  // (an augmenting path).
  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = in_blossom_[v];
      if (label_[b] & 4) {
        base = blossom_base_[b];
        break;
      }
      assert(label_[b] == 1);
      path.push_back(b);
      label_[b] = 5;
      assert(label_end_[b] == mate_[blossom_base_[b]]);
      if (label_end_[b] == -1) {
        v = -1;
      } else {
        v = end_[label_end_[b]];
        b = in_blossom_[v];
        assert(label_[b] == 2);
        assert(label_end_[b] >= 0);
        v = end_[label_end_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[b] = 1;
    return base;
  }

  // Shrink the odd cycle through edge k and base `base` into a fresh blossom.
  void add_blossom(int base, int k) {
    int v = edges_[k].u, w = edges_[k].v;
    int bb = in_blossom_[base];
    int bv = in_blossom_[v];
    int bw = in_blossom_[w];
    int b = unused_blossoms_.back();
    unused_blossoms_.pop_back();
    blossom_base_[b] = base;
    blossom_parent_[b] = -1;
    blossom_parent_[bb] = b;

    std::vector<int> path, endps;
    while (bv != bb) {
      blossom_parent_[bv] = b;
      path.push_back(bv);
      endps.push_back(label_end_[bv]);
      assert(label_[bv] == 2 ||
             (label_[bv] == 1 && label_end_[bv] == mate_[blossom_base_[bv]]));
      assert(label_end_[bv] >= 0);
      v = end_[label_end_[bv]];
      bv = in_blossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossom_parent_[bw] = b;
      path.push_back(bw);
      endps.push_back(label_end_[bw] ^ 1);
      assert(label_[bw] == 2 ||
             (label_[bw] == 1 && label_end_[bw] == mate_[blossom_base_[bw]]));
      assert(label_end_[bw] >= 0);
      w = end_[label_end_[bw]];
      bw = in_blossom_[w];
    }

    assert(label_[bb] == 1);
    label_[b] = 1;
    label_end_[b] = label_end_[bb];
    dual_[b] = 0;
    blossom_childs_[b] = path;
    blossom_endps_[b] = endps;

    std::vector<int> leaves;
    blossom_leaves(b, leaves);
    for (int leaf : leaves) {
      if (label_[in_blossom_[leaf]] == 2) queue_.push_back(leaf);
      in_blossom_[leaf] = b;
    }

    // Merge least-slack edge lists of the children.
    std::vector<int> best_edge_to(2 * n_, -1);
    for (int child : path) {
      std::vector<std::vector<int>> lists;
      if (blossom_best_edges_[child].empty()) {
        std::vector<int> child_leaves;
        blossom_leaves(child, child_leaves);
        for (int leaf : child_leaves) {
          std::vector<int> ks;
          ks.reserve(neighb_[leaf].size());
          for (int p : neighb_[leaf]) ks.push_back(p / 2);
          lists.push_back(std::move(ks));
        }
      } else {
        lists.push_back(blossom_best_edges_[child]);
      }
      for (const auto& list : lists) {
        for (int edge : list) {
          int i = edges_[edge].u, j = edges_[edge].v;
          if (in_blossom_[j] == b) std::swap(i, j);
          int bj = in_blossom_[j];
          if (bj != b && label_[bj] == 1 &&
              (best_edge_to[bj] == -1 || slack(edge) < slack(best_edge_to[bj])))
            best_edge_to[bj] = edge;
        }
      }
      blossom_best_edges_[child].clear();
      best_edge_[child] = -1;
    }
    blossom_best_edges_[b].clear();
    for (int edge : best_edge_to)
      if (edge != -1) blossom_best_edges_[b].push_back(edge);
    best_edge_[b] = -1;
    for (int edge : blossom_best_edges_[b])
      if (best_edge_[b] == -1 || slack(edge) < slack(best_edge_[b]))
        best_edge_[b] = edge;
  }

  // Undo a blossom; at end of stage only zero-dual S-blossoms dissolve, mid
  // stage a T-blossom dissolves and its children are relabelled.
  void expand_blossom(int b, bool endstage) {
    for (int s : blossom_childs_[b]) {
      blossom_parent_[s] = -1;
      if (s < n_) {
        in_blossom_[s] = s;
      } else if (endstage && dual_[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        std::vector<int> leaves;
        blossom_leaves(s, leaves);
        for (int leaf : leaves) in_blossom_[leaf] = s;
      }
    }
    if (!endstage && label_[b] == 2) {
      assert(label_end_[b] >= 0);
      int entry_child = in_blossom_[end_[label_end_[b] ^ 1]];
      int child_count = static_cast<int>(blossom_childs_[b].size());
      int j = 0;
      for (; j < child_count; ++j)
        if (blossom_childs_[b][j] == entry_child) break;
      int jstep, endptrick;
      if (j & 1) {
        j -= child_count;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      auto child_at = [&](int idx) {
        return blossom_childs_[b][(idx % child_count + child_count) %
                                  child_count];
      };
      auto endp_at = [&](int idx) {
        return blossom_endps_[b][(idx % child_count + child_count) %
                                 child_count];
      };
      int p = label_end_[b];
      while (j != 0) {
        label_[end_[p ^ 1]] = 0;
        label_[end_[endp_at(j - endptrick) ^ endptrick ^ 1]] = 0;
        assign_label(end_[p ^ 1], 2, p);
        allow_edge_[endp_at(j - endptrick) / 2] = true;
        j += jstep;
        p = endp_at(j - endptrick) ^ endptrick;
        allow_edge_[p / 2] = true;
        j += jstep;
      }
      int bv = child_at(0);
      label_[end_[p ^ 1]] = label_[bv] = 2;
      label_end_[end_[p ^ 1]] = label_end_[bv] = p;
      best_edge_[bv] = -1;
      j += jstep;
      while (child_at(j) != entry_child) {
        bv = child_at(j);
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        std::vector<int> leaves;
        blossom_leaves(bv, leaves);
        int labelled = -1;
        for (int leaf : leaves)
          if (label_[leaf] != 0) {
            labelled = leaf;
            break;
          }
        if (labelled >= 0) {
          assert(label_[labelled] == 2);
          assert(in_blossom_[labelled] == bv);
          label_[labelled] = 0;
          label_[end_[mate_[blossom_base_[bv]]]] = 0;
          assign_label(labelled, 2, label_end_[labelled]);
        }
        j += jstep;
      }
    }
    label_[b] = -1;
    label_end_[b] = -1;
    blossom_childs_[b].clear();
    blossom_endps_[b].clear();
    blossom_base_[b] = -1;
    blossom_best_edges_[b].clear();
    best_edge_[b] = -1;
    unused_blossoms_.push_back(b);
  }

  // Rotate blossom b so that vertex v becomes its base, flipping matched
  // edges along the way.
  void augment_blossom(int b, int v) {
    int t = v;
    while (blossom_parent_[t] != b) t = blossom_parent_[t];
    if (t >= n_) augment_blossom(t, v);
    int child_count = static_cast<int>(blossom_childs_[b].size());
    int i = 0;
    for (; i < child_count; ++i)
      if (blossom_childs_[b][i] == t) break;
    int j = i, jstep, endptrick;
    if (i & 1) {
      j -= child_count;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    auto child_at = [&](int idx) {
      return blossom_childs_[b][(idx % child_count + child_count) %
                                child_count];
    };
    auto endp_at = [&](int idx) {
      return blossom_endps_[b][(idx % child_count + child_count) %
                               child_count];
    };
    while (j != 0) {
      j += jstep;
      int t2 = child_at(j);
      int p = endp_at(j - endptrick) ^ endptrick;
      if (t2 >= n_) augment_blossom(t2, end_[p]);
      j += jstep;
      t2 = child_at(j);
      if (t2 >= n_) augment_blossom(t2, end_[p ^ 1]);
      mate_[end_[p]] = p ^ 1;
      mate_[end_[p ^ 1]] = p;
    }
    std::vector<int> childs, endps;
    for (int idx = i; idx < i + child_count; ++idx)
      childs.push_back(child_at(idx));
    for (int idx = i; idx < i + child_count; ++idx)
      endps.push_back(endp_at(idx));
    blossom_childs_[b] = std::move(childs);
    blossom_endps_[b] = std::move(endps);
    blossom_base_[b] = blossom_base_[blossom_childs_[b][0]];
    assert(blossom_base_[b] == v);
  }

  // Flip matched/unmatched along the augmenting path through edge k.
  void augment_matching(int k) {
    for (int side = 0; side < 2; ++side) {
      int s = side == 0 ? edges_[k].u : edges_[k].v;
      int p = side == 0 ? 2 * k + 1 : 2 * k;
      while (true) {
        int bs = in_blossom_[s];
        assert(label_[bs] == 1);
        assert(label_end_[bs] == mate_[blossom_base_[bs]]);
        if (bs >= n_) augment_blossom(bs, s);
        mate_[s] = p;
        if (label_end_[bs] == -1) break;
        int t = end_[label_end_[bs]];
        int bt = in_blossom_[t];
        assert(label_[bt] == 2);
        s = end_[label_end_[bt]];
        int j = end_[label_end_[bt] ^ 1];
        assert(blossom_base_[bt] == t);
        if (bt >= n_) augment_blossom(bt, j);
        mate_[j] = label_end_[bt];
        p = label_end_[bt] ^ 1;
      }
    }
  }

  int n_;
  std::vector<WeightedEdge> edges_;
  bool max_cardinality_;
  std::vector<int> end_;
  std::vector<std::vector<int>> neighb_;
  std::vector<int> mate_;
  std::vector<int> label_;
  std::vector<int> label_end_;
  std::vector<int> in_blossom_;
  std::vector<int> blossom_parent_;
  std::vector<std::vector<int>> blossom_childs_;
  std::vector<int> blossom_base_;
  std::vector<std::vector<int>> blossom_endps_;
  std::vector<int> best_edge_;
  std::vector<std::vector<int>> blossom_best_edges_;
  std::vector<int> unused_blossoms_;
  std::vector<std::int64_t> dual_;
  std::vector<bool> allow_edge_;
  std::vector<int> queue_;
};

}  // namespace

std::vector<int> max_weight_matching(int n,
                                     const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality) {
  if (n <= 0) return {};
  if (edges.empty()) return std::vector<int>(n, -1);
  return Matcher(n, edges, max_cardinality).run();
}

PerfectMatchingResult min_weight_perfect_matching(
    int n, const std::vector<WeightedEdge>& edges) {
  PerfectMatchingResult result;
  result.mate.assign(n, -1);
  if (n == 0) {
    result.perfect = true;
    return result;
  }
  if (n % 2 != 0) return result;

  std::int64_t max_cost = 0;
  for (const WeightedEdge& e : edges) {
    if (e.weight < 0) throw DataError("matching: negative edge cost");
    max_cost = std::max(max_cost, e.weight);
  }
  // Max-weight max-cardinality matching on costs mirrored below max_cost+1:
  // among perfect matchings this minimizes the original total cost.
  std::vector<WeightedEdge> mirrored = edges;
  for (WeightedEdge& e : mirrored) e.weight = max_cost + 1 - e.weight;

  result.mate = max_weight_matching(n, mirrored, true);
  for (int v = 0; v < n; ++v)
    if (result.mate[v] == -1) return result;  // not perfect

  result.perfect = true;
  std::map<std::pair<int, int>, std::int64_t> cost_of;
  for (const WeightedEdge& e : edges) {
    auto key = std::minmax(e.u, e.v);
    auto it = cost_of.find(key);
    if (it == cost_of.end() || it->second > e.weight) cost_of[key] = e.weight;
  }
  for (int v = 0; v < n; ++v)
    if (v < result.mate[v]) result.cost += cost_of.at({v, result.mate[v]});
  return result;
}

PerfectMatchingResult min_weight_perfect_matching_lex(
    int n, const std::vector<WeightedEdge>& edges) {
  PerfectMatchingResult best = min_weight_perfect_matching(n, edges);
  if (!best.perfect || n == 0) return best;

  // Normalized adjacency with per-pair minimum cost, ordered by (u, v).
  std::map<std::pair<int, int>, std::int64_t> cost_of;
  for (const WeightedEdge& e : edges) {
    auto key = std::minmax(e.u, e.v);
    auto it = cost_of.find(key);
    if (it == cost_of.end() || it->second > e.weight) cost_of[key] = e.weight;
  }

  std::vector<int> fixed_mate(n, -1);
  std::vector<bool> removed(n, false);
  std::int64_t fixed_cost = 0;
  std::int64_t target = best.cost;

  auto solve_remaining = [&]() {
    std::vector<int> compact(n, -1);
    int live = 0;
    for (int v = 0; v < n; ++v)
      if (!removed[v]) compact[v] = live++;
    std::vector<WeightedEdge> sub;
    for (const auto& [key, cost] : cost_of)
      if (!removed[key.first] && !removed[key.second])
        sub.push_back({compact[key.first], compact[key.second], cost});
    PerfectMatchingResult r = min_weight_perfect_matching(live, sub);
    return r.perfect ? r.cost : std::int64_t{-1};
  };

  for (int rounds = 0; rounds < n / 2; ++rounds) {
    int u = -1;
    for (int v = 0; v < n; ++v)
      if (!removed[v]) {
        u = v;
        break;
      }
    if (u == -1) break;
    bool fixed = false;
    for (const auto& [key, cost] : cost_of) {
      if (key.first != u || removed[key.second]) continue;
      int v = key.second;
      removed[u] = removed[v] = true;
      std::int64_t rest = solve_remaining();
      if (rest >= 0 && fixed_cost + cost + rest == target) {
        fixed_mate[u] = v;
        fixed_mate[v] = u;
        fixed_cost += cost;
        fixed = true;
        break;
      }
      removed[u] = removed[v] = false;
    }
    if (!fixed)
      throw InvariantError("lexicographic matching refinement failed");
  }

  best.mate = fixed_mate;
  best.cost = fixed_cost;
  return best;
}

}  // namespace pra
