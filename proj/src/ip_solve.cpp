#include "pra/ip_solve.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pra {

namespace {

using Clock = std::chrono::steady_clock;

enum class ObjKind { Trans, Priv, Pref, Keep, Zero };

ObjKind kind_of(const IpObjective& o) {
  if (o.label == "f_trans") return ObjKind::Trans;
  if (o.label == "f_priv") return ObjKind::Priv;
  if (o.label == "f_pref") return ObjKind::Pref;
  if (o.label == "keep") return ObjKind::Keep;
  return ObjKind::Zero;
}

struct PairArc {
  int other;
  Score w;
  int ov_begin, ov_end;  // window-relative [b, e)
  int los;
};

// Depth-first search over room choices with capacity/sex propagation,
// per-period packing pruning, room-symmetry reduction, and admissible
// objective bounds per lexicographic stage.
class BnB {
public:
  BnB(const IpModel& m, const SolveOptions& opt) : m_(m), opt_(opt) {
    w0_ = m_.window_start;
    W_ = m_.horizon - w0_ + 1;
    P_ = static_cast<int>(m_.patients.size());
    R_ = static_cast<int>(m_.rooms.size());
    deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(
                                       std::min(opt.time_limit_s, 1e9)));
    setup();
  }

  IpSolution solve();

private:
  // ---- immutable setup ----
  const IpModel& m_;
  SolveOptions opt_;
  int w0_ = 1, W_ = 0, P_ = 0, R_ = 0;
  Clock::time_point deadline_;

  std::vector<int> cap_;                  // per room
  std::vector<bool> referenced_room_;     // named by prefix / virtual_prev
  std::vector<bool> is_female_, is_req_;  // per patient
  std::vector<int> arr_, dis_;            // window-relative [arr, dis)
  std::vector<std::vector<PairArc>> adj_;
  std::vector<int> prefix_room_;   // forced room per patient or -1 (T/U/V)
  std::vector<int> keep_room_;     // old room per patient or -1 (T*/U*)
  std::vector<int> vprev_room_;    // virtual previous room or -1 (Q)
  std::vector<Score> smax_t_, wmin_t_;  // window-relative, -1 when absent

  struct Decision {
    int p;
    int t;  // window-relative; -1 for stay-indexed
  };
  std::vector<Decision> decisions_;

  // suffix data per decision depth
  std::vector<std::int64_t> req_rem_total_;  // requester-periods undecided
  std::vector<std::int64_t> keep_rem_;
  std::vector<int> rem_f_, rem_m_, rem_req_;  // stay: [d * W + t]
  std::vector<int> tot_f_, tot_m_, tot_req_;  // time: per period totals

  // ---- mutable search state ----
  std::vector<std::vector<int>> occupants_;  // [r * W + t] occupant list
  std::vector<int> fem_cnt_, male_cnt_;      // [r * W + t]
  std::vector<std::int64_t> occ_total_;      // per room, across periods
  int virgin_rooms_ = 0;                     // rooms empty across the window
  std::vector<int> free_f_, free_m_, free_all_;     // per period pools
  std::vector<int> placed_f_, placed_m_, placed_req_;  // time-indexed
  std::vector<int> fulfilled_;  // requester-solo count per period
  std::int64_t fulfilled_total_ = 0;
  Score acc_pref_ = 0;
  std::int64_t acc_trans_ = 0;
  std::int64_t keep_now_ = 0;
  std::vector<Score> cap_acc_;       // per period, when w^min caps active
  std::vector<int> room_of_;         // stay-indexed result per patient
  std::vector<int> room_at_;         // time-indexed [p * W + t]
  std::int64_t nodes_ = 0;
  bool timed_out_ = false;
  mutable std::vector<Score> scratch_cost_;
  mutable std::vector<int> touched_rooms_;

  // stage bookkeeping
  std::vector<Score> pinned_;
  int stage_ = 0;
  ObjKind stage_kind_ = ObjKind::Zero;
  bool stage_min_ = true;
  bool have_best_ = false;
  Score best_val_ = 0;
  std::vector<int> best_room_of_, best_room_at_;
  Score stage_floor_ = 0;  // min stages: value that cannot be improved on

  int idx(int r, int t) const { return r * W_ + t; }

  void setup() {
    cap_.resize(R_);
    for (int r = 0; r < R_; ++r) cap_[r] = m_.rooms[r].capacity;
    referenced_room_.assign(R_, false);
    is_female_.resize(P_);
    is_req_.resize(P_);
    arr_.resize(P_);
    dis_.resize(P_);
    for (int p = 0; p < P_; ++p) {
      is_female_[p] = m_.patients[p].sex == Sex::F;
      is_req_[p] = m_.patients[p].requester;
      arr_[p] = m_.patients[p].arr - w0_;
      dis_[p] = m_.patients[p].dis - w0_;
      if (dis_[p] > W_) dis_[p] = W_;
    }
    adj_.assign(P_, {});
    for (const ModelPair& pr : m_.pairs) {
      PairArc a{pr.j, pr.w, pr.ov_begin - w0_, pr.ov_end - w0_, pr.los};
      adj_[pr.i].push_back(a);
      a.other = pr.i;
      adj_[pr.j].push_back(a);
    }
    prefix_room_.assign(P_, -1);
    keep_room_.assign(P_, -1);
    vprev_room_.assign(P_, -1);
    bool star = m_.variant == IpVariant::Tstar || m_.variant == IpVariant::Ustar;
    for (const auto& [p, r] : m_.prefix) {
      (star ? keep_room_ : prefix_room_)[p] = r;
      referenced_room_[r] = true;
    }
    for (const auto& [p, r] : m_.virtual_prev) {
      vprev_room_[p] = r;
      referenced_room_[r] = true;
    }
    smax_t_.assign(W_, -1);
    wmin_t_.assign(W_, -1);
    for (const auto& [t, v] : m_.smax)
      if (t >= w0_ && t - w0_ < W_) smax_t_[t - w0_] = v;
    for (const auto& [t, v] : m_.wmin)
      if (t >= w0_ && t - w0_ < W_) wmin_t_[t - w0_] = v;

    scratch_cost_.assign(R_, 0);
    touched_rooms_.reserve(R_);
    occupants_.assign(static_cast<std::size_t>(R_) * W_, {});
    fem_cnt_.assign(static_cast<std::size_t>(R_) * W_, 0);
    male_cnt_.assign(static_cast<std::size_t>(R_) * W_, 0);
    occ_total_.assign(R_, 0);
    virgin_rooms_ = R_;
    free_f_.assign(W_, 0);
    free_m_.assign(W_, 0);
    free_all_.assign(W_, 0);
    int beds = 0;
    for (int r = 0; r < R_; ++r) beds += cap_[r];
    for (int t = 0; t < W_; ++t) free_f_[t] = free_m_[t] = free_all_[t] = beds;
    fulfilled_.assign(W_, 0);
    cap_acc_.assign(W_, 0);
    room_of_.assign(P_, -1);
    room_at_.assign(static_cast<std::size_t>(P_) * W_, -1);

    // decision list: stay-indexed patients without a prefix room, ordered by
    // (arrival, index); time-indexed patient-periods ordered by (period,
    // index). Prefix placements happen at the root.
    if (m_.stay_indexed) {
      std::vector<int> free_patients;
      for (int p = 0; p < P_; ++p)
        if (prefix_room_[p] < 0) free_patients.push_back(p);
      std::stable_sort(free_patients.begin(), free_patients.end(),
                       [&](int a, int b) { return arr_[a] < arr_[b]; });
      for (int p : free_patients) decisions_.push_back({p, -1});
    } else {
      for (int t = 0; t < W_; ++t)
        for (int p = 0; p < P_; ++p)
          if (arr_[p] <= t && t < dis_[p]) decisions_.push_back({p, t});
      placed_f_.assign(W_, 0);
      placed_m_.assign(W_, 0);
      placed_req_.assign(W_, 0);
      tot_f_.assign(W_, 0);
      tot_m_.assign(W_, 0);
      tot_req_.assign(W_, 0);
      for (int p = 0; p < P_; ++p)
        for (int t = arr_[p]; t < dis_[p]; ++t) {
          (is_female_[p] ? tot_f_ : tot_m_)[t]++;
          if (is_req_[p]) tot_req_[t]++;
        }
    }

    const int D = static_cast<int>(decisions_.size());
    req_rem_total_.assign(D + 1, 0);
    keep_rem_.assign(D + 1, 0);
    for (int d = D - 1; d >= 0; --d) {
      const Decision& dec = decisions_[d];
      std::int64_t periods =
          dec.t >= 0 ? 1 : std::max(0, dis_[dec.p] - arr_[dec.p]);
      req_rem_total_[d] =
          req_rem_total_[d + 1] + (is_req_[dec.p] ? periods : 0);
      keep_rem_[d] = keep_rem_[d + 1] + (keep_room_[dec.p] >= 0 ? 1 : 0);
    }
    if (m_.stay_indexed) {
      rem_f_.assign(static_cast<std::size_t>(D + 1) * W_, 0);
      rem_m_.assign(static_cast<std::size_t>(D + 1) * W_, 0);
      rem_req_.assign(static_cast<std::size_t>(D + 1) * W_, 0);
      for (int d = D - 1; d >= 0; --d) {
        int p = decisions_[d].p;
        for (int t = 0; t < W_; ++t) {
          int base = (d + 1) * W_ + t;
          int here = d * W_ + t;
          bool present = arr_[p] <= t && t < dis_[p];
          rem_f_[here] = rem_f_[base] + (present && is_female_[p] ? 1 : 0);
          rem_m_[here] = rem_m_[base] + (present && !is_female_[p] ? 1 : 0);
          rem_req_[here] = rem_req_[base] + (present && is_req_[p] ? 1 : 0);
        }
      }
    }
  }

  // ---- occupancy updates ----

  void add_occ(int p, int r, int t) {
    auto& occ = occupants_[idx(r, t)];
    if (occ.size() == 1 && is_req_[occ[0]]) {
      fulfilled_[t]--;
      fulfilled_total_--;
    }
    occ.push_back(p);
    if (occ.size() == 1 && is_req_[p]) {
      fulfilled_[t]++;
      fulfilled_total_++;
    }
    if (occ_total_[r]++ == 0) --virgin_rooms_;
    free_all_[t]--;
    if (is_female_[p]) {
      free_f_[t]--;
      if (fem_cnt_[idx(r, t)] == 0 && male_cnt_[idx(r, t)] == 0)
        free_m_[t] -= cap_[r];
      fem_cnt_[idx(r, t)]++;
    } else {
      free_m_[t]--;
      if (fem_cnt_[idx(r, t)] == 0 && male_cnt_[idx(r, t)] == 0)
        free_f_[t] -= cap_[r];
      male_cnt_[idx(r, t)]++;
    }
  }

  void remove_occ(int p, int r, int t) {
    auto& occ = occupants_[idx(r, t)];
    occ.pop_back();
    if (occ.empty() && is_req_[p]) {
      fulfilled_[t]--;
      fulfilled_total_--;
    }
    if (occ.size() == 1 && is_req_[occ[0]]) {
      fulfilled_[t]++;
      fulfilled_total_++;
    }
    if (--occ_total_[r] == 0) ++virgin_rooms_;
    free_all_[t]++;
    if (is_female_[p]) {
      fem_cnt_[idx(r, t)]--;
      if (fem_cnt_[idx(r, t)] == 0 && male_cnt_[idx(r, t)] == 0)
        free_m_[t] += cap_[r];
      free_f_[t]++;
    } else {
      male_cnt_[idx(r, t)]--;
      if (fem_cnt_[idx(r, t)] == 0 && male_cnt_[idx(r, t)] == 0)
        free_f_[t] += cap_[r];
      free_m_[t]++;
    }
  }

  bool room_open_stay(int p, int r) const {
    for (int t = arr_[p]; t < dis_[p]; ++t) {
      int i = idx(r, t);
      if (static_cast<int>(occupants_[i].size()) >= cap_[r]) return false;
      if (is_female_[p] ? male_cnt_[i] > 0 : fem_cnt_[i] > 0) return false;
    }
    return true;
  }

  bool room_open_time(int p, int r, int t) const {
    int i = idx(r, t);
    if (static_cast<int>(occupants_[i].size()) >= cap_[r]) return false;
    if (is_female_[p] ? male_cnt_[i] > 0 : fem_cnt_[i] > 0) return false;
    return true;
  }

  // Places patient p; returns false when a w^min cap is exceeded (state is
  // fully updated either way and must be undone by unplace).
  bool place_stay(int p, int r) {
    bool ok = true;
    for (int t = arr_[p]; t < dis_[p]; ++t) add_occ(p, r, t);
    room_of_[p] = r;
    for (const PairArc& a : adj_[p]) {
      if (room_of_[a.other] != r) continue;
      acc_pref_ += a.w * a.los;
      if (a.w > 0)
        for (int t = a.ov_begin; t < a.ov_end; ++t) {
          cap_acc_[t] += a.w;
          if (wmin_t_[t] >= 0 && cap_acc_[t] > wmin_t_[t]) ok = false;
        }
    }
    if (keep_room_[p] == r) keep_now_++;
    return ok;
  }

  void unplace_stay(int p, int r) {
    if (keep_room_[p] == r) keep_now_--;
    for (const PairArc& a : adj_[p]) {
      if (room_of_[a.other] != r || a.other == p) continue;
      acc_pref_ -= a.w * a.los;
      if (a.w > 0)
        for (int t = a.ov_begin; t < a.ov_end; ++t) cap_acc_[t] -= a.w;
    }
    room_of_[p] = -1;
    for (int t = dis_[p] - 1; t >= arr_[p]; --t) remove_occ(p, r, t);
  }

  bool place_time(int p, int r, int t) {
    bool ok = true;
    // pair costs against current co-occupants, before adding p
    for (int q : occupants_[idx(r, t)]) {
      Score w = pair_weight(p, q);
      acc_pref_ += w;
      if (w > 0) {
        cap_acc_[t] += w;
        if (wmin_t_[t] >= 0 && cap_acc_[t] > wmin_t_[t]) ok = false;
      }
    }
    add_occ(p, r, t);
    room_at_[p * W_ + t] = r;
    (is_female_[p] ? placed_f_ : placed_m_)[t]++;
    if (is_req_[p]) placed_req_[t]++;
    if (t > arr_[p]) {
      if (room_at_[p * W_ + t - 1] != r) acc_trans_++;
    } else if (vprev_room_[p] >= 0 && vprev_room_[p] != r) {
      acc_trans_++;
    }
    return ok;
  }

  void unplace_time(int p, int r, int t) {
    if (t > arr_[p]) {
      if (room_at_[p * W_ + t - 1] != r) acc_trans_--;
    } else if (vprev_room_[p] >= 0 && vprev_room_[p] != r) {
      acc_trans_--;
    }
    if (is_req_[p]) placed_req_[t]--;
    (is_female_[p] ? placed_f_ : placed_m_)[t]--;
    room_at_[p * W_ + t] = -1;
    remove_occ(p, r, t);
    for (int q : occupants_[idx(r, t)]) {
      Score w = pair_weight(p, q);
      acc_pref_ -= w;
      if (w > 0) cap_acc_[t] -= w;
    }
  }

  Score pair_weight(int p, int q) const {
    for (const PairArc& a : adj_[p])
      if (a.other == q) return a.w;
    return 0;
  }

  // ---- pruning ----

  bool pools_ok_stay(int d, int p) const {
    for (int t = arr_[p]; t < dis_[p]; ++t) {
      int base = d * W_ + t;
      if (rem_f_[base] > free_f_[t]) return false;
      if (rem_m_[base] > free_m_[t]) return false;
      if (rem_f_[base] + rem_m_[base] > free_all_[t]) return false;
      if (smax_t_[t] >= 0 &&
          fulfilled_[t] + rem_req_[base] < smax_t_[t])
        return false;
    }
    return true;
  }

  bool pools_ok_time(int t) const {
    int rf = tot_f_[t] - placed_f_[t];
    int rm = tot_m_[t] - placed_m_[t];
    if (rf > free_f_[t] || rm > free_m_[t] || rf + rm > free_all_[t])
      return false;
    if (smax_t_[t] >= 0 &&
        fulfilled_[t] + (tot_req_[t] - placed_req_[t]) < smax_t_[t])
      return false;
    return true;
  }

  // Admissible bound for objective `kind` at depth d: lower bound for
  // minimized objectives, upper bound for maximized ones.
  Score bound(ObjKind kind, int d) const {
    switch (kind) {
      case ObjKind::Trans: return acc_trans_;
      case ObjKind::Pref: {
        Score lb = acc_pref_;
        if (opt_.fpref_lower_bound && *opt_.fpref_lower_bound > lb)
          lb = *opt_.fpref_lower_bound;
        return lb;
      }
      case ObjKind::Priv: return fulfilled_total_ + req_rem_total_[d];
      case ObjKind::Keep: return keep_now_ + keep_rem_[d];
      case ObjKind::Zero: return 0;
    }
    return 0;
  }

  // Stronger f_pref lower bound: every undecided patient pays at least the
  // cheapest join cost against the patients already placed (mutual costs
  // among undecided patients are nonnegative and ignored). Stops counting
  // once `limit` is reached.
  Score pref_future_min(int d, Score limit) const {
    Score sum = acc_pref_;
    const int D = static_cast<int>(decisions_.size());
    for (int i = d; i < D && sum < limit; ++i) {
      const Decision& dec = decisions_[i];
      const int p = dec.p;
      for (int r : touched_rooms_) scratch_cost_[r] = 0;
      touched_rooms_.clear();
      if (dec.t < 0) {
        for (const PairArc& a : adj_[p]) {
          if (a.w == 0) continue;
          int r = room_of_[a.other];
          if (r < 0) continue;
          if (scratch_cost_[r] == 0) touched_rooms_.push_back(r);
          scratch_cost_[r] += a.w * a.los;
        }
      } else {
        for (const PairArc& a : adj_[p]) {
          if (a.w == 0 || dec.t < a.ov_begin || dec.t >= a.ov_end) continue;
          int r = room_at_[a.other * W_ + dec.t];
          if (r < 0) continue;
          if (scratch_cost_[r] == 0) touched_rooms_.push_back(r);
          scratch_cost_[r] += a.w;
        }
      }
      if (touched_rooms_.empty()) continue;  // some zero-cost room exists
      // an untouched empty room is always open at zero cost
      if (virgin_rooms_ > 0) continue;
      Score best = std::numeric_limits<Score>::max();
      for (int r : touched_rooms_) {
        bool open =
            dec.t >= 0 ? room_open_time(p, r, dec.t) : room_open_stay(p, r);
        if (open) best = std::min(best, scratch_cost_[r]);
      }
      if (best > 0) {
        for (int r = 0; r < R_; ++r) {
          if (scratch_cost_[r] > 0) continue;
          bool open =
              dec.t >= 0 ? room_open_time(p, r, dec.t) : room_open_stay(p, r);
          if (open) {
            best = 0;
            break;
          }
        }
      }
      if (best == std::numeric_limits<Score>::max()) return limit;
      sum += best;
    }
    return sum;
  }

  Score exact(ObjKind kind) const {
    switch (kind) {
      case ObjKind::Trans: return acc_trans_;
      case ObjKind::Pref: return acc_pref_;
      case ObjKind::Priv: return fulfilled_total_;
      case ObjKind::Keep: return keep_now_;
      case ObjKind::Zero: return 0;
    }
    return 0;
  }

  bool stage_prune(int d) const {
    for (int i = 0; i < stage_; ++i) {
      ObjKind k = kind_of(m_.objectives[i]);
      bool mini = m_.objectives[i].sense == Sense::Min;
      Score b = bound(k, d);
      if (mini ? b > pinned_[i] : b < pinned_[i]) return true;
      if (k == ObjKind::Pref && mini &&
          pref_future_min(d, pinned_[i] + 1) > pinned_[i])
        return true;
    }
    ObjKind k = stage_kind_;
    Score b = bound(k, d);
    if (have_best_ && (stage_min_ ? b >= best_val_ : b <= best_val_))
      return true;
    if (k == ObjKind::Pref && stage_min_ && have_best_ &&
        pref_future_min(d, best_val_) >= best_val_)
      return true;
    return false;
  }

  // candidate ordering key, smaller is better for the current stage
  Score candidate_key(int p, int r, int t) const {
    switch (stage_kind_) {
      case ObjKind::Pref: {
        Score c = 0;
        if (t >= 0) {
          for (int q : occupants_[idx(r, t)]) c += pair_weight(p, q);
        } else {
          for (const PairArc& a : adj_[p])
            if (room_of_[a.other] == r) c += a.w * a.los;
        }
        return c;
      }
      case ObjKind::Trans: {
        if (t < 0) return 0;
        int prev = t > arr_[p] ? room_at_[p * W_ + t - 1] : vprev_room_[p];
        return prev >= 0 && prev != r ? 1 : 0;
      }
      case ObjKind::Priv: {
        // prefer placements that create or preserve requester solitude
        Score key = 0;
        int b = t >= 0 ? t : arr_[p];
        int e = t >= 0 ? t + 1 : dis_[p];
        for (int tt = b; tt < e; ++tt) {
          const auto& occ = occupants_[idx(r, tt)];
          if (occ.empty() && is_req_[p]) key -= 1;
          if (occ.size() == 1 && is_req_[occ[0]]) key += 1;
        }
        return key;
      }
      case ObjKind::Keep: return keep_room_[p] == r ? -1 : 0;
      case ObjKind::Zero: return 0;
    }
    return 0;
  }

  enum class Walk { Continue, Stop };

  Walk dfs(int d);
  void record_leaf(bool& stop);
  bool leaf_constraints_ok() const;
  void snapshot();
  bool root_checks() const;
  Score eval_snapshot(ObjKind kind) const;

  IpSolution extract(SolveStatus status) const;
};

bool BnB::root_checks() const {
  for (int t = 0; t < W_; ++t) {
    if (m_.stay_indexed) {
      int base = 0 * W_ + t;
      if (rem_f_[base] > free_f_[t]) return false;
      if (rem_m_[base] > free_m_[t]) return false;
      if (rem_f_[base] + rem_m_[base] > free_all_[t]) return false;
      if (smax_t_[t] >= 0 && fulfilled_[t] + rem_req_[base] < smax_t_[t])
        return false;
    } else {
      if (!pools_ok_time(t)) return false;
    }
    if (wmin_t_[t] >= 0 && cap_acc_[t] > wmin_t_[t]) return false;
  }
  return true;
}

Score BnB::eval_snapshot(ObjKind kind) const {
  switch (kind) {
    case ObjKind::Zero:
      return 0;
    case ObjKind::Keep: {
      Score v = 0;
      for (int p = 0; p < P_; ++p)
        if (keep_room_[p] >= 0 && best_room_of_[p] == keep_room_[p]) ++v;
      return v;
    }
    case ObjKind::Trans: {
      Score v = 0;
      for (int p = 0; p < P_; ++p) {
        if (arr_[p] >= dis_[p]) continue;
        if (vprev_room_[p] >= 0 &&
            best_room_at_[p * W_ + arr_[p]] != vprev_room_[p])
          ++v;
        for (int t = arr_[p] + 1; t < dis_[p]; ++t)
          if (best_room_at_[p * W_ + t] != best_room_at_[p * W_ + t - 1]) ++v;
      }
      return v;
    }
    case ObjKind::Pref: {
      Score v = 0;
      for (const ModelPair& pr : m_.pairs) {
        if (pr.w == 0) continue;
        if (m_.stay_indexed) {
          if (best_room_of_[pr.i] == best_room_of_[pr.j]) v += pr.w * pr.los;
        } else {
          for (int t = pr.ov_begin - w0_; t < pr.ov_end - w0_; ++t)
            if (best_room_at_[pr.i * W_ + t] == best_room_at_[pr.j * W_ + t])
              v += pr.w;
        }
      }
      return v;
    }
    case ObjKind::Priv: {
      std::vector<int> count(static_cast<std::size_t>(R_) * W_, 0);
      std::vector<int> solo(static_cast<std::size_t>(R_) * W_, -1);
      for (int p = 0; p < P_; ++p)
        for (int t = arr_[p]; t < dis_[p]; ++t) {
          int r = m_.stay_indexed ? best_room_of_[p] : best_room_at_[p * W_ + t];
          count[idx(r, t)]++;
          solo[idx(r, t)] = p;
        }
      Score v = 0;
      for (int i = 0; i < R_ * W_; ++i)
        if (count[i] == 1 && is_req_[solo[i]]) ++v;
      return v;
    }
  }
  return 0;
}

BnB::Walk BnB::dfs(int d) {
  if ((++nodes_ & 2047) == 1 && Clock::now() > deadline_) {
    timed_out_ = true;
    return Walk::Stop;
  }
  if (d == static_cast<int>(decisions_.size())) {
    bool stop = false;
    record_leaf(stop);
    return stop ? Walk::Stop : Walk::Continue;
  }
  const Decision dec = decisions_[d];
  const int p = dec.p;

  struct Cand {
    int r;
    Score key;
    bool away;  // leaves the patient's previous/kept room
  };
  // ties prefer the room the patient already sits in, keeping greedy
  // incumbents close to the running assignment
  int preferred = -1;
  if (dec.t >= 0)
    preferred = dec.t > arr_[p] ? room_at_[p * W_ + dec.t - 1] : vprev_room_[p];
  else
    preferred = keep_room_[p];
  std::vector<Cand> cands;
  cands.reserve(R_);
  bool virgin_seen[8] = {false, false, false, false, false, false, false, false};
  for (int r = 0; r < R_; ++r) {
    bool open = dec.t >= 0 ? room_open_time(p, r, dec.t) : room_open_stay(p, r);
    if (!open) continue;
    if (occ_total_[r] == 0 && !referenced_room_[r] && cap_[r] < 8) {
      // interchangeable with any other untouched unreferenced room of the
      // same capacity; keep only the first
      if (virgin_seen[cap_[r]]) continue;
      virgin_seen[cap_[r]] = true;
    }
    cands.push_back({r, candidate_key(p, r, dec.t), r != preferred});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.key != b.key ? a.key < b.key : a.away < b.away;
  });

  for (const Cand& cand : cands) {
    bool cap_ok = dec.t >= 0 ? place_time(p, cand.r, dec.t)
                             : place_stay(p, cand.r);
    bool feasible = cap_ok;
    if (feasible)
      feasible = dec.t >= 0 ? pools_ok_time(dec.t) : pools_ok_stay(d + 1, p);
    if (feasible) feasible = !stage_prune(d + 1);
    Walk w = Walk::Continue;
    if (feasible) w = dfs(d + 1);
    if (dec.t >= 0)
      unplace_time(p, cand.r, dec.t);
    else
      unplace_stay(p, cand.r);
    if (w == Walk::Stop) return Walk::Stop;
  }
  return Walk::Continue;
}

bool BnB::leaf_constraints_ok() const {
  for (int t = 0; t < W_; ++t) {
    if (smax_t_[t] >= 0 && fulfilled_[t] < smax_t_[t]) return false;
    if (wmin_t_[t] >= 0 && cap_acc_[t] > wmin_t_[t]) return false;
  }
  return true;
}

void BnB::record_leaf(bool& stop) {
  if (!leaf_constraints_ok()) return;
  for (int i = 0; i < stage_; ++i) {
    if (exact(kind_of(m_.objectives[i])) != pinned_[i]) return;
  }
  Score v = exact(stage_kind_);
  if (!have_best_ || (stage_min_ ? v < best_val_ : v > best_val_)) {
    have_best_ = true;
    best_val_ = v;
    snapshot();
  }
  if (stage_min_ && have_best_ && best_val_ <= stage_floor_) stop = true;
}

void BnB::snapshot() {
  best_room_of_ = room_of_;
  best_room_at_ = room_at_;
}

IpSolution BnB::extract(SolveStatus status) const {
  IpSolution sol;
  sol.status = status;
  sol.nodes = nodes_;
  sol.has_incumbent = true;

  // occupancy per (room, period) reconstructed from the snapshot
  std::vector<std::vector<int>> occ(static_cast<std::size_t>(R_) * W_);
  auto room_of_pt = [&](int p, int t) {
    return m_.stay_indexed ? best_room_of_[p] : best_room_at_[p * W_ + t];
  };
  for (int p = 0; p < P_; ++p)
    for (int t = arr_[p]; t < dis_[p]; ++t) occ[idx(room_of_pt(p, t), t)].push_back(p);

  sol.values.assign(m_.vars.size(), 0);
  for (std::size_t i = 0; i < m_.vars.size(); ++i) {
    const IpVar& v = m_.vars[i];
    int t = v.t - w0_;
    switch (v.family) {
      case IpVar::Family::X:
        if (m_.stay_indexed)
          sol.values[i] = best_room_of_[v.p] == v.r;
        else
          sol.values[i] = best_room_at_[v.p * W_ + t] == v.r;
        break;
      case IpVar::Family::Y:
        if (m_.stay_indexed)
          sol.values[i] = best_room_of_[v.p] == best_room_of_[v.q];
        else
          sol.values[i] =
              best_room_at_[v.p * W_ + t] == best_room_at_[v.q * W_ + t];
        break;
      case IpVar::Family::G: {
        bool fem = false;
        for (int p : occ[idx(v.r, t)]) fem = fem || is_female_[p];
        sol.values[i] = fem;
        break;
      }
      case IpVar::Family::S:
        sol.values[i] =
            room_of_pt(v.p, t) == v.r && occ[idx(v.r, t)].size() == 1;
        break;
      case IpVar::Family::D:
        sol.values[i] = best_room_at_[v.p * W_ + t] == v.r &&
                        best_room_at_[v.p * W_ + t + 1] != v.r;
        break;
    }
  }

  for (int p = 0; p < P_; ++p)
    for (int t = arr_[p]; t < dis_[p]; ++t)
      sol.assignment.set(m_.patients[p].id, t + w0_,
                         m_.rooms[room_of_pt(p, t)].id);
  return sol;
}

IpSolution BnB::solve() {
  // root: per-period packing feasibility over the window
  for (int t = 0; t < W_; ++t) {
    int f = 0, mcount = 0;
    for (int p = 0; p < P_; ++p)
      if (arr_[p] <= t && t < dis_[p]) (is_female_[p] ? f : mcount)++;
    if (f == 0 && mcount == 0) continue;
    if (!counts_feasible(m_.rooms, f, mcount)) {
      IpSolution sol;
      sol.status = SolveStatus::Infeasible;
      sol.failed_stage = 0;
      sol.nodes = 0;
      return sol;
    }
  }

  // root: forced prefix placements (T/U/V)
  bool root_ok = true;
  for (int p = 0; p < P_ && root_ok; ++p) {
    if (prefix_room_[p] < 0) continue;
    int r = prefix_room_[p];
    if (!room_open_stay(p, r)) {
      root_ok = false;
      break;
    }
    if (!place_stay(p, r)) root_ok = false;
  }
  if (root_ok) root_ok = root_checks();
  if (!root_ok) {
    IpSolution sol;
    sol.status = SolveStatus::Infeasible;
    sol.failed_stage = 0;
    sol.nodes = nodes_;
    return sol;
  }

  const int K = static_cast<int>(m_.objectives.size());
  pinned_.clear();
  std::vector<Score> reached;
  for (stage_ = 0; stage_ < K; ++stage_) {
    stage_kind_ = kind_of(m_.objectives[stage_]);
    stage_min_ = m_.objectives[stage_].sense == Sense::Min;
    // a minimized stage cannot beat its value at the root
    stage_floor_ = stage_min_ ? bound(stage_kind_, 0) : 0;
    if (stage_ == 0) {
      have_best_ = false;
    } else {
      // previous stage's solution stays feasible and seeds the incumbent
      have_best_ = true;
      best_val_ = eval_snapshot(stage_kind_);
    }
    Walk w = dfs(0);
    (void)w;
    if (timed_out_) {
      if (!have_best_) {
        IpSolution sol;
        sol.status = SolveStatus::TimeLimit;
        sol.has_incumbent = false;
        sol.failed_stage = stage_;
        sol.stage_values = reached;
        sol.nodes = nodes_;
        return sol;
      }
      reached.push_back(best_val_);
      IpSolution sol = extract(SolveStatus::TimeLimit);
      sol.stage_values = reached;
      sol.failed_stage = stage_;
      return sol;
    }
    if (!have_best_) {
      IpSolution sol;
      sol.status = SolveStatus::Infeasible;
      sol.failed_stage = stage_;
      sol.stage_values = reached;
      sol.nodes = nodes_;
      return sol;
    }
    pinned_.push_back(best_val_);
    reached.push_back(best_val_);
  }

  if (K == 0) {
    // no objectives: any leaf would do, but models always carry one
    IpSolution sol;
    sol.status = SolveStatus::Optimal;
    sol.nodes = nodes_;
    return sol;
  }
  IpSolution sol = extract(SolveStatus::Optimal);
  sol.stage_values = reached;
  return sol;
}

}  // namespace

IpSolution solve_lexicographic(const IpModel& model,
                               const SolveOptions& options) {
  BnB solver(model, options);
  return solver.solve();
}

namespace {

// Largest number of solo-occupied rooms when seating N same-sex patients
// into D doubles and S singles; -1 when they do not fit.
int max_solo(int N, int D, int S) {
  if (N > 2 * D + S) return -1;
  for (int z = std::min(N, D + S); z >= 0; --z) {
    int rest = N - z;
    if (rest % 2 != 0) continue;
    int pairs = rest / 2;
    int x_lo = std::max(0, z - S);
    int x_hi = std::min(D, z);
    if (x_lo <= x_hi && x_lo <= D - pairs) return z;
  }
  return -1;
}

}  // namespace

Score smax_for_counts(int singles, int doubles, int females, int males,
                      int female_requesters, int male_requesters) {
  Score best = -1;
  for (int df = 0; df <= doubles; ++df) {
    for (int sf = 0; sf <= singles; ++sf) {
      int zf = max_solo(females, df, sf);
      int zm = max_solo(males, doubles - df, singles - sf);
      if (zf < 0 || zm < 0) continue;
      Score v = std::min<Score>(female_requesters, zf) +
                std::min<Score>(male_requesters, zm);
      best = std::max(best, v);
    }
  }
  if (best < 0) throw InfeasibleError("no sex-separated packing exists");
  return best;
}

namespace {

Score smax_period(const std::vector<Room>& rooms,
                  const std::vector<Patient>& patients, int t) {
  int singles = 0, doubles = 0;
  for (const Room& r : rooms) {
    if (r.capacity == 1)
      ++singles;
    else if (r.capacity == 2)
      ++doubles;
    else
      throw UnsupportedCapacityError(
          "s^max supports capacities 1 and 2 only (room '" + r.id + "')");
  }
  int f = 0, m = 0, fr = 0, mr = 0;
  for (const Patient& p : patients) {
    if (!p.present(t)) continue;
    if (p.sex == Sex::F) {
      ++f;
      if (p.single_request) ++fr;
    } else {
      ++m;
      if (p.single_request) ++mr;
    }
  }
  return smax_for_counts(singles, doubles, f, m, fr, mr);
}

}  // namespace

Score compute_smax(const Instance& inst, int t) {
  inst.check_period(t);
  try {
    return smax_period(inst.rooms(), inst.patients(), t);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(
        "period " + std::to_string(t) + " infeasible: " + e.what(), t);
  }
}

std::vector<Score> smax_range_serial(const std::vector<Room>& rooms,
                                     const std::vector<Patient>& patients,
                                     int t_begin, int t_end) {
  std::vector<Score> out;
  for (int t = t_begin; t <= t_end; ++t) {
    try {
      out.push_back(smax_period(rooms, patients, t));
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(
          "period " + std::to_string(t) + " infeasible: " + e.what(), t);
    }
  }
  return out;
}

std::vector<Score> smax_range(const std::vector<Room>& rooms,
                              const std::vector<Patient>& patients,
                              int t_begin, int t_end) {
#ifdef _OPENMP
  const int count = t_end - t_begin + 1;
  if (count <= 0) return {};
  std::vector<Score> out(count, 0);
  int infeasible_at = -1;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      out[i] = smax_period(rooms, patients, t_begin + i);
    } catch (const InfeasibleError&) {
#pragma omp critical
      {
        if (infeasible_at < 0 || t_begin + i < infeasible_at)
          infeasible_at = t_begin + i;
      }
    }
  }
  if (infeasible_at >= 0)
    throw InfeasibleError(
        "period " + std::to_string(infeasible_at) + " infeasible",
        infeasible_at);
  return out;
#else
  return smax_range_serial(rooms, patients, t_begin, t_end);
#endif
}

}  // namespace pra
