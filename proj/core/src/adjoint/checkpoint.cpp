#include "fvgraph/adjoint/checkpoint.hpp"

#include <algorithm>
#include <cmath>

#include "fvgraph/common/error.hpp"

namespace fvg::adjoint {

namespace {

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact: r * (n-k+i) is divisible by i at every stage
  }
  return r;
}

/// Cost tables for n' <= n: sweep_cost and its optimal first split, per slot count.
struct SweepTable {
  std::vector<std::vector<std::uint64_t>> cost;  // [s][n]
  std::vector<std::vector<std::size_t>> split;   // [s][n], 0 when n <= 1 or s == 1

  SweepTable(std::size_t n, int s) : cost(static_cast<std::size_t>(s) + 1), split(static_cast<std::size_t>(s) + 1) {
    for (int k = 1; k <= s; ++k) {
      auto& c = cost[static_cast<std::size_t>(k)];
      auto& m = split[static_cast<std::size_t>(k)];
      c.assign(n + 1, 0);
      m.assign(n + 1, 0);
      for (std::size_t len = 2; len <= n; ++len) {
        if (k == 1) {
          c[len] = revolve_cost(len, 1);
          continue;
        }
        const auto& prev = cost[static_cast<std::size_t>(k) - 1];
        // g(m) = prev[len - m] + revolve_cost(m, k) is convex in m; bisect on its forward difference.
        auto g = [&](std::size_t mm) { return prev[len - mm] + revolve_cost(mm, k); };
        std::size_t lo = 1, hi = len - 1;
        while (lo < hi) {
          const std::size_t mid = lo + (hi - lo) / 2;
          if (g(mid + 1) < g(mid)) lo = mid + 1;
          else hi = mid;
        }
        c[len] = g(lo);
        m[len] = lo;
      }
    }
  }
};

std::size_t revolve_split(std::uint64_t n, int s) {
  // cost(m) = m + revolve(n - m, s - 1) + revolve(m, s) is convex in m
  std::size_t lo = 1, hi = static_cast<std::size_t>(n) - 1;
  auto g = [&](std::size_t m) { return m + revolve_cost(n - m, s - 1) + revolve_cost(m, s); };
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (g(mid + 1) < g(mid)) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

class Builder {
 public:
  Builder(CheckpointPlan& plan, const SweepTable& table) : plan_(plan), table_(table) {}

  void emit(CheckpointAction::Kind kind, std::size_t from, std::size_t to = 0, bool sweep = false) {
    plan_.actions.push_back({kind, from, to, sweep});
    if (kind == CheckpointAction::Kind::Store) {
      ++stored_;
      plan_.peak_stored = std::max(plan_.peak_stored, stored_);
    } else if (kind == CheckpointAction::Kind::Free) {
      --stored_;
    } else if (kind == CheckpointAction::Kind::Advance && !sweep) {
      plan_.recomputed_steps += to - from;
    }
  }

  /// Reverses steps [a, b) with state a stored and s slots in use including it.
  void reverse(std::size_t a, std::size_t b, int s, bool sweep) {
    using K = CheckpointAction::Kind;
    const std::size_t n = b - a;
    if (n == 1) {
      if (!sweep) emit(K::Restore, a);
      emit(K::Reverse, a);
      return;
    }
    if (s == 1) {
      for (std::size_t k = b; k-- > a;) {
        emit(K::Restore, a);
        if (k > a) emit(K::Advance, a, k);
        emit(K::Reverse, k);
      }
      return;
    }
    const std::size_t m = sweep ? table_.split[static_cast<std::size_t>(s)][n] : revolve_split(n, s);
    const std::size_t c = a + m;
    if (!sweep) emit(K::Restore, a);
    emit(K::Advance, a, c, sweep);
    emit(K::Store, c, 0, sweep);
    reverse(c, b, s - 1, sweep);
    emit(K::Free, c);
    reverse(a, c, s, false);
  }

 private:
  CheckpointPlan& plan_;
  const SweepTable& table_;
  std::size_t stored_ = 0;
};

}  // namespace

std::uint64_t max_steps(int s, int r) {
  if (s < 1 || r < 0) fail(ErrorCode::InvalidBudget, "snapshot budget and repetitions must be positive");
  return binom(static_cast<std::uint64_t>(s + r), static_cast<std::uint64_t>(s));
}

std::uint64_t revolve_cost(std::uint64_t n, int s) {
  if (s < 1) fail(ErrorCode::InvalidBudget, "snapshot budget must be at least 1");
  if (n <= 1) return 0;
  const auto su = static_cast<std::uint64_t>(s);
  std::uint64_t r = 0;
  while (binom(su + r, su) < n) ++r;
  return r * n - binom(su + r, su + 1);
}

std::uint64_t sweep_cost(std::uint64_t n, int s) {
  if (s < 1) fail(ErrorCode::InvalidBudget, "snapshot budget must be at least 1");
  if (n <= 1) return 0;
  if (static_cast<std::uint64_t>(s) >= n) return 0;
  const SweepTable t(static_cast<std::size_t>(n), s);
  return t.cost[static_cast<std::size_t>(s)][static_cast<std::size_t>(n)];
}

int default_snapshots(std::size_t n_steps) {
  if (n_steps <= 1) return 1;
  auto s = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_steps)));
  while (s * s < n_steps) ++s;
  while (s > 1 && (s - 1) * (s - 1) >= n_steps) --s;
  return static_cast<int>(s);
}

CheckpointPlan plan_checkpoints(std::size_t n_steps) { return plan_checkpoints(n_steps, default_snapshots(n_steps)); }

CheckpointPlan plan_checkpoints(std::size_t n_steps, int snapshots) {
  if (snapshots < 1) fail(ErrorCode::InvalidBudget, "snapshot budget must be at least 1, got " + std::to_string(snapshots));
  CheckpointPlan plan;
  plan.n_steps = n_steps;
  plan.snapshots = snapshots;
  if (n_steps == 0) return plan;
  // More slots than steps never helps.
  const int s = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(snapshots), n_steps));
  const SweepTable table(n_steps, s);
  Builder b(plan, table);
  b.emit(CheckpointAction::Kind::Store, 0, 0, true);
  b.reverse(0, n_steps, s, true);
  b.emit(CheckpointAction::Kind::Free, 0);
  return plan;
}

std::vector<std::size_t> CheckpointPlan::sweep_snapshots() const {
  std::vector<std::size_t> out;
  for (const auto& a : actions) {
    if (a.kind == CheckpointAction::Kind::Store && a.sweep) out.push_back(a.from);
  }
  return out;
}

std::string to_string(const CheckpointAction& a) {
  using K = CheckpointAction::Kind;
  const std::string tag = a.sweep ? " (sweep)" : "";
  switch (a.kind) {
    case K::Store: return "store " + std::to_string(a.from) + tag;
    case K::Free: return "free " + std::to_string(a.from);
    case K::Restore: return "restore " + std::to_string(a.from);
    case K::Advance: return "advance " + std::to_string(a.from) + " -> " + std::to_string(a.to) + tag;
    case K::Reverse: return "reverse " + std::to_string(a.from);
  }
  return "?";
}

}  // namespace fvg::adjoint
