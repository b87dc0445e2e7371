#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fvg::adjoint {

/// Binomial checkpointing for a reverse sweep over n steps, where step k maps state k to
/// state k + 1. State 0 always occupies one of the s snapshot slots.
///
/// The forward sweep runs every step once (it produces the loss), storing snapshots on the way;
/// the reverse sweep re-records each step from its input state and recomputes missing states
/// from the nearest snapshot. Recomputation counts only those extra advances.

/// Maximal number of steps reversible with s snapshots when no step is advanced more than r
/// times: C(s + r, s).
std::uint64_t max_steps(int s, int r);

/// Minimal recomputed steps when state a is stored and every advance counts (classic revolve).
std::uint64_t revolve_cost(std::uint64_t n, int s);

/// Minimal recomputed steps when the advances of the initial forward sweep are free.
std::uint64_t sweep_cost(std::uint64_t n, int s);

struct CheckpointAction {
  enum class Kind { Store, Free, Restore, Advance, Reverse };
  Kind kind;
  std::size_t from = 0;  // state index (Store/Free/Restore/Reverse: the state; Advance: start)
  std::size_t to = 0;    // Advance: end state
  bool sweep = false;    // part of the initial forward sweep
};

struct CheckpointPlan {
  std::size_t n_steps = 0;
  int snapshots = 0;
  std::vector<CheckpointAction> actions;
  std::uint64_t recomputed_steps = 0;  // advances outside the forward sweep
  std::size_t peak_stored = 0;

  /// Snapshot positions written during the forward sweep, ascending (always starts with 0).
  std::vector<std::size_t> sweep_snapshots() const;
};

/// Optimal schedule for n steps and s slots. Throws InvalidBudget for s < 1.
CheckpointPlan plan_checkpoints(std::size_t n_steps, int snapshots);
/// Schedule with the default budget ceil(sqrt(n)).
CheckpointPlan plan_checkpoints(std::size_t n_steps);

/// ceil(sqrt(n)), at least 1.
int default_snapshots(std::size_t n_steps);

std::string to_string(const CheckpointAction& a);

}  // namespace fvg::adjoint
