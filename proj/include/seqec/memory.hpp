#pragma once

// Short-term event buffer, long-term episodic store of rewarded sequences and
// the per-couplet sequential bias that rides along with it.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

namespace seqec {

using ActionId = std::size_t;
using StateVector = std::vector<double>;

/// One state-action event.
struct Couplet {
  StateVector state;
  ActionId action = 0;

  friend bool operator==(const Couplet&, const Couplet&) = default;
};

/// Throws ContractViolation unless every component is in [0,1] and
/// action < action_count.
void validate_couplet(const Couplet& couplet, std::size_t action_count);

/// Hash over the exact bit patterns of a state vector.
struct StateHash {
  std::size_t operator()(const StateVector& state) const noexcept;
};

/// Fixed-length FIFO of the most recent couplets of the current episode.
class ShortTermBuffer {
 public:
  explicit ShortTermBuffer(std::size_t capacity = 50);

  /// Appends c; evicts the oldest entry when already at capacity.
  void push(Couplet c);

  /// Returns the contents in insertion order and leaves the buffer empty.
  std::vector<Couplet> drain();

  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const std::deque<Couplet>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::deque<Couplet> entries_;
};

struct Sequence {
  std::vector<Couplet> couplets;
  double reward = 0.0;
  std::uint64_t insertion_index = 0;
};

enum class Retention { Fixed, Fifo };

/// Flat addressing of one stored couplet. `couplet` points into the owning
/// EpisodicMemory and is valid until that memory next mutates.
struct CoupletView {
  std::size_t flat_index = 0;
  const Couplet* couplet = nullptr;
  std::uint64_t seq_id = 0;
  std::size_t position = 0;
  std::size_t seq_length = 0;
  double seq_reward = 0.0;
};

/// Snapshot of the flat couplet ordering, stamped with the memory generation
/// it was built for.
struct MemoryView {
  std::uint64_t generation = 0;
  std::vector<CoupletView> entries;

  std::size_t size() const { return entries.size(); }
  const CoupletView& operator[](std::size_t i) const { return entries[i]; }
};

/// Sequential bias: one multiplier >= 1 per stored couplet, aligned with the
/// memory's flat indexing. Entries above 1 are tracked in an active list so
/// that decay only touches values that can change.
class BiasState {
 public:
  BiasState() = default;
  explicit BiasState(std::size_t count, std::uint64_t generation = 0);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::uint64_t generation() const { return generation_; }

  /// Largest value currently held (1 when nothing is raised).
  double max_value() const { return max_; }
  /// Number of values strictly above 1.
  std::size_t raised_count() const { return active_.size(); }

  /// Every value v > 1 becomes max(1, v - amount). amount must be >= 0.
  void decay(double amount);

  /// For each matched couplet that has a successor in its sequence, raises
  /// the successor's bias by `increase`. The view must be the one this bias
  /// is currently aligned with.
  void reinforce(std::span<const std::size_t> matched, const MemoryView& view,
                 double increase);

  // Alignment hooks driven by EpisodicMemory.
  void append_ones(std::size_t count);
  void erase_front(std::size_t count);
  void set_generation(std::uint64_t generation) { generation_ = generation; }

 private:
  void raise(std::size_t index, double increase);

  std::vector<double> values_;
  std::vector<std::size_t> active_;
  double max_ = 1.0;
  std::uint64_t generation_ = 0;
};

enum class StoreResult { Stored, StoredWithEviction, RejectedFull };

/// Long-term store of rewarded sequences with a bounded sequence count.
///
/// Fixed retention refuses new sequences once full; Fifo retention evicts the
/// sequence with the smallest insertion index to make room. Every accepted
/// store or eviction bumps the generation, rebuilds the flat view, and keeps
/// the bias aligned (new couplets start at exactly 1).
///
/// Stored couplets are also grouped by identical state vector so that a
/// similarity scan only evaluates each distinct state once.
class EpisodicMemory {
 public:
  struct StateGroup {
    StateVector state;
    std::vector<std::size_t> flat_indices;  // ascending
  };

  explicit EpisodicMemory(std::size_t capacity = 500,
                          Retention retention = Retention::Fixed);

  /// Throws ContractViolation for an empty couplet list or reward <= 0.
  StoreResult store(std::vector<Couplet> couplets, double reward);

  const std::deque<Sequence>& sequences() const { return sequences_; }
  std::size_t size() const { return sequences_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return sequences_.size() >= capacity_; }
  Retention retention() const { return retention_; }
  std::size_t couplet_count() const { return view_.entries.size(); }
  std::uint64_t generation() const { return generation_; }

  const MemoryView& view() const { return view_; }
  const std::vector<StateGroup>& state_groups() const { return groups_; }
  /// Index into state_groups() for each flat couplet index.
  std::span<const std::size_t> group_of() const { return group_of_; }

  BiasState& bias() { return bias_; }
  const BiasState& bias() const { return bias_; }

  /// Line-oriented text dump: a `sequence` header line per record followed by
  /// one CSV line per couplet (state components, then action).
  void dump(std::ostream& out) const;

 private:
  void rebuild();

  std::size_t capacity_;
  Retention retention_;
  std::deque<Sequence> sequences_;
  std::uint64_t next_insertion_index_ = 0;
  std::uint64_t generation_ = 0;
  MemoryView view_;
  std::vector<StateGroup> groups_;
  std::vector<std::size_t> group_of_;
  BiasState bias_;
};

}  // namespace seqec
