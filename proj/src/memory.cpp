#include "seqec/memory.hpp"

#include <algorithm>
#include <bit>
#include <fmt/format.h>
#include <ostream>
#include <string>

#include "seqec/error.hpp"

namespace seqec {

void validate_couplet(const Couplet& couplet, std::size_t action_count) {
  require(couplet.action < action_count,
          "couplet action " + std::to_string(couplet.action) + " outside [0, " +
              std::to_string(action_count) + ")");
  for (double v : couplet.state) {
    require(v >= 0.0 && v <= 1.0, "couplet state component outside [0,1]");
  }
}

std::size_t StateHash::operator()(const StateVector& state) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : state) {
    h ^= std::bit_cast<std::uint64_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------

ShortTermBuffer::ShortTermBuffer(std::size_t capacity) : capacity_(capacity) {
  require(capacity > 0, "short-term buffer capacity must be positive");
}

void ShortTermBuffer::push(Couplet c) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(c));
}

std::vector<Couplet> ShortTermBuffer::drain() {
  std::vector<Couplet> out(std::make_move_iterator(entries_.begin()),
                           std::make_move_iterator(entries_.end()));
  entries_.clear();
  return out;
}

// ---------------------------------------------------------------------------

BiasState::BiasState(std::size_t count, std::uint64_t generation)
    : values_(count, 1.0), generation_(generation) {}

void BiasState::decay(double amount) {
  require(amount >= 0.0, "bias decay must be non-negative");
  double new_max = 1.0;
  for (std::size_t k = 0; k < active_.size();) {
    double& v = values_[active_[k]];
    v -= amount;
    // Rounding residue below a billionth of a step counts as reaching the floor.
    if (v - 1.0 <= amount * 1e-9) v = 1.0;
    if (v > 1.0) {
      new_max = std::max(new_max, v);
      ++k;
    } else {
      active_[k] = active_.back();
      active_.pop_back();
    }
  }
  max_ = new_max;
}

void BiasState::raise(std::size_t index, double increase) {
  double& v = values_[index];
  const bool was_raised = v > 1.0;
  v += increase;
  if (!was_raised && v > 1.0) active_.push_back(index);
  max_ = std::max(max_, v);
}

void BiasState::reinforce(std::span<const std::size_t> matched, const MemoryView& view,
                          double increase) {
  require(increase >= 0.0, "bias increase must be non-negative");
  require(view.generation == generation_ && view.size() == values_.size(),
          "bias reinforce called with a stale memory view");
  for (std::size_t i : matched) {
    require(i < view.size(), "matched index outside the memory view");
    const CoupletView& cv = view[i];
    if (cv.position + 1 < cv.seq_length) raise(i + 1, increase);
  }
}

void BiasState::append_ones(std::size_t count) { values_.insert(values_.end(), count, 1.0); }

void BiasState::erase_front(std::size_t count) {
  count = std::min(count, values_.size());
  values_.erase(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count));
  active_.clear();
  max_ = 1.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 1.0) {
      active_.push_back(i);
      max_ = std::max(max_, values_[i]);
    }
  }
}

// ---------------------------------------------------------------------------

EpisodicMemory::EpisodicMemory(std::size_t capacity, Retention retention)
    : capacity_(capacity), retention_(retention) {
  require(capacity > 0, "episodic memory capacity must be positive");
}

StoreResult EpisodicMemory::store(std::vector<Couplet> couplets, double reward) {
  require(!couplets.empty(), "cannot store an empty sequence");
  require(reward > 0.0, "stored sequences must carry a positive reward");

  StoreResult result = StoreResult::Stored;
  if (full()) {
    if (retention_ == Retention::Fixed) return StoreResult::RejectedFull;
    bias_.erase_front(sequences_.front().couplets.size());
    sequences_.pop_front();
    result = StoreResult::StoredWithEviction;
  }

  const std::size_t length = couplets.size();
  sequences_.push_back(Sequence{std::move(couplets), reward, next_insertion_index_++});
  bias_.append_ones(length);
  rebuild();
  return result;
}

void EpisodicMemory::rebuild() {
  ++generation_;
  view_.generation = generation_;
  view_.entries.clear();
  groups_.clear();
  group_of_.clear();

  std::unordered_map<StateVector, std::size_t, StateHash> group_ids;
  for (const Sequence& seq : sequences_) {
    const std::size_t length = seq.couplets.size();
    for (std::size_t pos = 0; pos < length; ++pos) {
      const Couplet& c = seq.couplets[pos];
      const std::size_t flat = view_.entries.size();
      view_.entries.push_back(
          CoupletView{flat, &c, seq.insertion_index, pos, length, seq.reward});

      auto [it, inserted] = group_ids.try_emplace(c.state, groups_.size());
      if (inserted) groups_.push_back(StateGroup{c.state, {}});
      groups_[it->second].flat_indices.push_back(flat);
      group_of_.push_back(it->second);
    }
  }
  bias_.set_generation(generation_);
}

void EpisodicMemory::dump(std::ostream& out) const {
  for (const Sequence& seq : sequences_) {
    out << fmt::format("sequence {} reward {} length {}\n", seq.insertion_index, seq.reward,
                       seq.couplets.size());
    for (const Couplet& c : seq.couplets) {
      for (double v : c.state) out << fmt::format("{},", v);
      out << c.action << '\n';
    }
  }
}

}  // namespace seqec
