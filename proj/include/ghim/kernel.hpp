#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

namespace ghim {

/// Virtual time in integer milliseconds since scenario start.
using Millis = std::int64_t;

/// Unique, totally ordered actor identifier. A default-constructed id is the
/// "unset" value; every id built from text must be non-empty.
class ActorId {
 public:
  ActorId() = default;
  explicit ActorId(std::string id);

  const std::string& str() const noexcept { return id_; }
  bool empty() const noexcept { return id_.empty(); }

  friend auto operator<=>(const ActorId&, const ActorId&) = default;
  friend bool operator==(const ActorId&, const ActorId&) = default;

 private:
  std::string id_;
};

/// Logical clock with an ordered timer queue. Time moves only through
/// `advance`/`advance_to`; timers due inside the window fire in timestamp
/// order, ties by registration order, with `now()` set to the timer's stamp.
class VirtualClock {
 public:
  using Callback = std::function<void()>;
  using TimerId = std::uint64_t;

  Millis now() const noexcept { return now_; }

  TimerId schedule_at(Millis at, Callback callback);
  TimerId schedule_after(Millis delay, Callback callback) { return schedule_at(now_ + delay, std::move(callback)); }
  bool cancel(TimerId id);

  void advance(Millis delta);
  void advance_to(Millis target);

  std::optional<Millis> next_due() const;
  std::size_t pending() const noexcept { return timers_.size(); }

 private:
  using Key = std::pair<Millis, TimerId>;

  Millis now_ = 0;
  TimerId next_id_ = 1;
  std::map<Key, Callback> timers_;
  std::unordered_map<TimerId, Millis> due_of_;
};

/// Mixes a root seed with a text label into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

/// Deterministic random stream identified by (root seed, label). Substreams are
/// derived from the root seed and the extended label only, so draws on one
/// stream never perturb another.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0, std::string label = {});

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& label() const noexcept { return label_; }

  SeededRng substream(std::string_view label) const;

  std::uint64_t next_u64();
  /// Uniform real in [0, 1) with 53 bits of resolution.
  double next_uniform();
  /// Uniform integer in [lo, hi], unbiased.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal draw (Box-Muller on two uniforms).
  double next_normal();
  bool bernoulli(double p);
  void fill(std::span<std::uint8_t> out);

 private:
  std::uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

/// Per-prefix counters producing ids such as "auc-1", "auc-2", "inv-1".
class IdGenerator {
 public:
  std::string next(std::string_view prefix);

 private:
  std::map<std::string, std::uint64_t, std::less<>> counters_;
};

}  // namespace ghim

template <>
struct std::hash<ghim::ActorId> {
  std::size_t operator()(const ghim::ActorId& id) const noexcept { return std::hash<std::string>{}(id.str()); }
};
