#include "ghim/kernel.hpp"

#include <cmath>
#include <numbers>

#include "ghim/error.hpp"
#include "ghim/money.hpp"

namespace ghim {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::not_found: return "not_found";
    case Errc::duplicate: return "duplicate";
    case Errc::insufficient_funds: return "insufficient_funds";
    case Errc::overflow: return "overflow";
    case Errc::invalid_state: return "invalid_state";
    case Errc::no_route: return "no_route";
    case Errc::expired: return "expired";
    case Errc::forbidden: return "forbidden";
    case Errc::io: return "io";
    case Errc::rejected: return "rejected";
  }
  return "unknown";
}

// ---------------------------------------------------------------- Money

Money money_add(Money a, Money b) {
  if (b.msat() > Money::max().msat() - a.msat()) {
    throw Error(Errc::overflow, "money overflow: " + to_string(a) + " + " + to_string(b));
  }
  return Money::msat(a.msat() + b.msat());
}

Money money_sub(Money a, Money b) {
  if (b > a) {
    throw Error(Errc::insufficient_funds, "money underflow: " + to_string(a) + " - " + to_string(b));
  }
  return Money::msat(a.msat() - b.msat());
}

Money& Money::operator+=(Money other) { return *this = money_add(*this, other); }
Money& Money::operator-=(Money other) { return *this = money_sub(*this, other); }

Money money_from_real(double msat) {
  if (!std::isfinite(msat) || msat < 0) {
    throw Error(Errc::invalid_argument, "amount must be a finite non-negative number");
  }
  const double rounded = std::round(msat);
  // 2^64 is exactly representable; anything at or above it does not fit.
  if (rounded >= 18446744073709551616.0) {
    throw Error(Errc::overflow, "amount exceeds representable msat range");
  }
  return Money::msat(static_cast<Money::rep>(rounded));
}

std::string to_string(Money m) { return std::to_string(m.msat()) + " msat"; }

std::ostream& operator<<(std::ostream& os, Money m) { return os << to_string(m); }

// ---------------------------------------------------------------- ActorId

ActorId::ActorId(std::string id) : id_(std::move(id)) {
  if (id_.empty()) {
    throw Error(Errc::invalid_argument, "actor id must be non-empty");
  }
}

// ---------------------------------------------------------------- VirtualClock

VirtualClock::TimerId VirtualClock::schedule_at(Millis at, Callback callback) {
  if (at < now_) {
    throw Error(Errc::invalid_argument,
                "timer at " + std::to_string(at) + " ms is before now (" + std::to_string(now_) + " ms)");
  }
  const TimerId id = next_id_++;
  timers_.emplace(Key{at, id}, std::move(callback));
  due_of_.emplace(id, at);
  return id;
}

bool VirtualClock::cancel(TimerId id) {
  const auto it = due_of_.find(id);
  if (it == due_of_.end()) return false;
  timers_.erase(Key{it->second, id});
  due_of_.erase(it);
  return true;
}

void VirtualClock::advance(Millis delta) {
  if (delta < 0) {
    throw Error(Errc::invalid_argument, "cannot advance the clock by a negative delta");
  }
  advance_to(now_ + delta);
}

void VirtualClock::advance_to(Millis target) {
  if (target < now_) {
    throw Error(Errc::invalid_argument, "cannot move the clock backwards");
  }
  while (!timers_.empty() && timers_.begin()->first.first <= target) {
    auto node = timers_.extract(timers_.begin());
    due_of_.erase(node.key().second);
    now_ = node.key().first;
    node.mapped()();
  }
  now_ = target;
}

std::optional<Millis> VirtualClock::next_due() const {
  if (timers_.empty()) return std::nullopt;
  return timers_.begin()->first.first;
}

// ---------------------------------------------------------------- SeededRng

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  return splitmix64(splitmix64(root) ^ splitmix64(fnv1a(label)));
}

SeededRng::SeededRng(std::uint64_t seed, std::string label)
    : seed_(seed), label_(std::move(label)), engine_(derive_seed(seed_, label_)) {}

SeededRng SeededRng::substream(std::string_view label) const {
  std::string full = label_;
  if (!full.empty()) full += '/';
  full += label;
  return SeededRng(seed_, std::move(full));
}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::next_uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SeededRng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw Error(Errc::invalid_argument, "uniform_int: lo > hi");
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return engine_();
  const std::uint64_t range = span + 1;
  // Reject the top partial bucket so every value is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return lo + x % range;
}

std::int64_t SeededRng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw Error(Errc::invalid_argument, "uniform_int: lo > hi");
  const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + uniform_int(std::uint64_t{0}, span));
}

double SeededRng::next_normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool SeededRng::bernoulli(double p) { return next_uniform() < p; }

void SeededRng::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = engine_();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(word & 0xFF);
      word >>= 8;
    }
  }
}

// ---------------------------------------------------------------- IdGenerator

std::string IdGenerator::next(std::string_view prefix) {
  auto it = counters_.find(prefix);
  if (it == counters_.end()) it = counters_.emplace(std::string(prefix), 0).first;
  return std::string(prefix) + "-" + std::to_string(++it->second);
}

}  // namespace ghim
