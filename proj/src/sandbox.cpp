#include "ghim/sandbox.hpp"

namespace ghim {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::agent: return "agent";
    case Role::human: return "human";
    case Role::observer: return "observer";
    case Role::admin: return "admin";
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
  if (text == "agent") return Role::agent;
  if (text == "human") return Role::human;
  if (text == "observer") return Role::observer;
  if (text == "admin") return Role::admin;
  return std::nullopt;
}

Sandbox::Sandbox(std::uint64_t seed, AuctionOptions options)
    : seed_(seed),
      bus_(clock_, SeededRng(seed, "bus"), &log_),
      payments_(clock_, SeededRng(seed, "payments"), &log_),
      engine_(clock_, bus_, payments_, log_, options) {}

void Sandbox::add_actor(const ActorId& id, Money funds, LinkPolicy policy) {
  payments_.register_actor(id, funds);
  bus_.create_node(id, policy);
}

void Sandbox::ensure_actor(const ActorId& id, LinkPolicy policy) {
  if (!payments_.is_registered(id)) payments_.register_actor(id);
  if (!bus_.has_node(id)) bus_.create_node(id, policy);
}

bool Sandbox::has_actor(const ActorId& id) const { return payments_.is_registered(id) && bus_.has_node(id); }

}  // namespace ghim
