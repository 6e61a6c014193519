#include <catch2/catch_amalgamated.hpp>

#include "ghim/error.hpp"
#include "ghim/payment.hpp"
#include "sha256_ref.hpp"

using namespace ghim;

namespace {

const ActorId A("A"), B("B"), C("C"), D("D");

struct Net {
  VirtualClock clock;
  EventLog log;
  PaymentNetwork pn{clock, SeededRng(5, "payments"), &log};

  Net() {
    for (const auto& id : {A, B, C, D}) pn.register_actor(id, Money::msat(1'000'000));
  }
};

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::io;
}

}  // namespace

TEST_CASE("channel opening splits capacity by push") {
  Net n;
  const auto c1 = n.pn.open_channel(A, B, Money::msat(100000), Money::zero());
  CHECK(n.pn.channel(c1).balance_a.msat() == 100000);
  CHECK(n.pn.channel(c1).balance_b.msat() == 0);
  const auto c2 = n.pn.open_channel(A, B, Money::msat(100000), Money::msat(100000));
  CHECK(n.pn.channel(c2).balance_a.msat() == 0);
  CHECK(n.pn.channel(c2).balance_b.msat() == 100000);
  CHECK_THROWS_AS(n.pn.open_channel(A, B, Money::msat(100000), Money::msat(100001)), Error);
  CHECK(n.pn.onchain_balance(A).msat() == 800000);
  n.pn.check_invariants();
}

TEST_CASE("opening beyond on-ledger funds fails and changes nothing") {
  Net n;
  CHECK(code_of([&] { n.pn.open_channel(A, B, Money::msat(2'000'000), Money::zero()); }) == Errc::insufficient_funds);
  CHECK(n.pn.channels().empty());
  CHECK(n.pn.onchain_balance(A).msat() == 1'000'000);
}

TEST_CASE("invoices need a positive amount and a future expiry") {
  Net n;
  CHECK_THROWS_AS(n.pn.create_invoice(B, Money::zero(), false, "", 1000), Error);
  n.clock.advance(50);
  CHECK_THROWS_AS(n.pn.create_invoice(B, Money::msat(1), false, "", 50), Error);
}

TEST_CASE("payment hash is the SHA-256 of the retained preimage") {
  Net n;
  for (int i = 0; i < 20; ++i) {
    const auto inv = n.pn.create_invoice(B, Money::msat(10 + i), i % 2 == 0, "m", 10'000);
    const auto pre = n.pn.preimage_of(B, inv.invoice_id);
    CHECK(test::sha256_ref(pre.data(), pre.size()) == inv.payment_hash);
  }
  const auto inv = n.pn.create_invoice(B, Money::msat(10), false, "", 10'000);
  CHECK_THROWS_AS(n.pn.preimage_of(A, inv.invoice_id), Error);
}

TEST_CASE("direct non-hold payment shifts balances") {
  Net n;
  const auto c = n.pn.open_channel(A, B, Money::msat(100000), Money::zero());
  const auto inv = n.pn.create_invoice(B, Money::msat(40000), false, "", 10'000);
  const auto r = n.pn.pay_invoice(A, inv.invoice_id);
  CHECK(r.route.hops.size() == 1);
  CHECK(r.state == InvoiceState::settled);
  CHECK(n.pn.channel(c).balance_a.msat() == 60000);
  CHECK(n.pn.channel(c).balance_b.msat() == 40000);
  CHECK(n.pn.spendable_balance(A).msat() == 60000);
  CHECK_THROWS_AS(n.pn.pay_invoice(A, inv.invoice_id), Error);
}

TEST_CASE("hold payment locks then settles with the right preimage") {
  Net n;
  const auto c = n.pn.open_channel(A, B, Money::msat(100000), Money::zero());
  const auto inv = n.pn.create_invoice(B, Money::msat(10000), true, "", 10'000);
  n.pn.pay_invoice(A, inv.invoice_id);
  CHECK(n.pn.invoice(inv.invoice_id).state == InvoiceState::in_flight);
  CHECK(n.pn.spendable_balance(A).msat() == 90000);
  CHECK(n.pn.spendable_balance(B).msat() == 0);
  CHECK(n.pn.channel(c).held().msat() == 10000);

  Preimage wrong{};
  CHECK_THROWS_AS(n.pn.settle_hold(B, wrong), Error);
  CHECK(n.pn.invoice(inv.invoice_id).state == InvoiceState::in_flight);

  n.pn.settle_hold(B, n.pn.preimage_of(B, inv.invoice_id));
  CHECK(n.pn.invoice(inv.invoice_id).state == InvoiceState::settled);
  CHECK(n.pn.channel(c).balance_b.msat() == 10000);
  CHECK(n.pn.channel(c).held().is_zero());
  n.pn.check_invariants();
}

TEST_CASE("cancel restores balances exactly and is final") {
  Net n;
  const auto c = n.pn.open_channel(A, C, Money::msat(50000), Money::msat(20000));
  n.pn.open_channel(C, B, Money::msat(50000), Money::zero());
  const auto before_a = n.pn.channel(c).balance_a;
  const auto before_b = n.pn.channel(c).balance_b;
  const auto inv = n.pn.create_invoice(B, Money::msat(7000), true, "", 10'000);
  n.pn.pay_invoice(A, inv.invoice_id);
  n.pn.cancel_hold(B, inv.payment_hash);
  CHECK(n.pn.channel(c).balance_a == before_a);
  CHECK(n.pn.channel(c).balance_b == before_b);
  CHECK(n.pn.invoice(inv.invoice_id).state == InvoiceState::cancelled);
  CHECK_THROWS_AS(n.pn.cancel_hold(B, inv.payment_hash), Error);
  CHECK_THROWS_AS(n.pn.settle_hold(B, n.pn.preimage_of(B, inv.invoice_id)), Error);
  n.pn.check_invariants();
}

TEST_CASE("route falls back to two hops when the direct side is short") {
  Net n;
  n.pn.open_channel(A, B, Money::msat(1000), Money::zero());
  n.pn.open_channel(A, C, Money::msat(9000), Money::zero());
  n.pn.open_channel(C, B, Money::msat(9000), Money::zero());
  CHECK(n.pn.find_route(A, B, Money::msat(500)).hops.size() == 1);
  const auto r = n.pn.find_route(A, B, Money::msat(5000));
  CHECK(r.nodes == std::vector<ActorId>{A, C, B});
  CHECK(code_of([&] { n.pn.find_route(A, D, Money::msat(1)); }) == Errc::no_route);
}

TEST_CASE("equal-hop routes pick the smallest node sequence") {
  Net n;
  n.pn.open_channel(A, D, Money::msat(9000), Money::zero());
  n.pn.open_channel(D, B, Money::msat(9000), Money::zero());
  n.pn.open_channel(A, C, Money::msat(9000), Money::zero());
  n.pn.open_channel(C, B, Money::msat(9000), Money::zero());
  CHECK(n.pn.find_route(A, B, Money::msat(100)).nodes == std::vector<ActorId>{A, C, B});
}

TEST_CASE("multi-hop settle moves funds along every hop") {
  Net n;
  const auto ac = n.pn.open_channel(A, C, Money::msat(9000), Money::zero());
  const auto cb = n.pn.open_channel(C, B, Money::msat(9000), Money::zero());
  const auto inv = n.pn.create_invoice(B, Money::msat(4000), true, "", 10'000);
  n.pn.pay_invoice(A, inv.invoice_id);
  n.pn.settle_hold(B, n.pn.preimage_of(B, inv.invoice_id));
  CHECK(n.pn.channel(ac).balance_b.msat() == 4000);
  CHECK(n.pn.channel(cb).balance_b.msat() == 4000);
  CHECK(n.pn.spendable_balance(C).msat() == 9000);
}

TEST_CASE("expired hold invoices cancel and release") {
  Net n;
  const auto c = n.pn.open_channel(A, B, Money::msat(10000), Money::zero());
  const auto inv = n.pn.create_invoice(B, Money::msat(3000), true, "", 100);
  n.pn.pay_invoice(A, inv.invoice_id);
  n.clock.advance(100);
  CHECK(n.pn.expire_due() == 1);
  CHECK(n.pn.channel(c).balance_a.msat() == 10000);
  CHECK(n.pn.invoice(inv.invoice_id).state == InvoiceState::expired);
}

TEST_CASE("closing returns balances to on-ledger funds") {
  Net n;
  const auto c = n.pn.open_channel(A, B, Money::msat(10000), Money::msat(4000));
  const auto inv = n.pn.create_invoice(B, Money::msat(1000), true, "", 10'000);
  n.pn.pay_invoice(A, inv.invoice_id);
  CHECK_THROWS_AS(n.pn.close_channel(c), Error);
  n.pn.cancel_hold(B, inv.payment_hash);
  n.pn.close_channel(c);
  CHECK(n.pn.onchain_balance(A).msat() == 996000);
  CHECK(n.pn.onchain_balance(B).msat() == 1004000);
  CHECK(n.pn.total_money() == n.pn.total_supply());
}
